#!/usr/bin/env python3

'''
Brute force reference implementations used to cross check the transforms.
'''

import dataclasses
import itertools
import math
from typing import List, Tuple

import numpy as np

from sortkd import core
from sortkd import thread_pool
from sortkd import transforms
from sortkd.core import ValidationError

EXHAUSTIVE_MAX_CLASSES = 7
RANDOM_MAX_CLASSES = 1000

@dataclasses.dataclass
class EquivalenceReport:
    cases: int = 0
    failures: List[Tuple[tuple, int, str]] = dataclasses.field(default_factory=list)
    # Cases checked per class count.
    per_classes: dict = dataclasses.field(default_factory=dict)

    def add_failure(self, z, y, reason):
        self.failures.append((tuple(float(v) for v in z), int(y), reason))

    def merge(self, other):
        '''
        Order independent: counts add up, failures are kept sorted.
        '''
        self.cases += other.cases
        self.failures = sorted(self.failures + other.failures)
        for c, n in other.per_classes.items():
            self.per_classes[c] = self.per_classes.get(c, 0) + n
        return self

    @property
    def ok(self):
        return not self.failures

    def summary(self, per_classes=True):
        out = ['cases checked: {}'.format(self.cases)]
        for c in sorted(self.per_classes) if per_classes else ():
            out.append('  C={}: {}'.format(c, self.per_classes[c]))
        out.append('failures: {}'.format(len(self.failures)))
        for z, y, reason in self.failures:
            out.append('  z={!r} y={} {}'.format(list(z), y, reason))
        return '\n'.join(out)

def _iterated_swap(z, y):
    '''
    Adjacent rank ladder: exchange the target with the class one rank above
    it until it is on top.

    :return: (w, number of exchanges)
    '''
    z = core.as_logits(z)
    y = core.check_label(y, z.shape[0])
    order = transforms.descending_argsort(z).order.tolist()
    w = z.tolist()
    rank = order.index(y)
    exchanges = 0
    while rank > 0:
        above = order[rank - 1]
        w[y], w[above] = w[above], w[y]
        rank -= 1
        exchanges += 1
    return np.array(w, dtype=np.float64), exchanges

def iterated_swap_oracle(z, y):
    return _iterated_swap(z, y)[0]

def iterated_swap_count(z, y):
    return _iterated_swap(z, y)[1]

def naive_kl_oracle(p, q):
    '''
    Same terms as core.kl_divergence, one at a time with math.log, summed
    from the smallest magnitude up.
    '''
    p = core.as_probs(p, 'teacher probabilities')
    q = core.as_probs(q, 'student probabilities')
    if p.shape != q.shape:
        raise ValidationError('length mismatch: {} vs {}'.format(p.shape[0], q.shape[0]))
    if np.any(q == 0):
        raise ValidationError('student probabilities contain an exact zero: {!r}'.format(q))
    terms = []
    for pj, qj in zip(p.tolist(), q.tolist()):
        if pj > 0:
            terms.append(pj * math.log(pj / qj))
    total = 0.0
    for term in sorted(terms, key=abs):
        total += term
    return total

def check_case(z, y, report):
    '''
    Check one (z, y) pair against the oracle and every transform invariant.
    Values in z are assumed pairwise distinct.
    '''
    z = np.asarray(z, dtype=np.float64)
    report.cases += 1
    c = z.shape[0]
    report.per_classes[c] = report.per_classes.get(c, 0) + 1
    def fail(reason):
        report.add_failure(z, y, reason)
    sorted_z = transforms.sort_transform(z, y)
    swapped_z = transforms.swap_transform(z, y)
    oracle_z, exchanges = _iterated_swap(z, y)
    rank = transforms.target_rank(z, y)
    if not np.array_equal(sorted_z, oracle_z):
        return fail('sort != iterated swap: {!r} vs {!r}'.format(sorted_z.tolist(), oracle_z.tolist()))
    if exchanges != rank:
        return fail('{} exchanges for target rank {}'.format(exchanges, rank))
    reference = np.sort(z)
    for name, w in (('sort', sorted_z), ('swap', swapped_z)):
        if not np.array_equal(np.sort(w), reference):
            return fail('{} changed the value multiset'.format(name))
        total = z.sum()
        if abs(w.sum() - total) > 1e-9 * max(1.0, abs(total)):
            return fail('{} changed the sum'.format(name))
        if int(np.argmax(w)) != y:
            return fail('{} did not put the target on top'.format(name))
    if not np.array_equal(transforms.sort_transform(sorted_z, y), sorted_z):
        return fail('sort is not idempotent')
    if not np.array_equal(transforms.swap_transform(swapped_z, y), swapped_z):
        return fail('swap is not idempotent')
    if rank == 0 and not (np.array_equal(sorted_z, z) and np.array_equal(swapped_z, z)):
        return fail('correct prediction was modified')
    if rank == 1 and not np.array_equal(sorted_z, swapped_z):
        return fail('sort != swap with the target ranked second')
    values, order = transforms.descending_argsort(z)
    demoted = values.copy()
    demoted[:rank] = values[1:rank + 1]
    expected = np.empty_like(z)
    expected[order] = demoted
    expected[y] = values[0]
    if not np.array_equal(sorted_z, expected):
        return fail('classes above the target were not demoted by exactly one rank')

def _check_classes(num_classes):
    report = EquivalenceReport()
    base = np.arange(1.0, num_classes + 1.0)
    for perm in itertools.permutations(base):
        z = np.array(perm)
        for y in range(num_classes):
            check_case(z, y, report)
    return report

def exhaustive_equivalence_check(c_max, nthreads=1, log=None):
    '''
    Every permutation of {1, ..., C} and every label, for every 2 <= C <= c_max.

    Failures are collected in the report, never raised.

    :rtype: EquivalenceReport
    '''
    if isinstance(c_max, bool) or not isinstance(c_max, (int, np.integer)) \
            or not 2 <= c_max <= EXHAUSTIVE_MAX_CLASSES:
        raise ValidationError('C_max must be an integer in [2, {}], got {!r}'.format(
            EXHAUSTIVE_MAX_CLASSES, c_max))
    report = EquivalenceReport()
    def handle_output(work_function_input, work_function_return, work_function_exception):
        if work_function_exception is not None:
            return work_function_exception
        report.merge(work_function_return)
        if log is not None:
            log('C={}: {} cases'.format(work_function_input['num_classes'], work_function_return.cases))
    with thread_pool.ThreadPool(_check_classes, handle_output, nthreads) as pool:
        for num_classes in range(int(c_max), 1, -1):
            pool.submit({'num_classes': num_classes})
    error = pool.get_handle_output_result()
    if error is not None:
        raise error[2]
    return report

def randomized_equivalence_check(n_cases, seed=0, c_min=2, c_max=RANDOM_MAX_CLASSES, log=None):
    '''
    Random Gaussian logits with C drawn log-uniformly in [c_min, c_max]
    and a uniformly random label, so that targets land at all ranks.
    '''
    if not 2 <= c_min <= c_max:
        raise ValidationError('need 2 <= c_min <= c_max, got {} and {}'.format(c_min, c_max))
    if log is not None:
        log('randomized check: {} cases, seed {}'.format(n_cases, seed))
    rng = np.random.default_rng(seed)
    report = EquivalenceReport()
    log_min, log_max = math.log(c_min), math.log(c_max + 1)
    for _ in range(int(n_cases)):
        c = min(int(math.exp(rng.uniform(log_min, log_max))), c_max)
        z = rng.normal(0.0, 3.0, size=c)
        y = int(rng.integers(c))
        check_case(z, y, report)
    return report
