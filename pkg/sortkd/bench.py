#!/usr/bin/env python3

'''
Per record latency of the teacher logit transforms.
'''

import time
from typing import NamedTuple

import numpy as np

from sortkd import oracle
from sortkd import transforms
from sortkd.core import ValidationError
from sortkd.transforms import TransformKind, TransformSpec

_IDENTITY = TransformSpec(TransformKind.IDENTITY)

# Fastest first, as the report lists them.
BENCH_TRANSFORMS = (
    ('identity', lambda z, y: transforms.apply_transform(_IDENTITY, z, y)),
    ('swap', transforms.swap_transform),
    ('sort', transforms.sort_transform),
    ('swap++', oracle.iterated_swap_oracle),
)

class BenchRow(NamedTuple):
    num_classes: int
    transform: str
    records: int
    mean_us: float
    p99_us: float

def synthetic_records(num_classes, n_records, seed=0):
    '''
    Gaussian logits with uniformly random labels, so targets land at every rank.
    '''
    rng = np.random.default_rng(seed)
    logits = rng.normal(0.0, 3.0, size=(n_records, num_classes))
    labels = rng.integers(num_classes, size=n_records)
    return logits, labels

def time_per_record(function, logits, labels):
    '''
    :return: nanoseconds per record, monotonic clock
    '''
    out = np.empty(labels.shape[0])
    clock = time.perf_counter_ns
    for i in range(labels.shape[0]):
        z = logits[i]
        y = int(labels[i])
        start = clock()
        function(z, y)
        out[i] = clock() - start
    return out

def run_bench(class_counts, n_records, repetitions=3, warmup=100, seed=0, log=None):
    '''
    For every class count and transform, time n_records calls per repetition
    after warmup untimed calls, and keep the repetition with the lowest mean.

    :rtype: List[BenchRow]
    '''
    if not class_counts or any(c < 2 for c in class_counts):
        raise ValidationError('class counts must all be >= 2, got {!r}'.format(class_counts))
    if n_records < 1 or repetitions < 1 or warmup < 0:
        raise ValidationError('need records >= 1, repetitions >= 1 and warmup >= 0')
    rows = []
    for num_classes in class_counts:
        logits, labels = synthetic_records(num_classes, n_records, seed)
        for name, function in BENCH_TRANSFORMS:
            for i in range(min(warmup, n_records)):
                function(logits[i], int(labels[i]))
            best = None
            for repetition in range(repetitions):
                samples = time_per_record(function, logits, labels)
                if best is None or samples.mean() < best.mean():
                    best = samples
            row = BenchRow(
                num_classes,
                name,
                n_records,
                float(best.mean()) / 1000.0,
                float(np.percentile(best, 99)) / 1000.0,
            )
            rows.append(row)
            if log is not None:
                log(format_row(row))
    return rows

def format_row(row):
    return '{:>6} {:<9} mean {:10.3f} us  p99 {:10.3f} us'.format(
        row.num_classes, row.transform, row.mean_us, row.p99_us)
