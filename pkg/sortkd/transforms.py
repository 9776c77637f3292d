#!/usr/bin/env python3

'''
Label-guided pre-processing of teacher logits.

* identity: leave the logits alone, i.e. classical KD
* swap: exchange the target logit with the current maximum
* sort: put the target on top and push every class that was above it
  down by exactly one rank, reusing the original values

Each kind may be followed by z-score standardization.

Everything here works on raw logits, before any temperature is applied.
'''

import dataclasses
import enum
from typing import NamedTuple

import numpy as np

from sortkd.core import ValidationError, as_logits, check_label

class TransformKind(enum.Enum):
    IDENTITY = 'identity'
    SWAP = 'swap'
    SORT = 'sort'

@dataclasses.dataclass(frozen=True)
class TransformSpec:
    kind: TransformKind = TransformKind.IDENTITY
    standardize: bool = False

    @classmethod
    def parse(cls, kind, standardize=False):
        '''
        :param kind: one of the TransformKind values, e.g. 'sort', or a TransformKind.
        '''
        if isinstance(kind, TransformKind):
            return cls(kind, bool(standardize))
        try:
            return cls(TransformKind(str(kind).lower()), bool(standardize))
        except ValueError:
            raise ValidationError('unknown transform: {!r}, valid: {}'.format(
                kind, ', '.join(k.value for k in TransformKind)))

    @property
    def name(self):
        if self.standardize:
            return self.kind.value + '+zscore'
        return self.kind.value

    @classmethod
    def from_name(cls, name):
        '''
        Inverse of name, e.g. 'sort+zscore'.
        '''
        kind, plus, suffix = str(name).partition('+')
        if plus and suffix != 'zscore':
            raise ValidationError('unknown transform suffix: {!r}'.format(name))
        return cls.parse(kind, bool(plus))

    def is_noop(self):
        return self.kind is TransformKind.IDENTITY and not self.standardize

class ArgsortResult(NamedTuple):
    values: np.ndarray
    order: np.ndarray

def one_hot_mask(num_classes, y, alpha):
    '''
    alpha at index y, 0 elsewhere.
    '''
    num_classes = int(num_classes)
    if num_classes < 2:
        raise ValidationError('need at least 2 classes, got {}'.format(num_classes))
    y = check_label(y, num_classes)
    if not alpha > 0:
        raise ValidationError('alpha must be > 0, got {!r}'.format(alpha))
    mask = np.zeros(num_classes)
    mask[y] = alpha
    return mask

def mask_alpha(z, y):
    '''
    Constant added on the target so that it strictly exceeds every other logit:
    (max - min) + 1, doubled until floating point rounding cannot tie it with
    the maximum. Near the float64 limit, where that overflows, the smallest
    representable offset above max - z[y] is used instead.

    :raise ValidationError: if no finite offset exists.
    '''
    top = z.max()
    with np.errstate(over='ignore'):
        alpha = (top - z.min()) + 1.0
        while np.isfinite(alpha) and not z[y] + alpha > top:
            alpha *= 2.0
        if not np.isfinite(z[y] + alpha):
            # Aim at the first float above the maximum.
            alpha = np.nextafter(top, np.inf) - z[y]
            while np.isfinite(alpha) and not z[y] + alpha > top:
                alpha = np.nextafter(alpha, np.inf)
        if not (np.isfinite(alpha) and np.isfinite(z[y] + alpha)):
            raise ValidationError('no finite offset puts class {} above the maximum {!r}'.format(y, top))
    return float(alpha)

def modified_logit(z, y):
    z = as_logits(z)
    y = check_label(y, z.shape[0])
    return z + one_hot_mask(z.shape[0], y, mask_alpha(z, y))

def descending_argsort(z):
    '''
    Stable descending sort: ties keep ascending class index order.

    :rtype: ArgsortResult
    '''
    z = as_logits(z)
    order = np.argsort(-z, axis=-1, kind='stable')
    return ArgsortResult(np.take_along_axis(z, order, axis=-1), order)

def target_rank(z, y):
    '''
    0-based position of class y in the stable descending order of z.
    '''
    z = as_logits(z)
    y = check_label(y, z.shape[0])
    return int(np.flatnonzero(descending_argsort(z).order == y)[0])

def sort_transform(z, y):
    '''
    Scatter the sorted original values onto the order of the modified logits:
    w[order'[r]] = sorted(z)[r] for every rank r.

    The stable order of the modified logits is the target followed by the
    stable order of every other class. The scatter therefore gives the target
    the top value, shifts every class ranked above it down by one rank and
    leaves the classes below it untouched, which is what is computed here. It
    holds for any finite input, including ones where the modified logit
    overflows.
    '''
    z = as_logits(z)
    y = check_label(y, z.shape[0])
    order = np.argsort(-z, kind='stable')
    rank = int(np.flatnonzero(order == y)[0])
    w = z.copy()
    if rank:
        values = z[order[:rank + 1]]
        w[order[:rank]] = values[1:]
        w[y] = values[0]
    return w

def swap_transform(z, y):
    z = as_logits(z)
    y = check_label(y, z.shape[0])
    top = int(np.argmax(z))
    w = z.copy()
    w[y], w[top] = z[top], z[y]
    return w

def zscore_standardize(z):
    '''
    (z - mean) / std with the population standard deviation.
    '''
    z = as_logits(z)
    std = z.std(axis=-1, keepdims=True)
    if np.any(std == 0):
        raise ValidationError('cannot standardize constant logits: {!r}'.format(z))
    return (z - z.mean(axis=-1, keepdims=True)) / std

def apply_transform(spec, z, y):
    z = as_logits(z)
    y = check_label(y, z.shape[0])
    if spec.kind is TransformKind.SORT:
        w = sort_transform(z, y)
    elif spec.kind is TransformKind.SWAP:
        w = swap_transform(z, y)
    else:
        w = z
    if spec.standardize:
        w = zscore_standardize(w)
    return w

def _check_batch(z, y):
    z = as_logits(z)
    if z.ndim != 2:
        raise ValidationError('expected a 2D logit batch, got shape {}'.format(z.shape))
    y = np.asarray(y)
    if y.shape != (z.shape[0],) or not np.issubdtype(y.dtype, np.integer):
        raise ValidationError('expected {} integer labels, got {!r}'.format(z.shape[0], y))
    if np.any(y < 0) or np.any(y >= z.shape[1]):
        raise ValidationError('labels out of range for {} classes'.format(z.shape[1]))
    return z, y

def _sort_batch(z, y):
    n, c = z.shape
    order = np.argsort(-z, axis=1, kind='stable')
    values = np.take_along_axis(z, order, axis=1)
    # Same corrected order as sort_transform.
    rest = order[order != y[:, None]].reshape(n, c - 1)
    corrected_order = np.concatenate([y[:, None], rest], axis=1)
    w = np.empty_like(z)
    np.put_along_axis(w, corrected_order, values, axis=1)
    return w

def _swap_batch(z, y):
    rows = np.arange(z.shape[0])
    top = np.argmax(z, axis=1)
    w = z.copy()
    w[rows, y] = z[rows, top]
    w[rows, top] = z[rows, y]
    return w

def apply_transform_batch(spec, z, y):
    '''
    Row-wise apply_transform over an n x C logit matrix, vectorized.

    Bitwise equal to calling apply_transform on each row.
    '''
    z, y = _check_batch(z, y)
    if spec.kind is TransformKind.SORT:
        w = _sort_batch(z, y)
    elif spec.kind is TransformKind.SWAP:
        w = _swap_batch(z, y)
    else:
        w = z
    if spec.standardize:
        w = zscore_standardize(w)
    return w

def correction_mask(z, y):
    '''
    Per row: does the target hold the maximum value?
    '''
    z, y = _check_batch(z, y)
    rows = np.arange(z.shape[0])
    return z[rows, y] == z.max(axis=1)
