#!/usr/bin/env python3

'''
Probability and divergence primitives shared by every other module.

All vectors are float64 numpy arrays. Functions accept anything
numpy.asarray understands, so plain lists work in tests and from the CLI.
'''

import numpy as np

# Floor applied to probabilities before taking a log.
PROB_FLOOR = 1e-300
# Absolute tolerance used to check that a probability vector sums to 1.
SIMPLEX_ATOL = 1e-9

class ValidationError(ValueError):
    '''
    Root of all input validation errors. The CLI maps it to exit status 1.
    '''
    pass

class ConfigError(ValidationError):
    '''
    A configuration value or key is invalid. key names the offender.
    '''
    def __init__(self, key, message):
        super().__init__('invalid value for key {!r}: {}'.format(key, message))
        self.key = key

def as_logits(z, name='logits'):
    '''
    Validate and convert a logit vector, or a batch of them along the last axis.

    :rtype: numpy.ndarray
    '''
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 0:
        raise ValidationError('{} must be a vector, got a scalar'.format(name))
    if z.shape[-1] < 2:
        raise ValidationError('{} need at least 2 classes, got {}'.format(name, z.shape[-1]))
    if not np.all(np.isfinite(z)):
        raise ValidationError('{} contain non-finite values: {!r}'.format(name, z))
    return z

def as_probs(p, name='probabilities'):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.shape[0] < 2:
        raise ValidationError('{} must be a vector of at least 2 entries'.format(name))
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValidationError('{} must be finite and non-negative: {!r}'.format(name, p))
    total = p.sum()
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise ValidationError('{} must sum to 1, sum is {!r}'.format(name, total))
    return p

def check_label(y, num_classes):
    '''
    :rtype: int
    '''
    if isinstance(y, (bool, np.bool_)) or not isinstance(y, (int, np.integer)):
        raise ValidationError('label must be an integer, got {!r}'.format(y))
    if not 0 <= y < num_classes:
        raise ValidationError('label {} out of range for {} classes'.format(y, num_classes))
    return int(y)

def check_temperature(t):
    t = float(t)
    if not (np.isfinite(t) and t > 0):
        raise ValidationError('temperature must be finite and > 0, got {!r}'.format(t))
    return t

def softmax(z, t=1.0):
    '''
    Temperature softmax along the last axis.

    exp(z_j / t) / sum_c exp(z_c / t), shifted by the row maximum first.
    '''
    z = as_logits(z)
    t = check_temperature(t)
    scaled = z / t
    scaled = scaled - scaled.max(axis=-1, keepdims=True)
    e = np.exp(scaled)
    return e / e.sum(axis=-1, keepdims=True)

def log_floor(p):
    return np.log(np.maximum(p, PROB_FLOOR))

def kl_terms(p, q):
    '''
    Elementwise p * log(p / q) with 0 * log 0 = 0 and q floored.

    Works on vectors and batches alike. Both kl_divergence and the oracle sum
    exactly these terms.
    '''
    p = np.asarray(p, dtype=np.float64)
    q = np.maximum(np.asarray(q, dtype=np.float64), PROB_FLOOR)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = p * np.log(np.where(p > 0, p, 1.0) / q)
    return np.where(p > 0, terms, 0.0)

def kl_divergence(p_tea, p_stu):
    '''
    KL(p_tea || p_stu), natural log.

    :rtype: float
    '''
    p_tea = as_probs(p_tea, 'teacher probabilities')
    p_stu = as_probs(p_stu, 'student probabilities')
    if p_tea.shape != p_stu.shape:
        raise ValidationError('length mismatch: {} vs {}'.format(p_tea.shape[0], p_stu.shape[0]))
    if np.any(p_stu == 0):
        raise ValidationError('student probabilities contain an exact zero: {!r}'.format(p_stu))
    if np.array_equal(p_tea, p_stu):
        return 0.0
    return float(np.sum(kl_terms(p_tea, p_stu)))

def cross_entropy(p_stu, y):
    '''
    -log p_stu[y], with the probability floored.

    :rtype: float
    '''
    p_stu = as_probs(p_stu, 'student probabilities')
    y = check_label(y, p_stu.shape[0])
    return float(-np.log(max(p_stu[y], PROB_FLOOR)))

def kd_loss(z_tea, z_stu, t=1.0):
    '''
    KL(softmax(z_tea, t) || softmax(z_stu, t)).

    The t^2 gradient scale is the trainer's business, see distill.total_loss.
    '''
    z_tea = as_logits(z_tea, 'teacher logits')
    z_stu = as_logits(z_stu, 'student logits')
    if z_tea.ndim != 1 or z_tea.shape != z_stu.shape:
        raise ValidationError('shape mismatch: {} vs {}'.format(z_tea.shape, z_stu.shape))
    p_tea = softmax(z_tea, t)
    p_stu = softmax(z_stu, t)
    if np.array_equal(p_tea, p_stu):
        return 0.0
    return float(np.sum(kl_terms(p_tea, p_stu)))
