#!/usr/bin/env python3

'''
Desk scale distillation harness.

A one hidden layer ReLU perceptron is trained as the teacher on synthetic
Gaussian clusters, frozen, and then distilled into smaller students under
hard-label, KD, swap-KD and sort-KD objectives. Gradients are derived by
hand and checked against central finite differences.

Student objective per batch, averaged over samples:

....
ce_weight * CE(softmax(z_stu), y) + kd_weight * T^2 * KL(softmax(z_tea', T) || softmax(z_stu, T))
....

where z_tea' is the teacher logit after the configured pre-processing.
'''

import csv
import dataclasses
import enum
import hashlib
import math
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from sortkd import core
from sortkd import thread_pool
from sortkd import transforms
from sortkd.core import ConfigError, ValidationError
from sortkd.transforms import TransformKind, TransformSpec

# Synthetic data geometry. Classes come in pairs whose means are close enough
# for a well trained teacher to still confuse part of them.
CENTER_NORM = 6.0
PAIR_DISTANCE = 2.5
DEFAULT_SPREAD = 0.95
TRAIN_FRACTION = 0.8

RUN_CSV_FIELDS = [
    'transform',
    'noise_ratio',
    'seed',
    'final_test_top1',
    'teacher_correction_rate',
    'epochs',
]
SUMMARY_CSV_FIELDS = [
    'transform',
    'noise_ratio',
    'runs',
    'mean_test_top1',
    'std_test_top1',
    'mean_teacher_correction_rate',
]
# Name of the hard-label-only rows of the experiment suite.
HARD_LABEL = 'none'

class TrainingDivergedError(ValidationError):
    def __init__(self, epoch, batch, loss, learning_rate):
        super().__init__(
            'training diverged at epoch {} batch {}: loss {!r}, learning_rate {!r}'.format(
                epoch, batch, loss, learning_rate))
        self.epoch = epoch
        self.batch = batch
        self.loss = loss

@dataclasses.dataclass
class MlpModel:
    '''
    z = w2 @ relu(w1 @ x + b1) + b2, stored as w1 [H x d], w2 [C x H].
    '''
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    param_names = ('w1', 'b1', 'w2', 'b2')

    @classmethod
    def init(cls, dims, hidden, num_classes, rng):
        '''
        He initialization for the ReLU layer, zero biases.
        '''
        return cls(
            w1=rng.normal(0.0, math.sqrt(2.0 / dims), size=(hidden, dims)),
            b1=np.zeros(hidden),
            w2=rng.normal(0.0, math.sqrt(1.0 / hidden), size=(num_classes, hidden)),
            b2=np.zeros(num_classes),
        )

    @property
    def dims(self):
        return self.w1.shape[1]

    @property
    def hidden(self):
        return self.w1.shape[0]

    @property
    def num_classes(self):
        return self.w2.shape[0]

    @property
    def shape(self):
        return (self.dims, self.hidden, self.num_classes)

    def params(self):
        return {name: getattr(self, name) for name in self.param_names}

    def copy(self):
        return MlpModel(**{name: value.copy() for name, value in self.params().items()})

    def is_finite(self):
        return all(np.all(np.isfinite(value)) for value in self.params().values())

class ForwardCache(NamedTuple):
    inputs: np.ndarray
    hidden_pre: np.ndarray
    hidden: np.ndarray
    logits: np.ndarray

@dataclasses.dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    labels: np.ndarray
    split: str
    # Labels before noise injection, None if never corrupted.
    clean_labels: Optional[np.ndarray] = None

    def __len__(self):
        return self.labels.shape[0]

@dataclasses.dataclass(frozen=True)
class DataSplits:
    train: Dataset
    test: Dataset
    num_classes: int

    @property
    def dims(self):
        return self.train.inputs.shape[1]

    def content_hash(self):
        '''
        SHA-1 in the style of git hash-object over the raw dataset bytes.
        '''
        chunks = []
        for ds in (self.train, self.test):
            chunks.append(np.ascontiguousarray(ds.inputs, dtype='<f8').tobytes())
            chunks.append(np.ascontiguousarray(ds.labels, dtype='<i8').tobytes())
        data = b''.join(chunks)
        return hashlib.sha1(b'blob ' + str(len(data)).encode() + b'\0' + data).hexdigest()

@dataclasses.dataclass(frozen=True)
class TrainConfig:
    temperature: float = 4.0
    ce_weight: float = 1.0
    kd_weight: float = 1.0
    learning_rate: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 5e-4
    epochs: int = 30
    batch_size: int = 64
    seed: int = 0
    noise_ratio: float = 0.0
    transform: TransformSpec = TransformSpec()

    def validate(self):
        '''
        :raise ConfigError: naming the first offending key.
        '''
        def number(key):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)) \
                    or not math.isfinite(value):
                raise ConfigError(key, 'must be a finite number, got {!r}'.format(value))
            return value
        def integer(key, minimum):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
                raise ConfigError(key, 'must be an integer >= {}, got {!r}'.format(minimum, value))
        if not number('temperature') > 0:
            raise ConfigError('temperature', 'must be > 0')
        for key in ('ce_weight', 'kd_weight', 'weight_decay'):
            if number(key) < 0:
                raise ConfigError(key, 'must be >= 0')
        if not number('learning_rate') > 0:
            raise ConfigError('learning_rate', 'must be > 0')
        if not 0 <= number('momentum') < 1:
            raise ConfigError('momentum', 'must be in [0, 1)')
        if not 0 <= number('noise_ratio') < 1:
            raise ConfigError('noise_ratio', 'must be in [0, 1)')
        integer('epochs', 1)
        integer('batch_size', 1)
        integer('seed', 0)
        if not isinstance(self.transform, TransformSpec):
            raise ConfigError('transform', 'must be a TransformSpec, got {!r}'.format(self.transform))
        return self

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)

@dataclasses.dataclass
class RunMetrics:
    train_loss: List[float] = dataclasses.field(default_factory=list)
    train_top1: List[float] = dataclasses.field(default_factory=list)
    test_top1: List[float] = dataclasses.field(default_factory=list)
    final_test_top1: float = 0.0
    final_train_top1: float = 0.0
    final_test_top5: float = 0.0
    # Fraction of training samples whose pre-processed teacher logit has the
    # label on top. None when there is no teacher.
    teacher_correction_rate: Optional[float] = None

    @property
    def epochs(self):
        return len(self.train_loss)

def generate_synthetic_dataset(num_classes, dims, n_per_class, spread=DEFAULT_SPREAD, seed=0):
    '''
    Gaussian clusters, n_per_class samples per class, split 80/20 per class.

    Class 2k and 2k+1 are placed PAIR_DISTANCE apart, all pairs on a sphere of
    radius CENTER_NORM, so the teacher has overlapping pairs to confuse.

    :rtype: DataSplits
    '''
    if isinstance(num_classes, bool) or not isinstance(num_classes, (int, np.integer)) or num_classes < 3:
        raise ValidationError('need an integer number of classes >= 3, got {!r}'.format(num_classes))
    if isinstance(dims, bool) or not isinstance(dims, (int, np.integer)) or dims < 2:
        raise ValidationError('need an integer number of dims >= 2, got {!r}'.format(dims))
    if isinstance(n_per_class, bool) or not isinstance(n_per_class, (int, np.integer)) or n_per_class < 5:
        raise ValidationError('need at least 5 samples per class, got {!r}'.format(n_per_class))
    if not (math.isfinite(spread) and spread > 0):
        raise ValidationError('spread must be finite and > 0, got {!r}'.format(spread))
    rng = np.random.default_rng(seed)
    def unit(size):
        v = rng.normal(size=size)
        return v / np.linalg.norm(v)
    centers = np.empty((num_classes, dims))
    for c in range(0, num_classes, 2):
        centers[c] = CENTER_NORM * unit(dims)
        if c + 1 < num_classes:
            centers[c + 1] = centers[c] + PAIR_DISTANCE * unit(dims)
    n_train = int(round(TRAIN_FRACTION * n_per_class))
    n_train = min(max(n_train, 1), n_per_class - 1)
    parts = {'train': ([], []), 'test': ([], [])}
    for c in range(num_classes):
        samples = centers[c] + spread * rng.normal(size=(n_per_class, dims))
        samples = samples[rng.permutation(n_per_class)]
        for split, chunk in (('train', samples[:n_train]), ('test', samples[n_train:])):
            parts[split][0].append(chunk)
            parts[split][1].append(np.full(chunk.shape[0], c, dtype=np.int64))
    train, test = [
        Dataset(np.concatenate(parts[split][0]), np.concatenate(parts[split][1]), split)
        for split in ('train', 'test')
    ]
    return DataSplits(train, test, int(num_classes))

def inject_symmetric_noise(splits, noise_ratio, seed=0):
    '''
    Replace each training label, with probability noise_ratio, by a uniformly
    random different class. Test labels are untouched.

    :rtype: DataSplits
    '''
    if not 0 <= noise_ratio < 1:
        raise ValidationError('noise ratio must be in [0, 1), got {!r}'.format(noise_ratio))
    if noise_ratio == 0:
        return splits
    rng = np.random.default_rng(seed)
    train = splits.train
    clean = train.labels if train.clean_labels is None else train.clean_labels
    n = len(train)
    flip = rng.random(n) < noise_ratio
    offset = rng.integers(1, splits.num_classes, size=n)
    labels = np.where(flip, (train.labels + offset) % splits.num_classes, train.labels)
    return dataclasses.replace(
        splits,
        train=Dataset(train.inputs, labels, train.split, clean_labels=clean),
    )

def subsample_per_class(splits, n_per_class, seed=0):
    '''
    Keep at most n_per_class training samples of each class, in their
    original order. The test split is untouched. 0 keeps everything.

    :rtype: DataSplits
    '''
    if isinstance(n_per_class, bool) or not isinstance(n_per_class, (int, np.integer)) or n_per_class < 0:
        raise ValidationError('samples per class must be an integer >= 0, got {!r}'.format(n_per_class))
    train = splits.train
    counts = np.bincount(train.labels, minlength=splits.num_classes)
    if n_per_class == 0 or counts.max() <= n_per_class:
        return splits
    rng = np.random.default_rng(seed)
    keep = []
    for c in range(splits.num_classes):
        index = np.flatnonzero(train.labels == c)
        if index.shape[0] > n_per_class:
            index = rng.choice(index, n_per_class, replace=False)
        keep.append(index)
    keep = np.sort(np.concatenate(keep))
    clean = None if train.clean_labels is None else train.clean_labels[keep]
    return dataclasses.replace(
        splits,
        train=Dataset(train.inputs[keep], train.labels[keep], train.split, clean_labels=clean),
    )

def forward(model, x):
    '''
    :return: (logits [n x C], ForwardCache)
    '''
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.dims:
        raise ValidationError('input shape {} does not match model input width {}'.format(
            x.shape, model.dims))
    hidden_pre = x @ model.w1.T + model.b1
    hidden = np.maximum(hidden_pre, 0.0)
    logits = hidden @ model.w2.T + model.b2
    return logits, ForwardCache(x, hidden_pre, hidden, logits)

def _batch_args(z_stu, z_tea, y):
    z_stu = np.atleast_2d(core.as_logits(z_stu, 'student logits'))
    y = np.atleast_1d(np.asarray(y))
    if y.shape != (z_stu.shape[0],) or not np.issubdtype(y.dtype, np.integer) \
            or np.any(y < 0) or np.any(y >= z_stu.shape[1]):
        raise ValidationError('expected {} labels in [0, {}), got {!r}'.format(
            z_stu.shape[0], z_stu.shape[1], y))
    if z_tea is not None:
        z_tea = np.atleast_2d(core.as_logits(z_tea, 'teacher logits'))
        if z_tea.shape != z_stu.shape:
            raise ValidationError('teacher logits shape {} does not match student {}'.format(
                z_tea.shape, z_stu.shape))
    return z_stu, z_tea, y

def total_loss(z_stu, z_tea, y, cfg):
    '''
    Mean over the batch of the weighted CE + T^2 KL objective.

    :param z_tea: teacher logits already pre-processed by cfg.transform,
        or None for hard-label training.
    '''
    z_stu, z_tea, y = _batch_args(z_stu, z_tea, y)
    rows = np.arange(z_stu.shape[0])
    loss = 0.0
    if cfg.ce_weight:
        ce = -np.mean(core.log_floor(core.softmax(z_stu, 1.0))[rows, y])
        loss += cfg.ce_weight * ce
    if cfg.kd_weight and z_tea is not None:
        t = cfg.temperature
        kl = np.mean(np.sum(core.kl_terms(core.softmax(z_tea, t), core.softmax(z_stu, t)), axis=1))
        loss += cfg.kd_weight * t * t * kl
    return float(loss)

def logit_gradient(z_stu, z_tea, y, cfg):
    '''
    d total_loss / d z_stu.

    CE contributes softmax(z_stu) - onehot(y), the T^2 scaled KD term
    contributes T * (softmax(z_stu, T) - softmax(z_tea, T)).
    '''
    z_stu, z_tea, y = _batch_args(z_stu, z_tea, y)
    n = z_stu.shape[0]
    grad = np.zeros_like(z_stu)
    if cfg.ce_weight:
        ce_grad = core.softmax(z_stu, 1.0)
        ce_grad[np.arange(n), y] -= 1.0
        grad += cfg.ce_weight * ce_grad
    if cfg.kd_weight and z_tea is not None:
        t = cfg.temperature
        grad += cfg.kd_weight * t * (core.softmax(z_stu, t) - core.softmax(z_tea, t))
    return grad / n

def backward(model, cache, z_tea, y, cfg):
    '''
    Exact gradients of total_loss with respect to every model parameter.

    :rtype: Dict[str, numpy.ndarray]
    '''
    if cache.inputs.shape[1] != model.dims or cache.logits.shape[1] != model.num_classes:
        raise ValidationError('forward cache does not match the model shape {}'.format(model.shape))
    dz = logit_gradient(cache.logits, z_tea, y, cfg)
    dhidden = dz @ model.w2
    dhidden[cache.hidden_pre <= 0] = 0.0
    return {
        'w1': dhidden.T @ cache.inputs,
        'b1': dhidden.sum(axis=0),
        'w2': dz.T @ cache.hidden,
        'b2': dz.sum(axis=0),
    }

def gradient_check(model, x, z_tea, y, cfg, h=1e-5):
    '''
    Compare backward with central finite differences of total_loss.

    :return: max over parameter arrays of ||analytic - numeric||_inf / max(||analytic||_inf, ||numeric||_inf)
    '''
    logits, cache = forward(model, x)
    analytic = backward(model, cache, z_tea, y, cfg)
    probe = model.copy()
    worst = 0.0
    for name, param in probe.params().items():
        numeric = np.zeros_like(param)
        flat = param.reshape(-1)
        numeric_flat = numeric.reshape(-1)
        for i in range(flat.shape[0]):
            saved = flat[i]
            flat[i] = saved + h
            plus = total_loss(forward(probe, x)[0], z_tea, y, cfg)
            flat[i] = saved - h
            minus = total_loss(forward(probe, x)[0], z_tea, y, cfg)
            flat[i] = saved
            numeric_flat[i] = (plus - minus) / (2 * h)
        scale = max(np.max(np.abs(analytic[name])), np.max(np.abs(numeric)), 1e-12)
        worst = max(worst, np.max(np.abs(analytic[name] - numeric)) / scale)
    return worst

class SgdMomentum:
    '''
    velocity = momentum * velocity + lr * (grad + weight_decay * param)
    param -= velocity

    Biases are not decayed.
    '''
    decayed = ('w1', 'w2')

    def __init__(self, learning_rate, momentum=0.9, weight_decay=0.0):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity = None

    def step(self, model, grads):
        params = model.params()
        if self.velocity is None:
            self.velocity = {name: np.zeros_like(value) for name, value in params.items()}
        for name, param in params.items():
            grad = grads[name]
            if name in self.decayed and self.weight_decay:
                grad = grad + self.weight_decay * param
            velocity = self.velocity[name]
            velocity *= self.momentum
            velocity += self.learning_rate * grad
            param -= velocity

def topk_accuracy(logits, labels, k=1):
    labels = np.asarray(labels)
    if labels.shape[0] == 0:
        return 0.0
    k = min(k, logits.shape[1])
    top = np.argsort(-logits, axis=1, kind='stable')[:, :k]
    return float(np.mean(np.any(top == labels[:, None], axis=1)))

def evaluate(model, ds, k=1):
    '''
    Top-k accuracy, against the clean labels when the dataset has them.
    '''
    labels = ds.labels if ds.clean_labels is None else ds.clean_labels
    return topk_accuracy(forward(model, ds.inputs)[0], labels, k)

def teacher_correction_rate(teacher, ds, spec):
    '''
    Fraction of samples whose pre-processed teacher logit has the
    (possibly noisy) label on top.
    '''
    z_tea = forward(teacher, ds.inputs)[0]
    return float(np.mean(transforms.correction_mask(
        transforms.apply_transform_batch(spec, z_tea, ds.labels), ds.labels)))

def train(model_shape, splits, cfg, teacher=None, log=None):
    '''
    Mini-batch SGD with momentum and weight decay.

    The teacher is frozen, its logits are recomputed for every batch and
    pre-processed with the batch labels before the loss. Deterministic for a
    fixed cfg.seed. cfg.noise_ratio is not applied here, see
    run_experiment_suite.

    :param model_shape: (dims, hidden, num_classes)
    :return: (model, RunMetrics)
    '''
    cfg.validate()
    dims, hidden, num_classes = model_shape
    if dims != splits.dims or num_classes != splits.num_classes:
        raise ValidationError('model shape {} does not fit data with {} dims and {} classes'.format(
            model_shape, splits.dims, splits.num_classes))
    if teacher is not None and teacher.shape[::2] != (dims, num_classes):
        raise ValidationError('teacher shape {} does not fit data with {} dims and {} classes'.format(
            teacher.shape, dims, num_classes))
    use_teacher = teacher is not None and cfg.kd_weight > 0
    rng = np.random.default_rng(cfg.seed)
    model = MlpModel.init(dims, hidden, num_classes, rng)
    optimizer = SgdMomentum(cfg.learning_rate, cfg.momentum, cfg.weight_decay)
    metrics = RunMetrics()
    if use_teacher:
        metrics.teacher_correction_rate = teacher_correction_rate(teacher, splits.train, cfg.transform)
    x_train = splits.train.inputs
    y_train = splits.train.labels
    n = y_train.shape[0]
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for batch, start in enumerate(range(0, n, cfg.batch_size)):
            index = order[start:start + cfg.batch_size]
            xb = x_train[index]
            yb = y_train[index]
            z_stu, cache = forward(model, xb)
            if not np.all(np.isfinite(z_stu)):
                raise TrainingDivergedError(epoch, batch, float('nan'), cfg.learning_rate)
            if use_teacher:
                z_tea = transforms.apply_transform_batch(cfg.transform, forward(teacher, xb)[0], yb)
            else:
                z_tea = None
            loss = total_loss(z_stu, z_tea, yb, cfg)
            if not math.isfinite(loss):
                raise TrainingDivergedError(epoch, batch, loss, cfg.learning_rate)
            optimizer.step(model, backward(model, cache, z_tea, yb, cfg))
            loss_sum += loss * index.shape[0]
        if not model.is_finite():
            raise TrainingDivergedError(epoch, batch, float('nan'), cfg.learning_rate)
        metrics.train_loss.append(loss_sum / n)
        metrics.train_top1.append(evaluate(model, splits.train))
        metrics.test_top1.append(evaluate(model, splits.test))
        if log is not None:
            log('epoch {} loss {:.6f} train_top1 {:.4f} test_top1 {:.4f}'.format(
                epoch, metrics.train_loss[-1], metrics.train_top1[-1], metrics.test_top1[-1]))
    metrics.final_test_top1 = metrics.test_top1[-1]
    metrics.final_train_top1 = metrics.train_top1[-1]
    metrics.final_test_top5 = evaluate(model, splits.test, k=5)
    return model, metrics

@dataclasses.dataclass(frozen=True)
class ExperimentGrid:
    '''
    Transforms x noise ratios x seeds, all against one frozen teacher.

    A transform of None is the hard-label-only baseline.
    '''
    base: TrainConfig = TrainConfig(epochs=100)
    transforms: Tuple[Optional[TransformSpec], ...] = (
        TransformSpec(TransformKind.IDENTITY),
        TransformSpec(TransformKind.SWAP),
        TransformSpec(TransformKind.SORT),
    )
    noise_ratios: Tuple[float, ...] = (0.0,)
    seeds: Tuple[int, ...] = tuple(range(10))
    num_classes: int = 10
    dims: int = 16
    n_per_class: int = 1000
    spread: float = DEFAULT_SPREAD
    data_seed: int = 0
    hidden: int = 16
    teacher_hidden: int = 32
    teacher_epochs: int = 20
    # Training samples per class each student sees, drawn per cell seed. 0 for all.
    student_n_per_class: int = 50

    def validate(self):
        self.base.validate()
        if not self.transforms:
            raise ConfigError('transforms', 'must not be empty')
        if not self.seeds:
            raise ConfigError('seeds', 'must not be empty')
        if not self.noise_ratios:
            raise ConfigError('noise_ratios', 'must not be empty')
        for rho in self.noise_ratios:
            if isinstance(rho, bool) or not isinstance(rho, (int, float)) or not 0 <= rho < 1:
                raise ConfigError('noise_ratios', 'every ratio must be in [0, 1), got {!r}'.format(rho))
        for key, minimum in (
            ('hidden', 1),
            ('teacher_hidden', 1),
            ('teacher_epochs', 1),
            ('num_classes', 3),
            ('dims', 2),
            ('n_per_class', 5),
            ('data_seed', 0),
            ('student_n_per_class', 0),
        ):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
                raise ConfigError(key, 'must be an integer >= {}, got {!r}'.format(minimum, value))
        for seed in self.seeds:
            if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
                raise ConfigError('seeds', 'every seed must be an integer >= 0, got {!r}'.format(seed))
        if isinstance(self.spread, bool) or not isinstance(self.spread, (int, float)) \
                or not (math.isfinite(self.spread) and self.spread > 0):
            raise ConfigError('spread', 'must be finite and > 0, got {!r}'.format(self.spread))
        for spec in self.transforms:
            if spec is not None and not isinstance(spec, TransformSpec):
                raise ConfigError('transforms', 'expected TransformSpec or None, got {!r}'.format(spec))
        # Cells are keyed by (transform name, noise ratio, seed).
        for key, names in (
            ('transforms', [HARD_LABEL if spec is None else spec.name for spec in self.transforms]),
            ('noise_ratios', list(self.noise_ratios)),
            ('seeds', list(self.seeds)),
        ):
            duplicates = sorted({name for name in names if names.count(name) > 1}, key=str)
            if duplicates:
                raise ConfigError(key, 'duplicate entries: {}'.format(', '.join(map(str, duplicates))))
        return self

    def to_dict(self):
        def encode(value):
            if isinstance(value, enum.Enum):
                return value.value
            if isinstance(value, dict):
                return {k: encode(v) for k, v in value.items()}
            if isinstance(value, (list, tuple)):
                return [encode(v) for v in value]
            return value
        return encode(dataclasses.asdict(self))

class CellResult(NamedTuple):
    transform: str
    noise_ratio: float
    seed: int
    metrics: RunMetrics

class SummaryRow(NamedTuple):
    transform: str
    noise_ratio: float
    runs: int
    mean_test_top1: float
    std_test_top1: float
    mean_teacher_correction_rate: Optional[float]

@dataclasses.dataclass
class SuiteResult:
    grid: ExperimentGrid
    cells: List[CellResult]
    teacher_metrics: RunMetrics
    dataset_hash: str

    def summary(self):
        '''
        One row per (transform, noise ratio), in grid order.
        '''
        groups = {}
        for cell in self.cells:
            groups.setdefault((cell.transform, cell.noise_ratio), []).append(cell.metrics)
        rows = []
        for (name, rho), runs in groups.items():
            top1 = np.array([m.final_test_top1 for m in runs])
            rates = [m.teacher_correction_rate for m in runs if m.teacher_correction_rate is not None]
            rows.append(SummaryRow(
                name,
                rho,
                len(runs),
                float(top1.mean()),
                float(top1.std(ddof=1)) if len(runs) > 1 else 0.0,
                float(np.mean(rates)) if rates else None,
            ))
        return rows

    def table_text(self):
        '''
        Transforms as rows, noise ratios as columns, mean +- std test top-1 in
        percent, plus the delta of each row against the plain KD row.
        '''
        summary = {(r.transform, r.noise_ratio): r for r in self.summary()}
        names = list(dict.fromkeys(r.transform for r in self.summary()))
        ratios = list(dict.fromkeys(r.noise_ratio for r in self.summary()))
        reference = TransformSpec(TransformKind.IDENTITY).name
        out = ['{:<14}'.format('transform') + ''.join('{:>22}'.format('noise {:g}'.format(rho)) for rho in ratios)]
        for name in names:
            line = '{:<14}'.format(name)
            for rho in ratios:
                row = summary[(name, rho)]
                cell = '{:.2f} +- {:.2f}'.format(100 * row.mean_test_top1, 100 * row.std_test_top1)
                if name != reference and (reference, rho) in summary:
                    cell += ' ({:+.2f})'.format(
                        100 * (row.mean_test_top1 - summary[(reference, rho)].mean_test_top1))
                line += '{:>22}'.format(cell)
            out.append(line)
        return '\n'.join(out)

    def write_runs_csv(self, path):
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(RUN_CSV_FIELDS)
            for cell in self.cells:
                rate = cell.metrics.teacher_correction_rate
                writer.writerow([
                    cell.transform,
                    repr(cell.noise_ratio),
                    cell.seed,
                    repr(cell.metrics.final_test_top1),
                    '' if rate is None else repr(rate),
                    cell.metrics.epochs,
                ])

    def write_summary_csv(self, path):
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(SUMMARY_CSV_FIELDS)
            for row in self.summary():
                writer.writerow([
                    row.transform,
                    repr(row.noise_ratio),
                    row.runs,
                    repr(row.mean_test_top1),
                    repr(row.std_test_top1),
                    '' if row.mean_teacher_correction_rate is None else repr(row.mean_teacher_correction_rate),
                ])

    def manifest(self):
        return {
            'grid': self.grid.to_dict(),
            'dataset_hash': self.dataset_hash,
            'teacher': {
                'train_top1': self.teacher_metrics.final_train_top1,
                'test_top1': self.teacher_metrics.final_test_top1,
                'test_top5': self.teacher_metrics.final_test_top5,
            },
            'cells': len(self.cells),
        }

def train_teacher(grid, splits, log=None):
    cfg = grid.base.replace(
        ce_weight=1.0,
        kd_weight=0.0,
        epochs=grid.teacher_epochs,
        seed=grid.data_seed,
        noise_ratio=0.0,
        transform=TransformSpec(),
    )
    return train((splits.dims, grid.teacher_hidden, splits.num_classes), splits, cfg, log=log)

def run_experiment_suite(grid, nthreads=1, log=None):
    '''
    Train the teacher once on clean data, then one student per
    (noise ratio, transform, seed) cell.

    Each cell draws its training subset (grid.student_n_per_class per class)
    and then its label noise from the cell seed, and the transforms see the
    noisy labels. Cells may run in parallel: each owns its RNG and model, and
    results are assembled by cell id in grid order.

    :rtype: SuiteResult
    '''
    grid.validate()
    splits = generate_synthetic_dataset(
        grid.num_classes, grid.dims, grid.n_per_class, grid.spread, grid.data_seed)
    teacher, teacher_metrics = train_teacher(grid, splits)
    if log is not None:
        log('teacher: train_top1 {:.4f} test_top1 {:.4f}'.format(
            teacher_metrics.final_train_top1, teacher_metrics.final_test_top1))
    cell_ids = []
    for rho in grid.noise_ratios:
        for spec in grid.transforms:
            for seed in grid.seeds:
                cell_ids.append((HARD_LABEL if spec is None else spec.name, rho, seed, spec))
    results = {}

    def run_cell(cell_id):
        name, rho, seed, spec = cell_id
        subset_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
        subset = subsample_per_class(splits, grid.student_n_per_class, subset_seed)
        noisy = inject_symmetric_noise(subset, rho, noise_seed)
        if spec is None:
            cfg = grid.base.replace(seed=seed, noise_ratio=rho, kd_weight=0.0, transform=TransformSpec())
            cell_teacher = None
        else:
            cfg = grid.base.replace(seed=seed, noise_ratio=rho, transform=spec)
            cell_teacher = teacher
        return train((splits.dims, grid.hidden, splits.num_classes), noisy, cfg, cell_teacher)[1]

    def handle_output(work_function_input, work_function_return, work_function_exception):
        if work_function_exception is not None:
            return work_function_exception
        name, rho, seed, spec = work_function_input['cell_id']
        results[(name, rho, seed)] = work_function_return
        if log is not None:
            log('cell {} noise {:g} seed {}: test_top1 {:.4f}'.format(
                name, rho, seed, work_function_return.final_test_top1))

    with thread_pool.ThreadPool(run_cell, handle_output, nthreads, submit_raise_exit=True) as pool:
        for cell_id in cell_ids:
            pool.submit({'cell_id': cell_id})
    error = pool.get_handle_output_result()
    if error is not None:
        raise error[2]
    cells = [
        CellResult(name, rho, seed, results[(name, rho, seed)])
        for name, rho, seed, spec in cell_ids
    ]
    return SuiteResult(grid, cells, teacher_metrics, splits.content_hash())
