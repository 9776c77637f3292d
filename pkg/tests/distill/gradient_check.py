import numpy as np

from sortkd import distill
from sortkd import transforms
from sortkd.distill import MlpModel, TrainConfig
from sortkd.transforms import TransformKind, TransformSpec

def test(self):
    rng = self.rng(30)
    specs = [
        None,
        TransformSpec(TransformKind.IDENTITY),
        TransformSpec(TransformKind.SWAP),
        TransformSpec(TransformKind.SORT),
        TransformSpec(TransformKind.SORT, standardize=True),
    ]
    worst = 0.0
    for i in range(120):
        model = MlpModel.init(4, 5, 3, rng)
        teacher = MlpModel.init(4, 8, 3, rng)
        # Non-zero biases so that no parameter has an identically zero gradient.
        model.b1[:] = rng.normal(0, 0.1, size=5)
        model.b2[:] = rng.normal(0, 0.1, size=3)
        x = rng.normal(size=(int(rng.integers(1, 9)), 4))
        # Keep pre-activations away from the ReLU kink, where differences are not smooth.
        while np.min(np.abs(x @ model.w1.T + model.b1)) < 1e-3:
            x = rng.normal(size=x.shape)
        y = rng.integers(3, size=x.shape[0])
        spec = specs[i % len(specs)]
        cfg = TrainConfig(
            temperature=float(rng.uniform(1.0, 6.0)),
            ce_weight=float(rng.choice([0.0, 0.5, 1.0])),
            kd_weight=0.0 if spec is None else float(rng.uniform(0.5, 2.0)),
            transform=TransformSpec() if spec is None else spec,
        )
        if spec is None:
            cfg = cfg.replace(ce_weight=1.0)
            z_tea = None
        else:
            z_tea = transforms.apply_transform_batch(spec, distill.forward(teacher, x)[0], y)
        error = distill.gradient_check(model, x, z_tea, y, cfg, h=1e-5)
        worst = max(worst, error)
        assert error <= 1e-5, (i, spec, error)
    assert worst > 0.0
