import numpy as np

from sortkd import core
from sortkd import distill
from sortkd import transforms
from sortkd.distill import TrainConfig
from sortkd.transforms import TransformSpec

def test(self):
    rng = self.rng(31)
    z_stu = rng.normal(size=(6, 4))
    z_tea = rng.normal(size=(6, 4))
    y = rng.integers(4, size=6)

    hard = TrainConfig(kd_weight=0.0)
    ce = np.mean([core.cross_entropy(core.softmax(z_stu[i]), int(y[i])) for i in range(6)])
    self.assert_close(distill.total_loss(z_stu, z_tea, y, hard), ce)
    self.assert_close(distill.total_loss(z_stu, None, y, TrainConfig()), ce)

    kd_only = TrainConfig(ce_weight=0.0, temperature=1.0)
    assert distill.total_loss(z_stu, z_stu, y, kd_only) == 0.0
    expected = np.mean([core.kd_loss(z_tea[i], z_stu[i], 1.0) for i in range(6)])
    self.assert_close(distill.total_loss(z_stu, z_tea, y, kd_only), expected)
    t4 = kd_only.replace(temperature=4.0)
    expected = 16.0 * np.mean([core.kd_loss(z_tea[i], z_stu[i], 4.0) for i in range(6)])
    self.assert_close(distill.total_loss(z_stu, z_tea, y, t4), expected)

    assert not np.any(distill.logit_gradient(z_stu, z_stu, y, t4))
    kd_grad = distill.logit_gradient(z_stu, z_tea, y, t4)
    self.assert_close(kd_grad.sum(axis=1), np.zeros(6), rtol=0, atol=1e-15)
    self.assert_close(
        kd_grad,
        4.0 * (core.softmax(z_stu, 4.0) - core.softmax(z_tea, 4.0)) / 6,
        rtol=1e-12,
        atol=1e-17,
    )

    # An identity transform stage leaves the teacher probabilities untouched.
    transformed = transforms.apply_transform_batch(TransformSpec(), z_tea, y)
    assert core.softmax(transformed, 4.0).tobytes() == core.softmax(z_tea, 4.0).tobytes()

    self.assert_raises(core.ValidationError, distill.total_loss, z_stu, z_tea[:3], y, hard)
    self.assert_raises(core.ValidationError, distill.total_loss, z_stu, z_tea, y[:3], hard)
