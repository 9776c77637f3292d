import math

import numpy as np

from sortkd import core

def test(self):
    eps = 1e-12
    assert core.cross_entropy([1 - 2 * eps, eps, eps], 0) < 1e-11
    self.assert_close(core.cross_entropy([0.25] * 4, 2), math.log(4))
    self.assert_close(core.cross_entropy([0.9, 0.1], 1), -math.log(0.1))
    self.assert_raises(core.ValidationError, core.cross_entropy, [0.5, 0.5], 2)
    self.assert_raises(core.ValidationError, core.cross_entropy, [0.5, 0.5], -1)
    self.assert_raises(core.ValidationError, core.cross_entropy, [0.5, 0.5], 1.0)

    p = core.softmax([2.0, 0.0])
    expected = p[0] * math.log(2 * p[0]) + p[1] * math.log(2 * p[1])
    self.assert_close(core.kd_loss([2, 0], [0, 0], 1.0), expected)
    # ln 2 - H(p), with H(p) = ln(1 + e^2) - 2 e^2 / (1 + e^2).
    self.assert_close(core.kd_loss([2, 0], [0, 0], 1.0),
                      math.log(2) - math.log(1 + math.e ** 2) + 2 * math.e ** 2 / (1 + math.e ** 2), rtol=1e-12)

    rng = self.rng(3)
    for _ in range(500):
        c = int(rng.integers(2, 30))
        z = rng.normal(0, 3, size=c)
        t = float(rng.uniform(0.5, 8))
        assert core.kd_loss(z, z, t) == 0.0
        assert core.kd_loss(z, rng.normal(0, 3, size=c), t) >= 0.0

    self.assert_raises(core.ValidationError, core.kd_loss, [1, 2], [1, 2, 3])
    self.assert_raises(core.ValidationError, core.kd_loss, [1, 2], [1, 2], 0)
