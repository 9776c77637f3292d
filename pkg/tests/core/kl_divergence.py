import math

import numpy as np

from sortkd import core
from sortkd import oracle

def test(self):
    assert core.kl_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    self.assert_close(core.kl_divergence([0.75, 0.25], [0.5, 0.5]), expected)
    self.assert_close(core.kl_divergence([0.75, 0.25], [0.5, 0.5]), 0.130812035941137, rtol=1e-12)
    self.assert_close(oracle.naive_kl_oracle([0.75, 0.25], [0.5, 0.5]), expected)
    assert oracle.naive_kl_oracle([0.5, 0.5], [0.5, 0.5]) == 0.0
    # 0 * log 0 is 0.
    self.assert_close(core.kl_divergence([1.0, 0.0], [0.5, 0.5]), math.log(2))

    rng = self.rng(2)
    for _ in range(10000):
        c = int(rng.integers(2, 20))
        p = rng.dirichlet(np.ones(c))
        q = rng.dirichlet(np.ones(c))
        if np.any(q == 0):
            continue
        kl = core.kl_divergence(p, q)
        assert kl >= 0, (p, q, kl)
        reference = oracle.naive_kl_oracle(p, q)
        assert abs(kl - reference) <= 1e-12 * max(abs(reference), 1e-300) or abs(kl - reference) <= 1e-15, \
            (kl, reference)
        assert core.kl_divergence(p, p) == 0.0

    self.assert_raises(core.ValidationError, core.kl_divergence, [0.5, 0.5], [1.0, 0.0])
    self.assert_raises(core.ValidationError, core.kl_divergence, [0.5, 0.5], [0.2, 0.3, 0.5])
    self.assert_raises(core.ValidationError, core.kl_divergence, [0.5, 0.6], [0.5, 0.5])
    self.assert_raises(core.ValidationError, core.kl_divergence, [1.5, -0.5], [0.5, 0.5])
