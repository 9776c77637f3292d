import numpy as np

from sortkd import distill
from sortkd.core import ValidationError

def test(self):
    splits = distill.generate_synthetic_dataset(10, 16, 200, seed=4)
    again = distill.generate_synthetic_dataset(10, 16, 200, seed=4)
    assert splits.content_hash() == again.content_hash()
    assert splits.train.inputs.tobytes() == again.train.inputs.tobytes()
    assert splits.content_hash() != distill.generate_synthetic_dataset(10, 16, 200, seed=5).content_hash()
    assert len(splits.train) == 1600 and len(splits.test) == 400
    assert np.bincount(splits.train.labels).tolist() == [160] * 10
    assert np.bincount(splits.test.labels).tolist() == [40] * 10
    assert splits.dims == 16 and splits.num_classes == 10
    assert len(splits.content_hash()) == 40

    assert distill.inject_symmetric_noise(splits, 0.0, seed=1) is splits
    for rho in (0.1, 0.2, 0.3):
        noisy = distill.inject_symmetric_noise(splits, rho, seed=1)
        flipped = noisy.train.labels != splits.train.labels
        assert abs(flipped.mean() - rho) < 0.05, (rho, flipped.mean())
        assert np.array_equal(noisy.train.clean_labels, splits.train.labels)
        assert noisy.test is splits.test
        assert noisy.train.inputs is splits.train.inputs
        assert np.all((noisy.train.labels >= 0) & (noisy.train.labels < 10))
    twice = distill.inject_symmetric_noise(distill.inject_symmetric_noise(splits, 0.2, 1), 0.2, 2)
    assert np.array_equal(twice.train.clean_labels, splits.train.labels)

    self.assert_raises(ValidationError, distill.inject_symmetric_noise, splits, 1.0)
    self.assert_raises(ValidationError, distill.inject_symmetric_noise, splits, -0.1)
    self.assert_raises(ValidationError, distill.generate_synthetic_dataset, 2, 16, 200)
    self.assert_raises(ValidationError, distill.generate_synthetic_dataset, 10, 1, 200)
    self.assert_raises(ValidationError, distill.generate_synthetic_dataset, 10, 16, 200, spread=0.0)
