import numpy as np

from sortkd import transforms
from sortkd.transforms import TransformKind, TransformSpec

def test(self):
    rng = self.rng(10)
    identity = TransformSpec()
    for c in (2, 10, 100, 1000):
        for _ in range(2500):
            z = rng.normal(0, 3, size=c)
            y = int(rng.integers(c))
            rank = transforms.target_rank(z, y)
            sorted_z = transforms.sort_transform(z, y)
            swapped_z = transforms.swap_transform(z, y)
            total = z.sum()
            reference = np.sort(z)
            for w in (sorted_z, swapped_z):
                assert abs(w.sum() - total) <= 1e-9 * max(1.0, abs(total))
                assert np.sort(w).tobytes() == reference.tobytes()
                assert np.argmax(w) == y
            assert transforms.sort_transform(sorted_z, y).tobytes() == sorted_z.tobytes()
            assert transforms.swap_transform(swapped_z, y).tobytes() == swapped_z.tobytes()
            if rank == 0:
                assert sorted_z.tobytes() == z.tobytes() and swapped_z.tobytes() == z.tobytes()
            elif rank == 1:
                assert sorted_z.tobytes() == swapped_z.tobytes()
            # Classes below the target keep their values.
            below = transforms.descending_argsort(z).order[rank + 1:]
            assert np.array_equal(sorted_z[below], z[below])
            for standardize in (False, True):
                w = transforms.apply_transform(TransformSpec(TransformKind.SORT, standardize), z, y)
                assert np.argmax(w) == y
            assert transforms.apply_transform(identity, z, y).tobytes() == z.tobytes()

    w = transforms.zscore_standardize(rng.normal(5, 2, size=50))
    assert abs(w.mean()) <= 1e-10 and abs(w.std() - 1) <= 1e-10

    # Ties: the target ends up holding the top value.
    for z, y in (([2.0, 2.0, 1.0], 1), ([1.0, 3.0, 3.0, 3.0], 3), ([0.0, 0.0], 1)):
        for w in (transforms.sort_transform(z, y), transforms.swap_transform(z, y)):
            assert w[y] == max(z)
            assert sorted(w) == sorted(z)
