from sortkd import oracle
from sortkd.core import ValidationError

def test(self):
    messages = []
    report = oracle.randomized_equivalence_check(100000, seed=5, log=messages.append)
    assert report.cases == 100000
    assert report.ok, report.summary()
    assert min(report.per_classes) >= 2 and max(report.per_classes) <= oracle.RANDOM_MAX_CLASSES
    # Class counts spread over the whole range.
    assert min(report.per_classes) < 10 and max(report.per_classes) > 500
    assert any('seed 5' in m for m in messages)

    again = oracle.randomized_equivalence_check(200, seed=5, c_max=20)
    assert again.per_classes == oracle.randomized_equivalence_check(200, seed=5, c_max=20).per_classes

    self.assert_raises(ValidationError, oracle.randomized_equivalence_check, 10, c_min=1)
    self.assert_raises(ValidationError, oracle.randomized_equivalence_check, 10, c_min=50, c_max=10)
