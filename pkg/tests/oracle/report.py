from sortkd import oracle

def test(self):
    a = oracle.EquivalenceReport(cases=3, per_classes={2: 3})
    a.add_failure([2.0, 1.0], 1, 'b reason')
    b = oracle.EquivalenceReport(cases=2, per_classes={2: 1, 3: 1})
    b.add_failure([1.0, 2.0], 0, 'a reason')
    merged = oracle.EquivalenceReport().merge(b).merge(a)
    other = oracle.EquivalenceReport().merge(a).merge(b)
    assert merged == other
    assert merged.cases == 5
    assert merged.per_classes == {2: 4, 3: 1}
    assert not merged.ok
    assert merged.failures[0] == ((1.0, 2.0), 0, 'a reason')
    text = merged.summary()
    assert 'failures: 2' in text and 'C=3: 1' in text
    assert 'C=3' not in merged.summary(per_classes=False)

    # Single case entry point.
    report = oracle.EquivalenceReport()
    oracle.check_case([1.0, 4.0, 3.0, 2.0], 3, report)
    assert report.ok and report.cases == 1
