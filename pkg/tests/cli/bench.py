def test(self):
    status, main = self.run('sortkd-bench', classes='5,20', records=50, repetitions=2, warmup=5, seed=1)
    assert status == 0
    assert [(row.num_classes, row.transform) for row in main.rows] == [
        (c, name) for c in (5, 20) for name in ('identity', 'swap', 'sort', 'swap++')
    ]
    for row in main.rows:
        assert row.records == 50
        assert 0 < row.mean_us <= row.p99_us * 50

    # At 100 classes sort costs no more than the iterated swap it replaces,
    # and at most 3 times a single swap.
    status, main = self.run('sortkd-bench', classes='100', records=3000, repetitions=3, warmup=200, seed=2)
    assert status == 0
    mean_us = {row.transform: row.mean_us for row in main.rows}
    assert mean_us['sort'] <= mean_us['swap++'], mean_us
    assert mean_us['sort'] <= 3 * mean_us['swap'], mean_us

    for classes in ('1', 'a,b', ''):
        status, main = self.run('sortkd-bench', classes=classes, records=10)
        assert status == 1
    status, main = self.run('sortkd-bench', classes='5', records=0)
    assert status == 1
