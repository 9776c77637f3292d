def test(self):
    status, main = self.run('sortkd-verify', cmax=4, random_cases=500, seed=3)
    assert status == 0
    assert main.report.ok
    assert main.report.cases == 118 + 500

    status, main = self.run('sortkd-verify', cmax=5, random_cases=0, nproc=2)
    assert status == 0
    assert main.report.cases == 600 + 96 + 18 + 4

    for cmax in (1, 8):
        status, main = self.run('sortkd-verify', cmax=cmax)
        assert status == 1
    status, main = self.run('sortkd-verify', cmax=3, random_cases=-1)
    assert status == 1
