import os

import common
from sortkd.core import ValidationError

class Failing(common.SortkdCliFunction):
    def __init__(self):
        super().__init__(defaults={'show_time': False})
        self.add_argument('--error', default='none')

    def timed_main(self):
        if self.env['error'] == 'validation':
            raise ValidationError('bad input')
        if self.env['error'] == 'io':
            raise FileNotFoundError('no such file')
        if self.env['error'] == 'status':
            return 3
        self.log_info('fine')

def test(self):
    failing = Failing()
    assert failing(quiet=True) == 0
    assert failing(quiet=True, error='validation') == 1
    assert failing(quiet=True, error='io') == 2
    assert failing(quiet=True, error='status') == 3
    assert failing(quiet=True, no_such_argument=1) == 1
    assert failing.ellapsed_seconds >= 0
    assert failing.cli_noexit(['--quiet', '--error', 'io']) == 2
    assert failing._arguments['show_time'].default is False

    assert common.SortkdCliFunction.seconds_to_hms(0) == '00:00:00'
    assert common.SortkdCliFunction.seconds_to_hms(3725.9) == '01:02:05'

    passed = common.TestResult('b', common.TestStatus.PASS, 1.0)
    failed = common.TestResult('a', common.TestStatus.FAIL, 61.0, 'boom')
    assert failed < passed
    assert str(passed) == "PASS 00:00:01 'b'"
    assert str(failed) == "FAIL 00:01:01 'a' 'boom'"

    assert not hasattr(common, 'common')
    scratch = self.tmp_dir()
    assert os.path.basename(scratch).startswith(common.consts['tmp_prefix'])
    with open(os.path.join(common.consts['root_dir'], '.gitignore')) as f:
        assert '/out/' in f.read().split()
    assert common.consts['out_dir'] == os.path.join(common.consts['root_dir'], 'out')
