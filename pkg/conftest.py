'''
Collect the ./test harness cases (tests/<module>/<case>.py, each defining
def test(self)) as pytest items, run with the harness's own TestContext.
'''

import os

import pytest

from sortkd import import_path

_root_dir = os.path.dirname(os.path.abspath(__file__))
_tests_dir = os.path.join(_root_dir, 'tests')
_harness = None

def _get_harness():
    global _harness
    if _harness is None:
        _harness = import_path.import_path(os.path.join(_root_dir, 'test'), register=False)
    return _harness

class HarnessItem(pytest.Item):
    def runtest(self):
        context = _get_harness().TestContext(self.name)
        try:
            import_path.import_path(str(self.path), register=False).test(context)
        finally:
            context.cleanup()

    def reportinfo(self):
        return self.path, 0, self.name

class HarnessFile(pytest.File):
    def collect(self):
        test_id = os.path.splitext(os.path.relpath(str(self.path), _tests_dir))[0]
        yield HarnessItem.from_parent(self, name=test_id)

def pytest_collect_file(parent, file_path):
    if file_path.suffix != '.py' or file_path.name.startswith('_'):
        return None
    rel = os.path.relpath(str(file_path), _tests_dir)
    parts = rel.split(os.sep)
    if len(parts) == 2 and not rel.startswith('..'):
        return HarnessFile.from_parent(parent, path=file_path)
    return None

class _NotAPytestModule(pytest.File):
    def collect(self):
        return []

def pytest_pycollect_makemodule(module_path, parent):
    # Harness case files given explicitly on the command line would otherwise
    # also be imported as plain pytest modules: tests/cli/inspect.py clashes
    # with the stdlib inspect, and def test(self) has no 'self' fixture.
    if os.path.dirname(os.path.dirname(str(module_path))) == _tests_dir:
        return _NotAPytestModule.from_parent(parent, path=module_path)
    return None
