#!/usr/bin/env python3

import bisect
import enum
import functools
import inspect
import itertools
import math
import os
import queue
import sys
import threading
import time
from typing import Union

import cli_function
from sortkd import thread_pool
from sortkd.core import ValidationError

# Fixed parameters that don't depend on CLI arguments.
consts = {}
consts['repo_short_id'] = 'sortkd'
consts['root_dir'] = os.path.dirname(os.path.abspath(__file__))
consts['data_dir'] = os.path.join(consts['root_dir'], 'data')
consts['out_dir'] = os.path.join(consts['root_dir'], 'out')
consts['tests_dir'] = os.path.join(consts['root_dir'], 'tests')
consts['default_config_file'] = os.path.join(consts['data_dir'], 'config.py')
consts['exit_success'] = 0
consts['exit_validation'] = 1
consts['exit_io'] = 2
# Basename prefix of the scratch directories of the test runner.
consts['tmp_prefix'] = 'tmp.'

class SortkdCliFunction(cli_function.CliFunction):
    '''
    Common functionality shared across our CLI functions:

    * command timing
    * some common flags: --quiet, --verbose, --show-time, --nproc
    * logging helpers serialized by a print lock
    * mapping of exceptions to exit statuses

    self.env contains the command line arguments plus consts.
    '''
    def __init__(
        self,
        *args,
        defaults=None,
        **kwargs
    ):
        '''
        :ptype defaults: Dict[str,Any]
        :param defaults: override the default value of an argument
        '''
        kwargs.setdefault('default_config_file', consts['default_config_file'])
        kwargs['extra_config_params'] = os.path.basename(inspect.getfile(self.__class__))
        if defaults is None:
            defaults = {}
        self._defaults = defaults
        super().__init__(*args, **kwargs)
        self.print_lock = threading.Lock()
        self.ellapsed_seconds = 0.0
        self.add_argument(
            '-j',
            '--nproc',
            default=1,
            type=int,
            help='Number of worker threads. 1 keeps runs single threaded.'
        )
        self.add_argument(
            '-q',
            '--quiet',
            default=False,
            help='Don\'t print anything to stdout, except if it is part of an interactive terminal.'
        )
        self.add_argument(
            '--show-time',
            default=True,
            help='Print how long it took to run the command at the end.'
        )
        self.add_argument(
            '-v',
            '--verbose',
            default=False,
            help='Log progress of long computations, e.g. one line per training epoch.'
        )

    def __call__(self, *args, **kwargs):
        '''
        For Python code calls, in addition to base class behaviour,
        print the CLI equivalent of the call.
        '''
        return self._do_main(kwargs, print_cmd=not kwargs.get('quiet', False))

    def _do_main(self, kwargs, print_cmd=False):
        '''
        Argument and config file errors exit like errors raised by main.
        '''
        try:
            args = self._get_args(kwargs)
            if print_cmd:
                cmd = ['./' + self.extra_config_params]
                for line in self.get_cli(**kwargs):
                    cmd.extend(line)
                with self.print_lock:
                    print(' '.join(cmd))
        except ValidationError as e:
            self.log_error(e)
            return consts['exit_validation']
        except OSError as e:
            self.log_error(e)
            return consts['exit_io']
        return self.main(**args)

    def _handle_thread_pool_errors(self, my_thread_pool):
        handle_output_result = my_thread_pool.get_handle_output_result()
        if handle_output_result is not None:
            work_function_input, work_function_return, exception = handle_output_result
            if not type(exception) is thread_pool.ThreadPoolExitException:
                self.log_error('work_function or handle_output raised unexpectedly:')
                with self.print_lock:
                    print(thread_pool.ThreadPool.exception_traceback_string(exception), end='')
                    print('work_function_input: {}'.format(work_function_input))
                    print('work_function_return: {}'.format(work_function_return))
            return consts['exit_validation']
        else:
            return consts['exit_success']

    def add_argument(self, *args, **kwargs):
        '''
        Also handle modified defaults from child classes.
        '''
        shortname, longname, key, is_option = self.get_key(*args, **kwargs)
        if key in self._defaults:
            kwargs['default'] = self._defaults[key]
        super().add_argument(*args, **kwargs)

    def log_error(self, msg):
        with self.print_lock:
            print('error: {}'.format(msg), file=sys.stdout)

    def log_info(self, msg='', flush=False, **kwargs):
        with self.print_lock:
            if not self.env['quiet']:
                print('{}'.format(msg), **kwargs)
            if flush:
                sys.stdout.flush()

    def log_warn(self, msg):
        with self.print_lock:
            print('warning: {}'.format(msg), file=sys.stdout)

    def log_verbose(self, msg):
        '''
        log_info, only under --verbose. Passed as the log callable of long library calls.
        '''
        if self.env['verbose']:
            self.log_info(msg)

    def main(self, *args, **kwargs):
        '''
        Run setup, timed_main and teardown.

        :return: the first non-zero status of timed_main and teardown, 0 otherwise.
            ValidationError maps to 1 and OSError to 2, both logged.
        '''
        env = kwargs.copy()
        self.input_args = env.copy()
        env.update(consts)
        self.env = env
        return_value = consts['exit_success']
        start_time = time.time()
        try:
            self.setup(env)
            ret = self.timed_main()
            if ret is not None and ret != 0:
                return_value = ret
            ret = self.teardown()
            if ret is not None and ret != 0:
                return_value = ret
        except ValidationError as e:
            self.log_error(e)
            return_value = consts['exit_validation']
        except OSError as e:
            self.log_error(e)
            return_value = consts['exit_io']
        self.ellapsed_seconds = time.time() - start_time
        self.print_time(self.ellapsed_seconds)
        return return_value

    @staticmethod
    def seconds_to_hms(seconds):
        '''
        Seconds to hour:minute:seconds

        :ptype seconds: float
        :rtype: str
        '''
        frac, whole = math.modf(seconds)
        hours, rem = divmod(whole, 3600)
        minutes, seconds = divmod(rem, 60)
        return '{:02}:{:02}:{:02}'.format(int(hours), int(minutes), int(seconds))

    def print_time(self, ellapsed_seconds):
        if self.env['show_time'] and not self.env['quiet']:
            with self.print_lock:
                print('time {}'.format(self.seconds_to_hms(ellapsed_seconds)))

    def setup(self, env):
        '''
        Run before timed_main.
        '''
        pass

    def timed_main(self):
        '''
        Main action of the derived class.
        '''
        pass

    def teardown(self) -> Union[None,int]:
        '''
        Run once after timed_main.

        :return: if not None, the return integer gets used as the exit status of the program.
        '''
        pass

TestStatus = enum.Enum('TestStatus', ['PASS', 'FAIL'])

@functools.total_ordering
class TestResult:
    def __init__(
        self,
        test_id: str ='',
        status : TestStatus =TestStatus.PASS,
        ellapsed_seconds : float =0,
        reason : str =''
    ):
        self.test_id = test_id
        self.status = status
        self.ellapsed_seconds = ellapsed_seconds
        self.reason = reason

    def __eq__(self, other):
        return self.test_id == other.test_id

    def __lt__(self, other):
        return self.test_id < other.test_id

    def __str__(self):
        out = [
            self.status.name,
            SortkdCliFunction.seconds_to_hms(self.ellapsed_seconds),
            repr(self.test_id),
        ]
        if self.status is TestStatus.FAIL:
            out.append(repr(self.reason))
        return ' '.join(out)

class TestCliFunction(SortkdCliFunction):
    '''
    Represents a CLI command that runs tests.

    Automates test reporting boilerplate for those commands.
    '''
    def __init__(self, *args, **kwargs):
        defaults = {
            'show_time': False,
        }
        if 'defaults' in kwargs:
            defaults.update(kwargs['defaults'])
        kwargs['defaults'] = defaults
        super().__init__(*args, **kwargs)
        self.add_argument(
            '--quit-on-fail',
            default=False,
            help='Stop submitting tests after the first failure.'
        )
        self.test_results = queue.Queue()

    def handle_output_function(
        self,
        work_function_input,
        work_function_return,
        work_function_exception
    ):
        if work_function_exception is not None:
            return work_function_exception
        if work_function_return.status != TestStatus.PASS and self.env['quit_on_fail']:
            return thread_pool.ThreadPoolExitException()

    def run_test(self, test_function, test_id, *args, **kwargs):
        '''
        Setup, run and teardown a single test callable.

        The test fails if it raises anything. The exception text becomes the reason.
        '''
        self.log_info('Starting: {}'.format(repr(test_id)), flush=True)
        start_time = time.time()
        reason = ''
        try:
            test_function(*args, **kwargs)
            test_status = TestStatus.PASS
        except Exception as e:
            test_status = TestStatus.FAIL
            reason = '{}: {}'.format(type(e).__name__, e)
            if self.env['verbose']:
                with self.print_lock:
                    print(thread_pool.ThreadPool.exception_traceback_string(e), end='')
        test_result = TestResult(
            test_id,
            test_status,
            time.time() - start_time,
            reason
        )
        self.log_info('Result: ' + str(test_result))
        self.test_results.put(test_result)
        return test_result

    def teardown(self):
        '''
        :return: 1 if any test failed, 0 otherwise
        '''
        self.log_info('\nTest result summary:')
        passes = []
        fails = []
        while not self.test_results.empty():
            test = self.test_results.get()
            if test.status in (TestStatus.PASS, None):
                bisect.insort(passes, test)
            else:
                bisect.insort(fails, test)
        for test in itertools.chain(passes, fails):
            self.log_info(test)
        if fails:
            self.log_error('A test failed')
            return consts['exit_validation']
        return consts['exit_success']
