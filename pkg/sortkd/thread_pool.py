#!/usr/bin/env python3

'''
Bounded thread pool used to fan out verification cases, experiment cells,
record transforms and test cases.
'''

from typing import Any, Callable, Dict, Union
import os
import queue
import threading
import traceback

class ThreadPoolExitException(Exception):
    '''
    May be returned or raised by handle_output to request early termination.

    Also raised by submit() if submit_raise_exit=True.
    '''
    pass

class ThreadPool:
    '''
    Start a pool of a limited number of threads to do some work.

    * the work function takes keyword arguments and does not need to know about the pool
    * at most nthreads inputs wait in the queue, so producers block instead of
      materializing all work at once
    * the first failure is remembered, and later submits can bail out on it
    * with ordered=True, handle_output sees results in submission order,
      through a reorder buffer bounded by the number of items in flight

    Typical usage:

    ....
    with ThreadPool(work, handle_output, nthreads, submit_raise_exit=True) as pool:
        for work_input in inputs:
            pool.submit(work_input)
    error = pool.get_handle_output_result()
    ....
    '''
    def __init__(
        self,
        work_function: Callable,
        handle_output: Union[Callable[[Any,Any,Exception],Any],None] = None,
        nthreads: Union[int,None] = None,
        thread_id_arg: Union[str,None] = None,
        submit_raise_exit: bool = False,
        submit_skip_exit: bool = False,
        ordered: bool = False,
    ):
        '''
        Start the threads immediately. join() must be called afterwards at some point.

        :param work_function: called as work_function(**work_function_input).
        :param handle_output: called as

            ....
            handle_output(
                work_function_input: Dict,
                work_function_return,
                work_function_exception: Union[Exception,None]
            ) -> Union[Exception,None]
            ....

            Return None to continue, ThreadPoolExitException() to request a stop,
            or the exception to report a failure. The first non-None return is kept
            and returned by submit(), get_handle_output_result() and join().

            Default: return the work function exception, if any.
        :param nthreads: number of threads to use. Default: nproc.
        :param thread_id_arg: if not None, pass a 0-indexed thread ID to the work function
            under this keyword.
        :param submit_raise_exit: submit() raises ThreadPoolExitException after a failure.
        :param submit_skip_exit: submit() does nothing after a failure.
        :param ordered: call handle_output in submission order.
        '''
        self.work_function = work_function
        if handle_output is None:
            handle_output = lambda input, output, exception: exception
        self.handle_output = handle_output
        if nthreads is None:
            nthreads = len(os.sched_getaffinity(0))
        self.nthreads = max(1, int(nthreads))
        self.thread_id_arg = thread_id_arg
        self.submit_raise_exit = submit_raise_exit
        self.submit_skip_exit = submit_skip_exit
        self.ordered = ordered
        self.handle_output_result = None
        self.handle_output_result_lock = threading.Lock()
        self._output_lock = threading.Lock()
        self._reorder_buffer = {}
        self._next_output_seq = 0
        self._submit_seq = 0
        # Submitted but not yet handed to handle_output, bounds the reorder buffer.
        self._in_flight = threading.BoundedSemaphore(2 * self.nthreads)
        self.in_queue = queue.Queue(maxsize=self.nthreads)
        self.threads = []
        for i in range(self.nthreads):
            thread = threading.Thread(
                target=self._func_runner,
                args=(i,)
            )
            self.threads.append(thread)
            thread.start()

    def __enter__(self):
        '''
        __exit__ calls join(). Errors may still happen after the last submit,
        so check get_handle_output_result() after the with.
        '''
        return self

    def __exit__(self, exception_type, exception_value, exception_traceback):
        self.join()
        return exception_type is ThreadPoolExitException

    def _call_handle_output(self, work_function_input, work_function_return, work_function_exception):
        handle_output_return = None
        try:
            handle_output_return = self.handle_output(
                work_function_input,
                work_function_return,
                work_function_exception
            )
        except Exception as e:
            handle_output_return = e
        if handle_output_return is not None:
            with self.handle_output_result_lock:
                if self.handle_output_result is None:
                    self.handle_output_result = (
                        work_function_input,
                        work_function_return,
                        handle_output_return
                    )

    def _func_runner(self, thread_id):
        while True:
            item = self.in_queue.get(block=True)
            if item is None:
                self.in_queue.task_done()
                break
            seq, work_function_input = item
            if self.thread_id_arg is not None:
                work_function_input[self.thread_id_arg] = thread_id
            try:
                work_function_exception = None
                work_function_return = self.work_function(**work_function_input)
            except Exception as e:
                work_function_exception = e
                work_function_return = None
            result = (work_function_input, work_function_return, work_function_exception)
            with self._output_lock:
                if self.ordered:
                    self._reorder_buffer[seq] = result
                    while self._next_output_seq in self._reorder_buffer:
                        self._call_handle_output(*self._reorder_buffer.pop(self._next_output_seq))
                        self._next_output_seq += 1
                        self._in_flight.release()
                else:
                    self._call_handle_output(*result)
            self.in_queue.task_done()

    @staticmethod
    def exception_traceback_string(exception):
        return ''.join(traceback.format_exception(
            None, exception, exception.__traceback__)
        )

    def get_handle_output_result(self):
        '''
        :return: (work_function_input, work_function_return, handle_output_return)
            of the first non-None handle_output return, or None.
        '''
        return self.handle_output_result

    def join(self):
        '''
        Stop all threads after they finish the submitted work.

        :return: same as get_handle_output_result()
        '''
        for thread in range(self.nthreads):
            self.in_queue.put(None)
        for thread in self.threads:
            thread.join()
        return self.get_handle_output_result()

    def submit(
        self,
        work_function_input: Union[Dict,None] = None
    ):
        '''
        Submit work. Block if there is already enough work scheduled (~nthreads).

        :return: the same as get_handle_output_result
        '''
        handle_output_result = self.get_handle_output_result()
        if handle_output_result is not None:
            if self.submit_raise_exit:
                raise ThreadPoolExitException()
            if self.submit_skip_exit:
                return handle_output_result
        if work_function_input is None:
            work_function_input = {}
        if self.ordered:
            self._in_flight.acquire()
        self.in_queue.put((self._submit_seq, work_function_input))
        self._submit_seq += 1
        return handle_output_result

if __name__ == '__main__':
    # Ordered output survives out of order completion.
    import time
    seen = []
    def work(i):
        time.sleep((7 - i % 7) / 1000.0)
        return i * i
    def collect(input, output, exception):
        seen.append(output)
        return exception
    with ThreadPool(work, collect, 4, ordered=True) as pool:
        for i in range(30):
            pool.submit({'i': i})
    assert seen == [i * i for i in range(30)], seen

    # The first failure is reported and later submits raise.
    def divide(i):
        return 10.0 / i
    with ThreadPool(divide, None, 2, submit_raise_exit=True) as pool:
        for i in range(-3, 50):
            pool.submit({'i': i})
    work_function_input, work_function_return, exception = pool.get_handle_output_result()
    assert work_function_input == {'i': 0}
    assert type(exception) is ZeroDivisionError
