import time

from sortkd import thread_pool

def test(self):
    rng = self.rng(60)
    delays = rng.uniform(0, 0.003, size=40)
    seen = []
    def work(i):
        time.sleep(delays[i])
        return i * 10
    def handle_output(work_function_input, work_function_return, work_function_exception):
        seen.append(work_function_return)
    with thread_pool.ThreadPool(work, handle_output, 5, ordered=True) as pool:
        for i in range(40):
            pool.submit({'i': i})
    assert seen == [i * 10 for i in range(40)]
    assert pool.get_handle_output_result() is None

    unordered = []
    with thread_pool.ThreadPool(work, lambda i, o, e: unordered.append(o), 5) as pool:
        for i in range(40):
            pool.submit({'i': i})
    assert sorted(unordered) == [i * 10 for i in range(40)]

    def fail_at_seven(i):
        if i == 7:
            raise ValueError('seven')
        return i
    with thread_pool.ThreadPool(fail_at_seven, None, 1, submit_raise_exit=True) as pool:
        for i in range(100):
            pool.submit({'i': i})
    work_function_input, work_function_return, exception = pool.get_handle_output_result()
    assert work_function_input == {'i': 7}
    assert isinstance(exception, ValueError)
    assert 'seven' in thread_pool.ThreadPool.exception_traceback_string(exception)

    ids = set()
    def record_thread(thread_id):
        ids.add(thread_id)
    with thread_pool.ThreadPool(record_thread, None, 3, thread_id_arg='thread_id') as pool:
        for i in range(30):
            pool.submit()
    assert ids <= {0, 1, 2}

    def stop(work_function_input, work_function_return, work_function_exception):
        if work_function_return >= 3:
            return thread_pool.ThreadPoolExitException()
    with thread_pool.ThreadPool(lambda i: i, stop, 1, submit_skip_exit=True) as pool:
        for i in range(50):
            pool.submit({'i': i})
    assert pool.get_handle_output_result()[0] == {'i': 3}
