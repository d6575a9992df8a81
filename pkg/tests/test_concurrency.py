import time

import pytest

from utils.concurrency import ThreadPool


def slow_echo(value, delay):
    time.sleep(delay)
    return value


def test_results_keep_submission_order():
    tasks = [(slow_echo, [i, 0.02 * (3 - i)], {}) for i in range(4)]
    seen = []
    with ThreadPool(4) as pool:
        results = pool.execute(tasks, progress_callback=seen.append)
    assert results == [0, 1, 2, 3]
    assert sorted(seen) == [0, 1, 2, 3]


def test_task_failure_is_raised():
    def boom():
        raise RuntimeError("task failed")

    with ThreadPool(2) as pool:
        with pytest.raises(RuntimeError, match="task failed"):
            pool.execute([(slow_echo, [1, 0], {}), (boom, [], {})])


def test_at_least_one_worker():
    with ThreadPool(0) as pool:
        assert pool.max_workers >= 1
