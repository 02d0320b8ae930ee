import time

import pytest

from hdiscord.utils.worker_pool import map_ordered


def _slow_square(x):
    # Later items finish first so completion order differs from input order
    time.sleep(0.01 * (5 - x))
    if x == 3:
        raise ValueError("three")
    return x * x


@pytest.mark.parametrize("workers", [1, 4])
def test_results_keep_input_order(workers):
    outcomes = map_ordered(_slow_square, list(range(5)), workers=workers)
    assert [value for value, _ in outcomes] == [0, 1, 4, None, 16]
    errors = [error for _, error in outcomes]
    assert isinstance(errors[3], ValueError)
    assert errors[:3] == [None, None, None]


def test_empty_input():
    assert map_ordered(_slow_square, [], workers=4) == []
