"""
Tests for the reflected n-ary fold
"""

import pytest

from sftperiods.constructions.gray import gray_fold


@pytest.mark.parametrize("n,d", [(2, 1), (2, 3), (3, 2), (4, 2), (3, 3)])
def test_unit_steps_and_bijection(n, d):
    """Test that consecutive indices are unit steps and the fold is invertible"""
    to_coord, to_index = gray_fold(n, d)
    coords = [to_coord(i) for i in range(n**d)]
    assert len(set(coords)) == n**d
    assert all(to_index(c) == i for i, c in enumerate(coords))
    for a, b in zip(coords, coords[1:], strict=False):
        assert sum(abs(x - y) for x, y in zip(a, b, strict=True)) == 1


def test_small_table():
    to_coord, _ = gray_fold(3, 2)
    assert [to_coord(i) for i in range(6)] == [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)]


def test_rejects():
    with pytest.raises(ValueError):
        gray_fold(0, 2)
    to_coord, to_index = gray_fold(2, 2)
    with pytest.raises(ValueError):
        to_coord(4)
    with pytest.raises(ValueError):
        to_index((2, 0))
