"""Reflected n-ary code folding [0, n^d) onto the cube [0, n)^d."""

from collections.abc import Callable


def gray_fold(
    n: int, d: int
) -> tuple[Callable[[int], tuple[int, ...]], Callable[[tuple[int, ...]], int]]:
    """
    (index_to_coord, coord_to_index). Coordinate i is read as digit a_i of the
    index, reflected to n - 1 - a_i when the coordinates above i sum to an
    odd number, so consecutive indices are unit steps apart.
    """
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be positive, got n={n} d={d}")
    size = n**d

    def coord_to_index(coord: tuple[int, ...]) -> int:
        if len(coord) != d or any(not 0 <= c < n for c in coord):
            raise ValueError(f"{coord} is not a point of [0, {n})^{d}")
        index = 0
        above = 0
        for i in reversed(range(d)):
            digit = coord[i] if above % 2 == 0 else n - 1 - coord[i]
            index += digit * n**i
            above += coord[i]
        return index

    def index_to_coord(index: int) -> tuple[int, ...]:
        if not 0 <= index < size:
            raise ValueError(f"index {index} outside [0, {size})")
        digits = [(index // n**i) % n for i in range(d)]
        coord = [0] * d
        above = 0
        for i in reversed(range(d)):
            coord[i] = digits[i] if above % 2 == 0 else n - 1 - digits[i]
            above += coord[i]
        return tuple(coord)

    return index_to_coord, coord_to_index
