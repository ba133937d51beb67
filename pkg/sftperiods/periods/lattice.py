"""
Period lattices.

A subgroup of Z^d is stored as the rows of its Hermite normal form: an echelon
basis whose pivots are positive, and whose entries above each pivot are reduced
into [0, pivot). Two generating sets give the same group exactly when their
forms are equal. Read with the vectors as columns, this is the column
style form: lower triangular with a positive diagonal.
"""

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from sftperiods.errors import DimensionMismatchError
from sftperiods.sft.kernels import fixing_translations
from sftperiods.sft.model import TorusConfig, Vec


def hermite_rows(vectors: Iterable[Sequence[int]], dim: int) -> tuple[Vec, ...]:
    rows = [list(v) for v in vectors if any(v)]
    for v in rows:
        if len(v) != dim:
            raise DimensionMismatchError(f"vector {v} is not {dim}-dimensional")
    basis: list[list[int]] = []
    pivots: list[int] = []
    for col in range(dim):
        while True:
            active = sorted((r for r in rows if r[col] != 0), key=lambda r: abs(r[col]))
            if len(active) <= 1:
                break
            head = active[0]
            for r in active[1:]:
                q = r[col] // head[col]
                for k in range(dim):
                    r[k] -= q * head[k]
            rows = [r for r in rows if any(r)]
        active = [r for r in rows if r[col] != 0]
        if not active:
            continue
        head = active[0]
        rows = [r for r in rows if r is not head]
        if head[col] < 0:
            head = [-x for x in head]
        basis.append(head)
        pivots.append(col)
    for i, col in enumerate(pivots):
        p = basis[i][col]
        for j in range(i):
            q = basis[j][col] // p
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i], strict=True)]
    return tuple(tuple(r) for r in basis)


def _pivot(row: Vec) -> int:
    return next(i for i, x in enumerate(row) if x != 0)


@dataclass(frozen=True)
class PeriodGroup:
    dim: int
    basis: tuple[Vec, ...]

    @classmethod
    def generated_by(cls, vectors: Iterable[Sequence[int]], dim: int) -> "PeriodGroup":
        return cls(dim, hermite_rows(vectors, dim))

    @classmethod
    def scaled(cls, p: int, dim: int) -> "PeriodGroup":
        """p Z^d."""
        return cls.torus((p,) * dim)

    @classmethod
    def torus(cls, dims: Sequence[int]) -> "PeriodGroup":
        dim = len(dims)
        return cls.generated_by(
            [tuple(n if i == j else 0 for j in range(dim)) for i, n in enumerate(dims)], dim
        )

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.dim

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(row[_pivot(row)] for row in self.basis)

    @property
    def index(self) -> int | None:
        """|Z^d / L|, or None for groups of lower rank."""
        return math.prod(self.pivots) if self.is_full_rank else None

    def contains(self, vec: Sequence[int]) -> bool:
        v = list(vec)
        if len(v) != self.dim:
            raise DimensionMismatchError(f"vector {vec} is not {self.dim}-dimensional")
        for row in self.basis:
            col = _pivot(row)
            if v[col] % row[col]:
                return False
            q = v[col] // row[col]
            v = [a - q * b for a, b in zip(v, row, strict=True)]
        return not any(v)

    def is_subgroup_of(self, other: "PeriodGroup") -> bool:
        return all(other.contains(row) for row in self.basis)

    def reduce(self, vec: Sequence[int]) -> Vec:
        """Canonical representative of vec modulo a full-rank group, in the pivot box."""
        if not self.is_full_rank:
            raise ValueError("reduction needs a full-rank lattice")
        v = list(vec)
        for i, row in enumerate(self.basis):
            q = v[i] // row[i]
            if q:
                v = [a - q * b for a, b in zip(v, row, strict=True)]
        return tuple(v)

    def box(self) -> Iterator[Vec]:
        """Fundamental domain representatives in lexicographic order."""
        return itertools.product(*(range(p) for p in self.pivots))

    def torus_dims(self) -> tuple[int, ...]:
        """Least n_i with n_i e_i in the group; the lattice tiles that torus."""
        if not self.is_full_rank:
            raise ValueError("torus dimensions need a full-rank lattice")
        dims = []
        for i in range(self.dim):
            k = 1
            while not self.contains(tuple(k if j == i else 0 for j in range(self.dim))):
                k += 1
            dims.append(k)
        return tuple(dims)

    def __str__(self) -> str:
        return "<" + ", ".join("(" + ",".join(str(x) for x in row) + ")" for row in self.basis) + ">"


def stabilizer(config: TorusConfig) -> PeriodGroup:
    """All translations fixing the periodic extension of `config`, torus lattice included."""
    dims = np.asarray(config.dims, dtype=np.int64)
    fixed = fixing_translations(config.cells.ravel(), dims)
    shifts = [tuple(int(c) for c in np.unravel_index(int(t), config.dims)) for t in np.flatnonzero(fixed)]
    torus = PeriodGroup.torus(config.dims)
    return PeriodGroup.generated_by(list(shifts) + list(torus.basis), config.dim)


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def prime_factors(n: int) -> list[int]:
    factors = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            factors.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        factors.append(n)
    return factors


def superlattices_of_scaled(p: int, dim: int) -> list[PeriodGroup]:
    """Every lattice containing p Z^d, ordered by index then basis."""
    scaled = PeriodGroup.scaled(p, dim)
    found = []
    for pivots in itertools.product(divisors(p), repeat=dim):
        slots = [(i, j) for i in range(dim) for j in range(i + 1, dim)]
        for values in itertools.product(*(range(pivots[j]) for _, j in slots)):
            rows = [[pivots[i] if i == j else 0 for j in range(dim)] for i in range(dim)]
            for (i, j), value in zip(slots, values, strict=True):
                rows[i][j] = value
            group = PeriodGroup(dim, tuple(tuple(r) for r in rows))
            if scaled.is_subgroup_of(group):
                found.append(group)
    found.sort(key=lambda g: (g.index, g.basis))
    return found
