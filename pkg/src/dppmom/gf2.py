"""Dense linear algebra over GF(2).

Rows are packed into Python integers (bit ``j`` is column ``j``), so a row
operation is a single big-integer XOR running word-at-a-time in C.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError

__all__ = ["Gf2Vector", "Gf2Matrix", "EchelonBasis", "rank_increment", "rank", "solve"]


def _pack(bits: Iterable[int]) -> tuple[int, int]:
    word, length = 0, 0
    for j, b in enumerate(bits):
        if int(b) & 1:
            word |= 1 << j
        length = j + 1
    return word, length


@dataclass(frozen=True)
class Gf2Vector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise InputError("negative vector length")
        if self.bits < 0 or self.bits >> self.length:
            raise InputError("bits set beyond the declared length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "Gf2Vector":
        word, _ = _pack(values)
        return cls(len(values), word)

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "Gf2Vector":
        word = 0
        for j in support:
            word ^= 1 << j
        return cls(length, word)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def support(self) -> list[int]:
        return [j for j in range(self.length) if (self.bits >> j) & 1]

    def weight(self) -> int:
        return bin(self.bits).count("1")

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if other.length != self.length:
            raise InputError("length mismatch")
        return Gf2Vector(self.length, self.bits ^ other.bits)

    __add__ = __xor__

    def dot(self, other: "Gf2Vector") -> int:
        return bin(self.bits & other.bits).count("1") & 1

    def __str__(self):
        return "".join(str(b) for b in self.to_list())


@dataclass(frozen=True)
class Gf2Matrix:
    ncols: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise InputError("row has bits beyond ncols")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        packed = []
        for r in rows:
            if len(r) != ncols:
                raise InputError("ragged rows")
            packed.append(_pack(r)[0])
        return cls(ncols, tuple(packed))

    @classmethod
    def from_vectors(cls, vectors: Sequence[Gf2Vector], ncols: int) -> "Gf2Matrix":
        if any(v.length != ncols for v in vectors):
            raise InputError("vector length does not match ncols")
        return cls(ncols, tuple(v.bits for v in vectors))

    def row(self, i: int) -> Gf2Vector:
        return Gf2Vector(self.ncols, self.rows[i])

    def column_is_zero(self, j: int) -> bool:
        return not any((r >> j) & 1 for r in self.rows)

    def matvec(self, x: Gf2Vector) -> Gf2Vector:
        if x.length != self.ncols:
            raise InputError("dimension mismatch in matvec")
        out = 0
        for i, r in enumerate(self.rows):
            if bin(r & x.bits).count("1") & 1:
                out |= 1 << i
        return Gf2Vector(self.nrows, out)

    def to_lists(self) -> list[list[int]]:
        return [self.row(i).to_list() for i in range(self.nrows)]


class EchelonBasis:
    """Row-echelon accumulator, kept in reduced form.

    Each stored row owns a pivot column (its lowest set bit) that is clear in
    every other stored row.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: dict[int, int] = {}  # pivot column -> row

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, word: int) -> int:
        """Residual of ``word`` after elimination against the stored rows."""
        for pivot, row in self._rows.items():
            if (word >> pivot) & 1:
                word ^= row
        return word

    def add(self, v: Gf2Vector) -> bool:
        if v.length != self.ncols:
            raise InputError(f"vector length {v.length} != accumulator width {self.ncols}")
        word = self.reduce(v.bits)
        if not word:
            return False
        pivot = (word & -word).bit_length() - 1
        for p, row in self._rows.items():
            if (row >> pivot) & 1:
                self._rows[p] = row ^ word
        self._rows[pivot] = word
        return True

    def contains(self, v: Gf2Vector) -> bool:
        return self.reduce(v.bits) == 0

    def rows(self) -> list[Gf2Vector]:
        return [Gf2Vector(self.ncols, self._rows[p]) for p in sorted(self._rows)]


def rank_increment(basis: EchelonBasis, v: Gf2Vector) -> bool:
    """Absorb ``v`` into ``basis`` if it is independent; report whether it was."""
    return basis.add(v)


def _eliminate(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Gauss-Jordan on packed rows in place; returns (rows, pivot columns)."""
    pivots = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        hit = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(A: Gf2Matrix) -> int:
    return len(_eliminate(list(A.rows), A.ncols)[1])


def solve(A: Gf2Matrix, b: Gf2Vector) -> Gf2Vector | None:
    """A solution of ``A x = b`` with every free variable set to 0, or ``None``.

    ``None`` signals an inconsistent system.
    """
    if b.length != A.nrows:
        raise InputError(f"rhs length {b.length} != number of rows {A.nrows}")
    n = A.ncols
    aug = [row | (((b.bits >> i) & 1) << n) for i, row in enumerate(A.rows)]
    aug, pivots = _eliminate(aug, n)
    mask = (1 << n) - 1
    for row in aug[len(pivots):]:
        if not row & mask and row >> n:
            return None
    x = 0
    for row, col in zip(aug, pivots):
        if row >> n:
            x |= 1 << col
    return Gf2Vector(n, x)
