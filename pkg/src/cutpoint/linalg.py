"""Exact rational vectors and matrices.

Everything in this package computes with `fractions.Fraction`: probabilities,
cutpoints, matrix entries.  Fraction already keeps values in lowest terms with
a positive denominator, so equality is canonical and no rounding ever happens.
`Vec` and `Mat` are immutable dense wrappers around tuples of Fractions with
just the operations the automata constructions need: products, Kronecker
products, block assembly, and stochasticity checks.

Dimensions in this project stay small (a few hundred at most), so everything
is dense and written for clarity rather than speed.

JSON convention: a rational is the string "num/den" (always with the
denominator, e.g. "3/8" or "0/1"); a matrix is a row-major list of rows of
such strings.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RatLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x: RatLike) -> Fraction:
    """Coerce an int, Fraction, or "num/den" string to an exact Fraction.

    Floats are deliberately rejected: a float argument is almost always an
    accident that would silently destroy exactness.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_str(x: RatLike) -> str:
    """Serialize a rational as "num/den", or just "num" for integers."""
    q = rat(x)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Vec:
    """An immutable vector of exact rationals.

    Used both as a row vector (starting distributions, via ``v @ m``) and as a
    column vector (output vectors, via ``m @ v`` or ``v.dot``).
    """

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[RatLike]):
        object.__setattr__(self, "entries", tuple(rat(e) for e in entries))
        if not self.entries:
            raise ValueError("vector must have at least one entry")

    def __setattr__(self, name, value):
        raise AttributeError("Vec is immutable")

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vec) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return f"Vec([{', '.join(rat_str(e) for e in self.entries)}])"

    @classmethod
    def zeros(cls, n: int) -> "Vec":
        return cls([ZERO] * n)

    @classmethod
    def ones(cls, n: int) -> "Vec":
        return cls([ONE] * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "Vec":
        if not 0 <= i < n:
            raise ValueError(f"unit index {i} out of range for dimension {n}")
        return cls([ONE if j == i else ZERO for j in range(n)])

    @classmethod
    def concat(cls, *parts: "Vec") -> "Vec":
        return cls([e for p in parts for e in p.entries])

    def dot(self, other: "Vec") -> Fraction:
        if self.dim != other.dim:
            raise ValueError(f"dot of dim {self.dim} with dim {other.dim}")
        return sum((a * b for a, b in zip(self.entries, other.entries)), ZERO)

    def scale(self, c: RatLike) -> "Vec":
        q = rat(c)
        return Vec([q * e for e in self.entries])

    def __add__(self, other: "Vec") -> "Vec":
        if self.dim != other.dim:
            raise ValueError(f"sum of dim {self.dim} with dim {other.dim}")
        return Vec([a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "Vec") -> "Vec":
        return self + other.scale(-1)

    def __matmul__(self, m: "Mat") -> "Vec":
        """Row vector times matrix."""
        if not isinstance(m, Mat):
            return NotImplemented
        if self.dim != m.nrows:
            raise ValueError(f"vec of dim {self.dim} times {m.nrows}x{m.ncols} matrix")
        return Vec(
            [
                sum((self.entries[i] * m.rows[i][j] for i in range(m.nrows)), ZERO)
                for j in range(m.ncols)
            ]
        )

    def kron(self, other: "Vec") -> "Vec":
        return Vec([a * b for a in self.entries for b in other.entries])

    def total(self) -> Fraction:
        return sum(self.entries, ZERO)

    def is_distribution(self) -> bool:
        """Nonnegative entries summing to exactly 1."""
        return all(e >= 0 for e in self.entries) and self.total() == 1

    def in_unit_interval(self) -> bool:
        return all(0 <= e <= 1 for e in self.entries)

    def to_strs(self) -> list[str]:
        return [rat_str(e) for e in self.entries]

    @classmethod
    def from_strs(cls, items: Sequence[RatLike]) -> "Vec":
        return cls(items)


class Mat:
    """An immutable dense matrix of exact rationals."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[RatLike]]):
        frozen = tuple(tuple(rat(e) for e in row) for row in rows)
        if not frozen or not frozen[0]:
            raise ValueError("matrix must have at least one row and one column")
        widths = {len(r) for r in frozen}
        if len(widths) != 1:
            raise ValueError(f"ragged rows: widths {sorted(widths)}")
        object.__setattr__(self, "rows", frozen)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(rat_str(e) for e in row) for row in self.rows)
        return f"Mat[{self.nrows}x{self.ncols}: {body}]"

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int | None = None) -> "Mat":
        ncols = nrows if ncols is None else ncols
        return cls([[ZERO] * ncols for _ in range(nrows)])

    @classmethod
    def constant(cls, nrows: int, ncols: int, value: RatLike) -> "Mat":
        q = rat(value)
        return cls([[q] * ncols for _ in range(nrows)])

    def row(self, i: int) -> Vec:
        return Vec(self.rows[i])

    def col(self, j: int) -> Vec:
        return Vec([r[j] for r in self.rows])

    def transpose(self) -> "Mat":
        return Mat(zip(*self.rows))

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError(f"sum of shapes {self.shape} and {other.shape}")
        return Mat(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ]
        )

    def scale(self, c: RatLike) -> "Mat":
        q = rat(c)
        return Mat([[q * e for e in row] for row in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Vec):
            # Matrix times column vector.
            if self.ncols != other.dim:
                raise ValueError(
                    f"{self.nrows}x{self.ncols} matrix times vec of dim {other.dim}"
                )
            return Vec([Vec(row).dot(other) for row in self.rows])
        if not isinstance(other, Mat):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(
                f"product of {self.nrows}x{self.ncols} and {other.nrows}x{other.ncols}"
            )
        cols = other.transpose().rows
        return Mat(
            [
                [sum((a * b for a, b in zip(row, col)), ZERO) for col in cols]
                for row in self.rows
            ]
        )

    def kron(self, other: "Mat") -> "Mat":
        """Kronecker (tensor) product: (a⊗b)[(i,k),(j,l)] = a[i,j]·b[k,l]."""
        return Mat(
            [
                [a * b for a in arow for b in brow]
                for arow in self.rows
                for brow in other.rows
            ]
        )

    @classmethod
    def block_diag(cls, *blocks: "Mat") -> "Mat":
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        rows = [[ZERO] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.rows):
                rows[r0 + i][c0 : c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls(rows)

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["Mat"]]) -> "Mat":
        """Assemble a matrix from a rectangular grid of blocks.

        Blocks in one grid row must share their row count, blocks in one grid
        column their column count.
        """
        rows: list[list[Fraction]] = []
        ncols = None
        for grow in grid:
            height = grow[0].nrows
            if any(b.nrows != height for b in grow):
                raise ValueError("blocks in a grid row differ in height")
            for i in range(height):
                rows.append([e for b in grow for e in b.rows[i]])
            if ncols is None:
                ncols = len(rows[-1])
            elif len(rows[-1]) != ncols:
                raise ValueError("grid rows differ in total width")
        return cls(rows)

    def row_sums(self) -> Vec:
        return Vec([sum(row, ZERO) for row in self.rows])

    def col_sums(self) -> Vec:
        return Vec([sum((r[j] for r in self.rows), ZERO) for j in range(self.ncols)])

    def is_nonnegative(self) -> bool:
        return all(e >= 0 for row in self.rows for e in row)

    def is_positive(self) -> bool:
        return all(e > 0 for row in self.rows for e in row)

    def is_row_stochastic(self) -> bool:
        return self.is_nonnegative() and all(s == 1 for s in self.row_sums())

    def is_multiple_of(self, unit: RatLike) -> bool:
        """Every entry an integer multiple of `unit` (e.g. Fraction(1, 2**22))."""
        q = rat(unit)
        return all((e / q).denominator == 1 for row in self.rows for e in row)

    def to_strs(self) -> list[list[str]]:
        return [[rat_str(e) for e in row] for row in self.rows]

    @classmethod
    def from_strs(cls, rows: Sequence[Sequence[RatLike]]) -> "Mat":
        return cls(rows)


def chain(mats: Iterable[Mat], dim: int | None = None) -> Mat:
    """Product of a sequence of matrices; the empty product is the identity.

    `dim` is required when the sequence may be empty.
    """
    result: Mat | None = None
    for m in mats:
        result = m if result is None else result @ m
    if result is None:
        if dim is None:
            raise ValueError("empty product needs an explicit dimension")
        return Mat.identity(dim)
    return result
