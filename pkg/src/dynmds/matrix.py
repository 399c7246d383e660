"""Dense matrices over GF(2^q).

:class:`Matrix` is an immutable value; every operation returns a fresh
matrix.  Shapes are capped at :data:`MAX_DIM` because MDS verification
enumerates all sum_k C(n, k)^2 square minors:

    n     minors
    4         69
    6        923
    8     12,869
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import (
    IndexOutOfRange,
    InvalidElement,
    NotSquare,
    ShapeMismatch,
    Singular,
)
from .gfield import DEFAULT_FIELD, FieldSpec, gf_add, gf_inv, gf_mul, inv_table, mul_table, parse_field

MAX_DIM = 8


@dataclass(frozen=True)
class Matrix:
    spec: FieldSpec
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= self.rows <= MAX_DIM and 1 <= self.cols <= MAX_DIM):
            raise ShapeMismatch(f"shape {self.rows}x{self.cols} outside 1..{MAX_DIM}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatch(f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")
        object.__setattr__(self, "entries", tuple(self.spec.check(x) for x in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], spec: FieldSpec = DEFAULT_FIELD) -> Matrix:
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeMismatch("rows must be nonempty and of equal length")
        return cls(spec, len(rows), len(rows[0]), tuple(x for r in rows for x in r))

    @classmethod
    def from_array(cls, arr, spec: FieldSpec = DEFAULT_FIELD) -> Matrix:
        arr = np.asarray(arr)
        return cls.from_rows(arr.tolist(), spec)

    @classmethod
    def identity(cls, n: int, spec: FieldSpec = DEFAULT_FIELD) -> Matrix:
        return cls(spec, n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexOutOfRange(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.uint8).reshape(self.rows, self.cols)

    def __str__(self):
        return format_matrix(self)


@dataclass(frozen=True)
class MinorIndex:
    row_set: tuple[int, ...]
    col_set: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_set", tuple(self.row_set))
        object.__setattr__(self, "col_set", tuple(self.col_set))
        if not self.row_set or len(self.row_set) != len(self.col_set):
            raise IndexOutOfRange("row and column sets must be nonempty and of equal size")
        for s in (self.row_set, self.col_set):
            if any(b <= a for a, b in zip(s, s[1:])) or s[0] < 0:
                raise IndexOutOfRange(f"index set {s} is not strictly increasing and nonnegative")

    @property
    def size(self) -> int:
        return len(self.row_set)


def iter_minors(rows: int, cols: int) -> Iterator[MinorIndex]:
    """All square minor indices, by size, then row set, then column set."""
    for k in range(1, min(rows, cols) + 1):
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                yield MinorIndex(rs, cs)


def count_minors(rows: int, cols: int) -> int:
    return sum(comb(rows, k) * comb(cols, k) for k in range(1, min(rows, cols) + 1))


def _same_field(a: Matrix, b: Matrix):
    if a.spec != b.spec:
        raise ShapeMismatch(f"field mismatch: {a.spec} vs {b.spec}")


def mat_scalar_mul(a: Matrix, e: int) -> Matrix:
    row = mul_table(a.spec)[a.spec.check(e)]
    return Matrix(a.spec, a.rows, a.cols, tuple(int(row[x]) for x in a.entries))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise ShapeMismatch(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    mul = mul_table(a.spec)
    prod = mul[a.to_array()[:, :, None], b.to_array()[None, :, :]]
    out = np.bitwise_xor.reduce(prod, axis=1)
    return Matrix(a.spec, a.rows, b.cols, tuple(int(x) for x in out.ravel()))


def mat_vec_mul(a: Matrix, v: Sequence[int]) -> list[int]:
    if len(v) != a.cols:
        raise ShapeMismatch(f"vector of length {len(v)} for a matrix with {a.cols} columns")
    out = []
    for i in range(a.rows):
        acc = 0
        for aij, vj in zip(a.row(i), v):
            acc ^= gf_mul(a.spec, aij, vj)
        out.append(acc)
    return out


def det_cofactor(a: Matrix) -> int:
    """Laplace expansion along the first row.  Exponential; an oracle only."""
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix has no determinant")
    spec = a.spec

    def rec(rows: list[tuple[int, ...]]) -> int:
        if len(rows) == 1:
            return rows[0][0]
        acc = 0
        for j, x in enumerate(rows[0]):
            if x:
                minor = [r[:j] + r[j + 1:] for r in rows[1:]]
                # signs vanish in characteristic 2
                acc ^= gf_mul(spec, x, rec(minor))
        return acc

    return rec([a.row(i) for i in range(a.rows)])


def det_gauss(a: Matrix) -> int:
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix has no determinant")
    out = _kernels.det_batch(a.to_array()[None], mul_table(a.spec), inv_table(a.spec))
    return int(out[0])


def determinant(a: Matrix, method: str = "gauss") -> int:
    if method == "gauss":
        return det_gauss(a)
    if method == "cofactor":
        return det_cofactor(a)
    raise ValueError(f"unknown determinant method {method!r}")


def submatrix(a: Matrix, idx: MinorIndex) -> Matrix:
    if idx.row_set[-1] >= a.rows or idx.col_set[-1] >= a.cols:
        raise IndexOutOfRange(f"{idx} out of range for {a.rows}x{a.cols}")
    return Matrix(a.spec, idx.size, idx.size, tuple(a[i, j] for i in idx.row_set for j in idx.col_set))


def mat_inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan on [A | I]; pivot is the first nonzero entry in the column."""
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix has no inverse")
    n, spec = a.rows, a.spec
    aug = [list(a.row(i)) + [int(i == j) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise Singular("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        s = gf_inv(spec, aug[col][col])
        aug[col] = [gf_mul(spec, s, x) for x in aug[col]]
        for r in range(n):
            f = aug[r][col]
            if r != col and f:
                aug[r] = [gf_add(spec, x, gf_mul(spec, f, y)) for x, y in zip(aug[r], aug[col])]
    return Matrix.from_rows([row[n:] for row in aug], spec)


def circulant(spec: FieldSpec, first_row: Sequence[int]) -> Matrix:
    """Row i is ``first_row`` rotated right by i positions."""
    n = len(first_row)
    if n == 0:
        raise ShapeMismatch("circulant needs a nonempty first row")
    return Matrix.from_rows([[first_row[(j - i) % n] for j in range(n)] for i in range(n)], spec)


def is_circulant(a: Matrix) -> bool:
    first = a.row(0)
    n = a.cols
    return a.is_square and all(a.row(i) == tuple(first[(j - i) % n] for j in range(n)) for i in range(a.rows))


# -- text format ----------------------------------------------------------

def format_matrix(a: Matrix) -> str:
    lines = [str(a.spec)]
    lines += [" ".join(f"{x:02X}" for x in a.row(i)) for i in range(a.rows)]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> Matrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ShapeMismatch("empty matrix text")
    spec = parse_field(lines[0])
    try:
        rows = [[int(tok, 16) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InvalidElement(str(exc)) from None
    return Matrix.from_rows(rows, spec)


def load_matrix(path: str | Path) -> Matrix:
    return parse_matrix(Path(path).read_text())


def save_matrix(a: Matrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(a))
