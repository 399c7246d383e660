"""MDS verification, dynamic-matrix derivation, metrics and classification.

A square matrix is MDS when every square submatrix is nonsingular.  Scaling
an MDS matrix by a nonzero constant e keeps it MDS, because each k x k
minor picks up the factor e^k; that is the whole basis of the session
matrices derived here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import BadPivot, NoInstance, NotMds, NotSquare, ZeroConstant
from .gfield import DEFAULT_FIELD, FieldSpec, MulTables, build_tables, gf_inv, inv_table, mul_table
from .matrix import (
    Matrix,
    MinorIndex,
    count_minors,
    det_cofactor,
    is_circulant,
    iter_minors,
    mat_scalar_mul,
    submatrix,
)

# classification thresholds, calibrated on the 4x4 optimal pattern
OPTIMAL_MIN_ONES = 9
OPTIMAL_MAX_CONSTANTS = 2

# largest vector space the brute-force branch number will enumerate
BRANCH_MAX_VECTORS = 1 << 20


@dataclass(frozen=True)
class MdsReport:
    is_mds: bool
    witness: MinorIndex | None
    minors_checked: int

    def __post_init__(self):
        assert self.is_mds == (self.witness is None)

    def to_dict(self) -> dict:
        return {
            "is_mds": self.is_mds,
            "witness_rows": list(self.witness.row_set) if self.witness else None,
            "witness_cols": list(self.witness.col_set) if self.witness else None,
            "minors_checked": self.minors_checked,
        }


class MatrixClass(str, enum.Enum):
    OPTIMAL = "Optimal"
    CIRCULANT = "Circulant"
    NON_CIRCULANT = "NonCirculant"
    NON_OPTIMAL = "NonOptimal"
    WORST_CASE = "WorstCase"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MatrixMetrics:
    ones_count: int
    distinct_nonone_constants: int
    biregular: bool

    def to_dict(self) -> dict:
        return {
            "ones_count": self.ones_count,
            "distinct_constants": self.distinct_nonone_constants,
            "biregular": self.biregular,
        }


# -- verification ---------------------------------------------------------

@lru_cache(maxsize=None)
def _minor_gather(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    combos = np.array(list(combinations(range(n), k)), dtype=np.intp)
    c = len(combos)
    rows = np.repeat(combos, c, axis=0)  # row set varies slowest
    cols = np.tile(combos, (c, 1))
    return rows, cols


def minor_stack(arr: np.ndarray, k: int) -> np.ndarray:
    """All k x k minors of a stack ``(N, n, n)`` as ``(N, C(n,k)^2, k, k)``.

    Minors come in :func:`iter_minors` order within each size.
    """
    rows, cols = _minor_gather(arr.shape[-1], k)
    return arr[:, rows[:, :, None], cols[:, None, :]]


def is_mds_stack(arr, spec: FieldSpec = DEFAULT_FIELD) -> np.ndarray:
    """Vectorised verdicts for a stack ``(N, n, n)`` of square matrices."""
    arr = np.asarray(arr, dtype=np.uint8)
    mul, inv = mul_table(spec), inv_table(spec)
    ok = np.ones(arr.shape[0], dtype=bool)
    for k in range(1, arr.shape[-1] + 1):
        subs = minor_stack(arr[ok], k)
        dets = _kernels.det_batch(subs.reshape(-1, k, k), mul, inv).reshape(subs.shape[:2])
        ok[np.flatnonzero(ok)] = (dets != 0).all(axis=1)
        if not ok.any():
            break
    return ok


def _is_mds_fast(a: Matrix) -> MdsReport:
    arr = a.to_array()[None]
    mul, inv = mul_table(a.spec), inv_table(a.spec)
    checked = 0
    for k in range(1, a.rows + 1):
        subs = minor_stack(arr, k)[0]
        dets = _kernels.det_batch(subs, mul, inv)
        bad = np.flatnonzero(dets == 0)
        if bad.size:
            rows, cols = _minor_gather(a.rows, k)
            i = int(bad[0])
            witness = MinorIndex(tuple(int(x) for x in rows[i]), tuple(int(x) for x in cols[i]))
            return MdsReport(False, witness, checked + i + 1)
        checked += len(dets)
    return MdsReport(True, None, checked)


def _is_mds_full(a: Matrix) -> MdsReport:
    witness = None
    checked = 0
    for idx in iter_minors(a.rows, a.cols):
        checked += 1
        if witness is None and det_cofactor(submatrix(a, idx)) == 0:
            witness = idx
    return MdsReport(witness is None, witness, checked)


def is_mds(a: Matrix, method: str = "fast") -> MdsReport:
    """Check every square minor.

    ``method="fast"`` runs batched elimination per minor size and stops at
    the first singular minor; ``method="full"`` walks all minors with
    cofactor expansion.  Both report the same verdict and witness (the
    first singular minor in :func:`iter_minors` order).
    """
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix")
    if method == "fast":
        return _is_mds_fast(a)
    if method == "full":
        return _is_mds_full(a)
    raise ValueError(f"unknown method {method!r}")


# -- derivation -----------------------------------------------------------

def scale_mds(a: Matrix, e: int, check: bool = True) -> Matrix:
    """``e * A`` for an MDS ``A`` and nonzero ``e``.

    With ``check`` the input is verified first and the output re-verified;
    release callers that already trust their seed pass ``check=False``.
    """
    if a.spec.check(e) == 0:
        raise ZeroConstant("scaling constant must be nonzero")
    if check and not is_mds(a).is_mds:
        raise NotMds("seed matrix is not MDS")
    out = mat_scalar_mul(a, e)
    if check:
        assert is_mds(out).is_mds, "scalar multiple of an MDS matrix failed verification"
    return out


def normalize_by_pivot(a: Matrix, pivot: int, check: bool = True) -> Matrix:
    """Multiply by ``pivot^-1`` so every occurrence of ``pivot`` becomes 1."""
    pivot = a.spec.check(pivot)
    if pivot in (0, 1) or pivot not in a.entries:
        raise BadPivot(f"pivot {pivot:#04x} must be a constant other than 0 and 1 that occurs in the matrix")
    return scale_mds(a, gf_inv(a.spec, pivot), check=check)


def derive_session_tables(seed: Matrix, e: int, check: bool = True) -> tuple[Matrix, MulTables]:
    """Session matrix plus product rows for its distinct entries.

    Each distinct non-one entry of the seed is multiplied by ``e`` once and
    reused at every repeat; entries equal to 1 map to ``e`` with no product.
    """
    spec = seed.spec
    if spec.check(e) == 0:
        raise ZeroConstant("session constant must be nonzero")
    if check and not is_mds(seed).is_mds:
        raise NotMds("seed matrix is not MDS")
    products = {1: e}
    scaled = []
    for x in seed.entries:
        if x not in products:
            products[x] = int(mul_table(spec)[e, x])
        scaled.append(products[x])
    out = Matrix(spec, seed.rows, seed.cols, tuple(scaled))
    if check:
        assert is_mds(out).is_mds, "derived session matrix failed verification"
    return out, build_tables(spec, sorted(set(out.entries)))


def derive_session_matrix(seed: Matrix, e: int, check: bool = True) -> Matrix:
    return derive_session_tables(seed, e, check)[0]


# -- metrics and classes --------------------------------------------------

def is_biregular(a: Matrix) -> bool:
    """Every 2x2 submatrix has a row with two distinct entries and a column
    with two distinct entries."""
    for (i, k), (j, l) in product(combinations(range(a.rows), 2), combinations(range(a.cols), 2)):
        w, x, y, z = a[i, j], a[i, l], a[k, j], a[k, l]
        if not ((w != x or y != z) and (w != y or x != z)):
            return False
    return True


def metrics(a: Matrix) -> MatrixMetrics:
    ones = sum(1 for x in a.entries if x == 1)
    distinct = len({x for x in a.entries if x != 1})
    return MatrixMetrics(ones, distinct, is_biregular(a))


def classify(
    a: Matrix,
    min_ones: int = OPTIMAL_MIN_ONES,
    max_constants: int = OPTIMAL_MAX_CONSTANTS,
) -> MatrixClass:
    """Assign one of the five generation-cost classes.

    Precedence: Optimal, Circulant, WorstCase (all entries distinct),
    NonCirculant (every row draws on the same set of values), NonOptimal.
    """
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix")
    m = metrics(a)
    if m.biregular and m.ones_count >= min_ones and m.distinct_nonone_constants <= max_constants:
        return MatrixClass.OPTIMAL
    if is_circulant(a):
        return MatrixClass.CIRCULANT
    if len(set(a.entries)) == len(a.entries):
        return MatrixClass.WORST_CASE
    row_sets = {frozenset(a.row(i)) for i in range(a.rows)}
    if len(row_sets) == 1:
        return MatrixClass.NON_CIRCULANT
    return MatrixClass.NON_OPTIMAL


def optimal_pattern(a: int, b: int, spec: FieldSpec = DEFAULT_FIELD) -> Matrix:
    """The 4x4 bi-regular pattern with nine ones and constants a, b."""
    return Matrix.from_rows(
        [
            [a, 1, 1, 1],
            [1, 1, b, a],
            [1, a, 1, b],
            [1, b, a, 1],
        ],
        spec,
    )


@lru_cache(maxsize=None)
def find_optimal_instance(spec: FieldSpec = DEFAULT_FIELD) -> tuple[int, int, Matrix]:
    """Lexicographically smallest (a, b) making the optimal pattern MDS."""
    bs = np.arange(2, spec.order, dtype=np.uint8)
    for a in range(2, spec.order):
        cand = bs[bs != a]
        if cand.size == 0:
            continue
        stack = np.ones((cand.size, 4, 4), dtype=np.uint8)
        for i, j in ((0, 0), (1, 3), (2, 1), (3, 2)):
            stack[:, i, j] = a
        for i, j in ((1, 2), (2, 3), (3, 1)):
            stack[:, i, j] = cand
        ok = np.flatnonzero(is_mds_stack(stack, spec))
        if ok.size:
            b = int(cand[ok[0]])
            return a, b, optimal_pattern(a, b, spec)
    raise NoInstance(f"no (a, b) makes the optimal pattern MDS over {spec}")


# -- branch number --------------------------------------------------------

def nonzero_vectors(spec: FieldSpec, n: int) -> np.ndarray:
    total = spec.order ** n
    if total - 1 > BRANCH_MAX_VECTORS:
        raise ValueError(f"{total - 1} vectors is too many to enumerate")
    idx = np.arange(1, total)
    digits = [(idx // spec.order ** j) % spec.order for j in range(n)]
    return np.stack(digits, axis=1).astype(np.uint8)


def branch_numbers_stack(arr, spec: FieldSpec = DEFAULT_FIELD) -> np.ndarray:
    """Brute-force differential branch number for each matrix of a stack.

    min over nonzero v of wt(v) + wt(M v), with wt counting nonzero
    field coordinates.
    """
    arr = np.asarray(arr, dtype=np.uint8)
    return _kernels.branch_numbers(arr, nonzero_vectors(spec, arr.shape[-1]), mul_table(spec))


def branch_number(a: Matrix) -> int:
    if not a.is_square:
        raise NotSquare(f"{a.rows}x{a.cols} matrix")
    return int(branch_numbers_stack(a.to_array()[None], a.spec)[0])


def distinct_scalings(seed: Matrix) -> Iterable[Matrix]:
    """``e * seed`` for every nonzero e, in increasing e."""
    return (mat_scalar_mul(seed, e) for e in range(1, seed.spec.order))
