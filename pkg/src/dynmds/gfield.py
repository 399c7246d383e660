"""Arithmetic in binary extension fields GF(2^q), 1 <= q <= 8.

Elements are plain ints whose bits are polynomial coefficients over GF(2)
(bit i is the coefficient of x^i).  The scalar routines here use a portable
shift-and-XOR multiply and a polynomial extended Euclid inverse; the
vectorised paths elsewhere read the cached full tables from
:func:`mul_table` / :func:`inv_table`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidElement, InvalidField, NoGenerator, ZeroInverse

MAX_DEGREE = 8
AES_POLY = 0x11B  # x^8 + x^4 + x^3 + x + 1


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mulmod_free(a: int, b: int) -> int:
    """Carryless product of two GF(2)[x] polynomials, no reduction."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_divmod(a: int, b: int) -> tuple[int, int]:
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = poly_degree(b)
    while a and poly_degree(a) >= db:
        shift = poly_degree(a) - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    d = poly_degree(poly)
    if d < 1:
        return False
    for divisor in range(2, 1 << (d // 2 + 1)):
        if poly_divmod(poly, divisor)[1] == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    degree: int = 8
    reduction_poly: int = AES_POLY

    def __post_init__(self):
        if not 1 <= self.degree <= MAX_DEGREE:
            raise InvalidField(f"degree must be in [1, {MAX_DEGREE}], got {self.degree}")
        if poly_degree(self.reduction_poly) != self.degree:
            raise InvalidField(
                f"reduction polynomial {self.reduction_poly:#x} does not have degree {self.degree}"
            )
        if not is_irreducible(self.reduction_poly):
            raise InvalidField(f"reduction polynomial {self.reduction_poly:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.degree

    def check(self, x: int) -> int:
        if not (isinstance(x, (int, np.integer)) and 0 <= x < self.order):
            raise InvalidElement(f"{x!r} is not an element of {self}")
        return int(x)

    def __str__(self):
        return f"gf(2^{self.degree}, {self.reduction_poly:#X})".replace("0X", "0x")


DEFAULT_FIELD = FieldSpec()

_FIELD_RE = re.compile(
    r"^\s*gf\s*\(\s*2\s*\^\s*(\d+)\s*,\s*(0[xX][0-9a-fA-F]+|\d+)\s*\)\s*$"
)


def parse_field(text: str) -> FieldSpec:
    """Parse the textual form ``gf(2^8, 0x11B)``."""
    m = _FIELD_RE.match(text)
    if not m:
        raise InvalidField(f"cannot parse field spec {text!r}")
    return FieldSpec(int(m.group(1)), int(m.group(2), 0))


def gf_add(spec: FieldSpec, x: int, y: int) -> int:
    return spec.check(x) ^ spec.check(y)


def gf_mul(spec: FieldSpec, x: int, y: int) -> int:
    x, y = spec.check(x), spec.check(y)
    top = spec.order
    poly = spec.reduction_poly
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        if x & top:
            x ^= poly
        y >>= 1
    return out


def gf_inv(spec: FieldSpec, x: int) -> int:
    """Inverse by the extended Euclidean algorithm in GF(2)[x].

    Tracks only the cofactor of ``x``; the one on the reduction polynomial
    is never needed.
    """
    x = spec.check(x)
    if x == 0:
        raise ZeroInverse("0 has no multiplicative inverse")
    r0, r1 = spec.reduction_poly, x
    s0, s1 = 0, 1
    while r1:
        q, rem = poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 ^ poly_mulmod_free(q, s1)
    # r0 is the gcd, 1 for an irreducible modulus
    assert r0 == 1
    return poly_divmod(s0, spec.reduction_poly)[1]


def gf_pow(spec: FieldSpec, x: int, n: int) -> int:
    """``x**n`` by square-and-multiply; ``0**0 == 1``."""
    x = spec.check(x)
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    result = 1
    while n:
        if n & 1:
            result = gf_mul(spec, result, x)
        x = gf_mul(spec, x, x)
        n >>= 1
    return result


def gf_div(spec: FieldSpec, x: int, y: int) -> int:
    return gf_mul(spec, x, gf_inv(spec, y))


@lru_cache(maxsize=None)
def _generator(spec: FieldSpec) -> int:
    n = spec.order - 1
    for g in range(1, spec.order):
        acc, k = g, 1
        while acc != 1:
            acc = gf_mul(spec, acc, g)
            k += 1
        if k == n:
            return g
    raise NoGenerator(f"no primitive element in {spec}")


@lru_cache(maxsize=None)
def _log_antilog(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    g = _generator(spec)
    n = spec.order - 1
    antilog = np.empty(n, dtype=np.int64)
    log = np.full(spec.order, -1, dtype=np.int64)
    acc = 1
    for i in range(n):
        antilog[i] = acc
        log[acc] = i
        acc = gf_mul(spec, acc, g)
    antilog.setflags(write=False)
    log.setflags(write=False)
    return log, antilog


@dataclass(frozen=True)
class MulTables:
    """Log/antilog tables plus one precomputed product row per constant.

    ``log`` has 2^q slots with ``log[0] == -1`` as a sentinel, so indexing
    by a raw element value works; ``antilog`` has the 2^q - 1 powers of the
    generator.
    """

    spec: FieldSpec
    generator: int
    log: np.ndarray
    antilog: np.ndarray
    rows: Mapping[int, np.ndarray] = field(default_factory=dict)

    @property
    def memory_entries(self) -> int:
        return len(self.rows) * self.spec.order

    def mul(self, c: int, x: int) -> int:
        return int(self.rows[c][x])


def product_row(spec: FieldSpec, c: int) -> np.ndarray:
    """The 2^q products ``c*x`` for x = 0 .. 2^q - 1, via log/antilog."""
    c = spec.check(c)
    row = np.zeros(spec.order, dtype=np.uint8)
    if c:
        log, antilog = _log_antilog(spec)
        xs = np.arange(1, spec.order)
        row[1:] = antilog[(log[c] + log[xs]) % (spec.order - 1)]
    return row


def build_tables(spec: FieldSpec, constants: Iterable[int]) -> MulTables:
    log, antilog = _log_antilog(spec)
    rows = {}
    for c in constants:
        c = spec.check(c)
        if c not in rows:
            row = product_row(spec, c)
            row.setflags(write=False)
            rows[c] = row
    return MulTables(spec, _generator(spec), log, antilog, rows)


@lru_cache(maxsize=None)
def mul_table(spec: FieldSpec) -> np.ndarray:
    """Full 2^q x 2^q product table as uint8 (read-only, cached)."""
    n = spec.order
    t = np.zeros((n, n), dtype=np.uint8)
    for c in range(1, n):
        t[c] = product_row(spec, c)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def inv_table(spec: FieldSpec) -> np.ndarray:
    """``inv[x]`` for nonzero x; ``inv[0]`` is 0 and must not be used."""
    t = np.zeros(spec.order, dtype=np.uint8)
    for x in range(1, spec.order):
        t[x] = gf_inv(spec, x)
    t.setflags(write=False)
    return t
