from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from dynmds.errors import IndexOutOfRange, NotSquare, ShapeMismatch, Singular
from dynmds.gfield import DEFAULT_FIELD, FieldSpec, gf_inv, gf_mul, gf_pow
from dynmds.matrix import (
    Matrix,
    MinorIndex,
    circulant,
    count_minors,
    det_cofactor,
    det_gauss,
    determinant,
    format_matrix,
    is_circulant,
    iter_minors,
    mat_inverse,
    mat_mul,
    mat_scalar_mul,
    mat_vec_mul,
    parse_matrix,
    submatrix,
)

F = DEFAULT_FIELD
byte = st.integers(0, 255)


def square(n):
    return st.lists(byte, min_size=n * n, max_size=n * n).map(lambda xs: Matrix(F, n, n, tuple(xs)))


def invertible(n):
    return square(n).filter(lambda m: det_gauss(m) != 0)


def test_scalar_mul_examples():
    a = circulant(F, [2, 3, 1, 1])
    assert mat_scalar_mul(a, 1) == a
    assert set(mat_scalar_mul(a, 0).entries) == {0}
    assert mat_scalar_mul(Matrix.from_rows([[0x02]]), 0x87).entries == (oracles.mul(0x02, 0x87),) == (0x15,)


@given(square(4))
def test_identity_products(a):
    i = Matrix.identity(4)
    assert mat_mul(a, i) == a
    assert mat_mul(i, a) == a


def test_mat_mul_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        mat_mul(Matrix.identity(2), Matrix.identity(3))
    with pytest.raises(ShapeMismatch):
        mat_vec_mul(Matrix.identity(2), [1, 2, 3])


@given(square(4), st.lists(byte, min_size=4, max_size=4), st.lists(byte, min_size=4, max_size=4))
def test_mat_vec_linear(a, u, v):
    assert mat_vec_mul(a, [0] * 4) == [0] * 4
    assert mat_vec_mul(Matrix.identity(4), u) == u
    uv = [x ^ y for x, y in zip(u, v)]
    assert mat_vec_mul(a, uv) == [x ^ y for x, y in zip(mat_vec_mul(a, u), mat_vec_mul(a, v))]


def test_determinant_examples():
    assert determinant(Matrix.identity(4)) == 1
    assert determinant(Matrix.from_rows([[1, 2, 3], [4, 5, 6], [1, 2, 3]])) == 0
    assert determinant(Matrix.from_rows([[1, 2, 3], [4, 5, 6], [1, 2, 3]]), "cofactor") == 0
    with pytest.raises(NotSquare):
        determinant(Matrix.from_rows([[1, 2]]))


@given(square(3))
def test_det_against_leibniz(a):
    expect = oracles.det_leibniz(a.to_rows())
    assert det_cofactor(a) == expect
    assert det_gauss(a) == expect


def test_det_oracles_exhaustive_gf4_2x2():
    f = FieldSpec(2, 0b111)
    for w, x, y, z in product(range(4), repeat=4):
        m = Matrix.from_rows([[w, x], [y, z]], f)
        assert det_cofactor(m) == det_gauss(m)


def test_det_oracles_random():
    rng = np.random.default_rng(1)
    for n in (3, 4):
        for arr in rng.integers(0, 256, size=(500, n, n)):
            m = Matrix.from_array(arr)
            assert det_cofactor(m) == det_gauss(m)


@given(square(3), square(3))
def test_det_multiplicative(a, b):
    assert det_gauss(mat_mul(a, b)) == gf_mul(F, det_gauss(a), det_gauss(b))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@given(data=st.data())
def test_det_scaling_law(k, data):
    s = data.draw(square(k))
    e = data.draw(byte)
    lhs = det_cofactor(mat_scalar_mul(s, e))
    rhs = gf_mul(F, gf_pow(F, e, k), det_cofactor(s))
    assert lhs == rhs
    assert det_gauss(mat_scalar_mul(s, e)) == rhs


def test_submatrix():
    a = circulant(F, [2, 3, 1, 1])
    assert submatrix(a, MinorIndex(range(4), range(4))) == a
    assert submatrix(a, MinorIndex((1,), (2,))).entries == (a[1, 2],)
    with pytest.raises(IndexOutOfRange):
        submatrix(a, MinorIndex((4,), (0,)))
    with pytest.raises(IndexOutOfRange):
        MinorIndex((1, 0), (0, 1))


def test_minor_enumeration_count():
    minors = list(iter_minors(4, 4))
    assert len(minors) == sum(comb(4, k) ** 2 for k in range(1, 5)) == 69
    assert len(set(minors)) == 69
    assert count_minors(4, 4) == 69
    assert count_minors(8, 8) == 12869
    # brute force: every pair of equal-size nonempty subsets
    subsets = [tuple(i for i in range(4) if mask >> i & 1) for mask in range(1, 16)]
    brute = {(r, c) for r in subsets for c in subsets if len(r) == len(c)}
    assert brute == {(m.row_set, m.col_set) for m in minors}


def test_inverse_examples():
    i = Matrix.identity(4)
    assert mat_inverse(i) == i
    assert mat_inverse(Matrix.from_rows([[0x53]])).entries == (gf_inv(F, 0x53),)
    with pytest.raises(Singular):
        mat_inverse(Matrix.from_rows([[1, 1], [1, 1]]))


@given(invertible(4))
def test_inverse_roundtrip(a):
    inv = mat_inverse(a)
    assert mat_mul(a, inv) == Matrix.identity(4)
    assert mat_mul(inv, a) == Matrix.identity(4)
    assert mat_inverse(inv) == a


def test_circulant():
    a = circulant(F, [0xA, 0xB, 0xC, 0xD])
    assert a.row(1) == (0xD, 0xA, 0xB, 0xC)
    assert a.row(2) == (0xC, 0xD, 0xA, 0xB)
    assert circulant(F, [7]).to_rows() == [[7]]
    assert is_circulant(a)
    assert not is_circulant(Matrix.from_rows([a.row(0), a.row(2), a.row(1), a.row(3)]))


@given(st.lists(byte, min_size=1, max_size=8))
def test_circulant_rows_are_permutations(row):
    a = circulant(F, row)
    for i in range(a.rows):
        assert sorted(a.row(i)) == sorted(row)


def test_shape_cap():
    with pytest.raises(ShapeMismatch):
        Matrix.identity(9)


def test_text_roundtrip():
    a = circulant(F, [2, 3, 1, 1])
    text = format_matrix(a)
    assert text.splitlines()[0] == "gf(2^8, 0x11B)"
    assert text.splitlines()[1] == "02 03 01 01"
    assert parse_matrix(text) == a
    assert parse_matrix("# comment\ngf(2^4, 0x13)\n1 2\n3 4\n").spec == FieldSpec(4, 0x13)
