from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from dynmds.errors import InvalidElement, InvalidField, ZeroInverse
from dynmds.gfield import (
    DEFAULT_FIELD,
    FieldSpec,
    build_tables,
    gf_add,
    gf_inv,
    gf_mul,
    gf_pow,
    inv_table,
    is_irreducible,
    mul_table,
    parse_field,
)

SMALL_FIELDS = [
    FieldSpec(1, 0b11),
    FieldSpec(2, 0b111),
    FieldSpec(3, 0b1011),
    FieldSpec(3, 0b1101),
    FieldSpec(4, 0b10011),
    FieldSpec(4, 0b11001),
]

byte = st.integers(0, 255)


def test_add_examples(aes_field):
    assert gf_add(aes_field, 0x57, 0x83) == 0xD4
    assert gf_add(aes_field, 0x57, 0) == 0x57
    assert gf_add(aes_field, 0x57, 0x57) == 0


def test_mul_examples(aes_field):
    assert oracles.mul(0x02, 0x87) == 0x15
    assert gf_mul(aes_field, 0x02, 0x87) == 0x15
    assert gf_mul(aes_field, 0x57, 0x01) == 0x57
    assert gf_mul(aes_field, 0x57, 0x00) == 0


def test_inv_examples(aes_field):
    assert gf_inv(aes_field, 1) == 1
    assert oracles.inv_by_scan(0x02) == 0x8D
    assert gf_inv(aes_field, 0x02) == 0x8D
    with pytest.raises(ZeroInverse):
        gf_inv(aes_field, 0)


def test_pow_examples(aes_field):
    assert gf_pow(aes_field, 0x53, 0) == 1
    assert gf_pow(aes_field, 0, 0) == 1
    assert gf_pow(aes_field, 0x53, 1) == 0x53
    acc = 1
    for _ in range(255):
        acc = oracles.mul(acc, 0x02)
    assert acc == 1
    assert gf_pow(aes_field, 0x02, 255) == 1


@given(byte, byte)
def test_mul_matches_schoolbook(x, y):
    assert gf_mul(DEFAULT_FIELD, x, y) == oracles.mul(x, y)


def test_mul_table_matches_scalar_path(aes_field):
    t = mul_table(aes_field)
    for x, y in product(range(256), repeat=2):
        assert t[x, y] == gf_mul(aes_field, x, y)


@given(byte, byte, byte)
def test_field_axioms_random(x, y, z):
    f = DEFAULT_FIELD
    assert gf_mul(f, x, y) == gf_mul(f, y, x)
    assert gf_mul(f, gf_mul(f, x, y), z) == gf_mul(f, x, gf_mul(f, y, z))
    assert gf_mul(f, x, gf_add(f, y, z)) == gf_add(f, gf_mul(f, x, y), gf_mul(f, x, z))
    assert gf_add(f, gf_add(f, x, y), z) == gf_add(f, x, gf_add(f, y, z))


@pytest.mark.parametrize("f", SMALL_FIELDS, ids=str)
def test_field_axioms_exhaustive_small(f):
    els = range(f.order)
    for x, y in product(els, repeat=2):
        assert gf_add(f, x, y) == gf_add(f, y, x)
        assert gf_mul(f, x, y) == gf_mul(f, y, x)
        assert gf_mul(f, x, 1) == x
        assert gf_add(f, x, 0) == x
    for x, y, z in product(els, repeat=3):
        assert gf_mul(f, gf_mul(f, x, y), z) == gf_mul(f, x, gf_mul(f, y, z))
        assert gf_mul(f, x, gf_add(f, y, z)) == gf_add(f, gf_mul(f, x, y), gf_mul(f, x, z))
    for x in range(1, f.order):
        assert gf_mul(f, x, gf_inv(f, x)) == 1
        assert gf_pow(f, x, f.order - 1) == 1


def test_inverse_exhaustive_q8(aes_field):
    for x in range(1, 256):
        y = gf_inv(aes_field, x)
        assert gf_mul(aes_field, x, y) == 1
        assert y == gf_pow(aes_field, x, 254)
        assert inv_table(aes_field)[x] == y


def test_other_octic_polynomial():
    f = FieldSpec(8, 0x169)
    for x in range(1, 256):
        assert oracles.mul(x, gf_inv(f, x), 0x169) == 1


def test_irreducibility():
    assert is_irreducible(0x11B)
    assert is_irreducible(0x169)
    assert not is_irreducible(0x100)
    assert not is_irreducible(0b101)  # (x+1)^2
    assert sum(is_irreducible(p) for p in range(256, 512)) == 30


def test_field_spec_validation():
    with pytest.raises(InvalidField):
        FieldSpec(9, 0x211)
    with pytest.raises(InvalidField):
        FieldSpec(8, 0x11A)  # reducible
    with pytest.raises(InvalidField):
        FieldSpec(8, 0x1B)  # wrong degree
    with pytest.raises(InvalidElement):
        gf_mul(DEFAULT_FIELD, 256, 1)


def test_parse_field():
    assert parse_field("gf(2^8, 0x11B)") == DEFAULT_FIELD
    assert parse_field("gf(2^8,0x11b)") == DEFAULT_FIELD
    assert parse_field("gf(2^4, 19)") == FieldSpec(4, 0b10011)
    assert str(DEFAULT_FIELD) == "gf(2^8, 0x11B)"
    with pytest.raises(InvalidField):
        parse_field("GF256")


def test_build_tables(aes_field):
    t = build_tables(aes_field, [0x53, 0x01, 0x53, 0x02])
    assert sorted(t.rows) == [0x01, 0x02, 0x53]
    assert t.memory_entries == 3 * 256
    assert np.array_equal(t.rows[0x01], np.arange(256))
    for c, row in t.rows.items():
        assert all(row[x] == gf_mul(aes_field, c, x) for x in range(256))
    for x in range(1, 256):
        assert t.antilog[t.log[x]] == x
    assert len(t.antilog) == 255


@pytest.mark.parametrize("f", SMALL_FIELDS, ids=str)
def test_log_tables_small(f):
    t = build_tables(f, [])
    for x in range(1, f.order):
        assert t.antilog[t.log[x]] == x
