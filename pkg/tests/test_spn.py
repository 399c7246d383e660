import numpy as np
import pytest

import oracles
from dynmds.errors import EmptySecret, NotMds
from dynmds.fixtures import AES_CIRCULANT
from dynmds.matrix import Matrix, mat_mul, mat_vec_mul
from dynmds.mds import derive_session_matrix
from dynmds.spn import (
    AES_SBOX,
    IDENTITY_SBOX,
    Session,
    SpnParams,
    avalanche_stats,
    decrypt_block,
    decrypt_blocks,
    derive_constant,
    encrypt_block,
    encrypt_blocks,
    key_schedule,
    make_params,
    round_constant,
    session_setup,
)

KEY = b"dynmds-key"
SECRET = b"dynmds-secret"

# Regression anchors produced by this implementation (numba and numpy paths
# agree); they pin behaviour, they are not external test vectors.
GOLDEN_ZERO_SESSION = "9db22a3b41c9e87031a744c0e3e081a7"
GOLDEN_ZERO_ROUND = "916d105d84249da83db269ab52899e75"


@pytest.fixture(scope="module")
def params():
    return make_params(KEY)


@pytest.fixture(scope="module")
def session():
    return session_setup(AES_CIRCULANT, SECRET)


def test_sbox_matches_reference():
    assert np.array_equal(AES_SBOX, oracles.aes_sbox_reference())
    assert AES_SBOX[0x00] == 0x63 and AES_SBOX[0x53] == 0xED


def test_derive_constant():
    assert derive_constant(SECRET) == derive_constant(SECRET)
    assert derive_constant(b"session-1") == 0x84
    assert derive_constant(b"session-2") == 0x5D
    with pytest.raises(EmptySecret):
        derive_constant(b"")


def test_derive_constant_nonzero_and_uniform():
    rng = np.random.default_rng(5)
    n = 10_000
    counts = np.zeros(256, dtype=int)
    for _ in range(n):
        counts[derive_constant(rng.bytes(16))] += 1
    assert counts[0] == 0
    p = 1 / 255
    se = np.sqrt(p * (1 - p) / n)
    freq = counts[1:] / n
    assert np.all(np.abs(freq - p) <= 5 * se)


def test_session_setup(session):
    again = session_setup(AES_CIRCULANT, SECRET)
    assert again == session
    assert session.constant_e == derive_constant(SECRET)
    assert session.matrix == derive_session_matrix(AES_CIRCULANT, session.constant_e)
    assert mat_mul(session.matrix, session.inverse_matrix) == Matrix.identity(4)
    other = session_setup(AES_CIRCULANT, b"session-2")
    assert session_setup(AES_CIRCULANT, b"session-1").matrix != other.matrix
    with pytest.raises(NotMds):
        session_setup(Matrix.identity(4), SECRET)


def test_round_mode_session():
    s = session_setup(AES_CIRCULANT, SECRET, mode="round", rounds=8)
    assert len(s.round_matrices) == 7
    for r, (m, mi) in enumerate(zip(s.round_matrices, s.round_inverses), start=1):
        assert m == derive_session_matrix(AES_CIRCULANT, round_constant(SECRET, r))
        assert mat_mul(m, mi) == Matrix.identity(4)
    assert len({m for m in s.round_matrices}) > 1


def test_golden_vectors(params, session):
    assert encrypt_block(params, session, bytes(16)).hex() == GOLDEN_ZERO_SESSION
    rs = session_setup(AES_CIRCULANT, SECRET, mode="round")
    assert encrypt_block(params, rs, bytes(16)).hex() == GOLDEN_ZERO_ROUND


@pytest.mark.parametrize("mode", ["session", "round"])
def test_matches_reference_cipher(params, mode):
    s = session_setup(AES_CIRCULANT, SECRET, mode=mode)
    fwd, _ = s.mixes(params.rounds)
    rng = np.random.default_rng(9)
    for _ in range(20):
        p = rng.bytes(16)
        want = oracles.spn_encrypt_reference(p, params.round_keys.tolist(), AES_SBOX.tolist(), fwd.tolist())
        assert encrypt_block(params, s, p) == want


def test_roundtrip_batch(params, session):
    rng = np.random.default_rng(2)
    blocks = rng.integers(0, 256, size=(500, 16), dtype=np.uint8)
    assert np.array_equal(decrypt_blocks(params, session, encrypt_blocks(params, session, blocks)), blocks)


def test_changing_e_changes_ciphertext(params):
    a = session_setup(AES_CIRCULANT, b"session-1")
    b = session_setup(AES_CIRCULANT, b"session-2")
    assert a.constant_e != b.constant_e
    p = bytes(range(16))
    ca, cb = encrypt_block(params, a, p), encrypt_block(params, b, p)
    assert ca != cb
    assert decrypt_block(params, b, ca) != p
    assert decrypt_block(params, a, ca) == p


def test_degenerate_single_round():
    keys = key_schedule(b"k", 1)
    p = SpnParams(1, IDENTITY_SBOX, keys)
    i = Matrix.identity(4)
    s = Session(b"x", 1, i, i)
    pt = bytes(range(16))
    ct = encrypt_block(p, s, pt)
    # one round = key, row rotation, key
    x = bytes(a ^ b for a, b in zip(pt, keys[0]))
    rotated = bytes(x[r + 4 * ((c + r) % 4)] for c in range(4) for r in range(4))
    assert ct == bytes(a ^ b for a, b in zip(rotated, keys[1]))
    assert decrypt_block(p, s, ct) == pt


def test_params_validation():
    with pytest.raises(ValueError):
        make_params(KEY, rounds=3)
    with pytest.raises(ValueError):
        SpnParams(4, np.zeros(256, dtype=np.uint8), key_schedule(KEY, 4))
    with pytest.raises(ValueError):
        SpnParams(4, AES_SBOX, key_schedule(KEY, 3))
    assert len(key_schedule(KEY, 8)) == 9


def test_session_validation():
    i = Matrix.identity(4)
    with pytest.raises(ValueError):
        Session(b"x", 0, i, i)
    with pytest.raises(ValueError):
        Session(b"x", 1, AES_CIRCULANT, i)


def test_round_one_fills_a_column(params, session):
    # one active byte entering the first mix leaves four active bytes
    rng = np.random.default_rng(4)
    pts = rng.integers(0, 256, size=(200, 16), dtype=np.uint8)
    flipped = pts.copy()
    flipped[:, 0] ^= 1
    a = encrypt_blocks(params, session, pts, trace=True)[:, 0]
    b = encrypt_blocks(params, session, flipped, trace=True)[:, 0]
    diff = a != b
    # byte 0 stays in column 0 through the row rotation
    assert diff[:, 0:4].all() and not diff[:, 4:].any()


def test_diffusion_floor_exhaustive(session):
    for m in (AES_CIRCULANT, session.matrix):
        for pos in range(4):
            for delta in range(1, 256):
                v = [0] * 4
                v[pos] = delta
                out = mat_vec_mul(m, v)
                assert 1 + sum(1 for x in out if x) >= 5


def test_per_session_variability():
    mats = [derive_session_matrix(AES_CIRCULANT, e, check=False) for e in range(1, 256)]
    assert len(set(mats)) == 255


def test_avalanche_small(params, session):
    st = avalanche_stats(params, session, trials=2000, seed=1)
    assert st.per_round.shape == (8,)
    assert abs(st.mean - 0.5) < 0.05
    assert st.mean == st.per_round[-1]
    with pytest.raises(ValueError):
        avalanche_stats(params, session, trials=10)
