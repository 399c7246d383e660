"""Toy AES-shaped SPN whose MixColumns matrix changes per session.

NOT FOR PRODUCTION.  This cipher exists to exercise dynamic MDS matrices
in a real diffusion layer and to measure avalanche; it has no security
analysis behind it.

Round r of R: substitute bytes, rotate row i left by i, multiply every
column by the round's 4x4 matrix (skipped when r == R), add round key r.
Round key 0 is added before the first round.  State bytes are
column-major, as in AES.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import EmptySecret, NotMds
from .gfield import DEFAULT_FIELD, gf_inv, mul_table
from .matrix import Matrix, mat_inverse, mat_mul, mat_scalar_mul
from .mds import derive_session_matrix, is_mds

HASH_NAME = "sha256"
BLOCK_BYTES = 16
DEFAULT_ROUNDS = 8
MIN_ROUNDS = 4
MODES = ("session", "round")


def _aes_sbox() -> np.ndarray:
    box = np.empty(256, dtype=np.uint8)
    for x in range(256):
        b = gf_inv(DEFAULT_FIELD, x) if x else 0
        s = b
        for k in range(1, 5):
            s ^= ((b << k) | (b >> (8 - k))) & 0xFF
        box[x] = s ^ 0x63
    box.setflags(write=False)
    return box


AES_SBOX = _aes_sbox()
IDENTITY_SBOX = np.arange(256, dtype=np.uint8)


def key_schedule(key: bytes, rounds: int) -> np.ndarray:
    """Iterated hash: round key i is the first 16 bytes of H^(i+1)(key)."""
    keys = np.empty((rounds + 1, BLOCK_BYTES), dtype=np.uint8)
    h = key
    for i in range(rounds + 1):
        h = hashlib.new(HASH_NAME, h).digest()
        keys[i] = np.frombuffer(h[:BLOCK_BYTES], dtype=np.uint8)
    return keys


@dataclass(frozen=True, eq=False)
class SpnParams:
    rounds: int
    sbox: np.ndarray
    round_keys: np.ndarray
    inv_sbox: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        sbox = np.asarray(self.sbox, dtype=np.uint8)
        keys = np.asarray(self.round_keys, dtype=np.uint8)
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if sbox.shape != (256,) or len(set(sbox.tolist())) != 256:
            raise ValueError("sbox must be a permutation of the 256 byte values")
        if keys.shape != (self.rounds + 1, BLOCK_BYTES):
            raise ValueError(f"expected {self.rounds + 1} round keys of {BLOCK_BYTES} bytes")
        inv = np.empty(256, dtype=np.uint8)
        inv[sbox] = np.arange(256, dtype=np.uint8)
        object.__setattr__(self, "sbox", sbox)
        object.__setattr__(self, "round_keys", keys)
        object.__setattr__(self, "inv_sbox", inv)


def make_params(key: bytes, rounds: int = DEFAULT_ROUNDS, sbox=AES_SBOX) -> SpnParams:
    if rounds < MIN_ROUNDS:
        raise ValueError(f"rounds must be at least {MIN_ROUNDS}")
    return SpnParams(rounds, sbox, key_schedule(key, rounds))


def derive_constant(shared_secret: bytes) -> int:
    """First nonzero byte of the secret's digest (0x01 if there is none)."""
    if not shared_secret:
        raise EmptySecret("shared secret must be nonempty")
    digest = hashlib.new(HASH_NAME, shared_secret).digest()
    return next((b for b in digest if b), 0x01)


def round_constant(shared_secret: bytes, round_index: int) -> int:
    return derive_constant(shared_secret + round_index.to_bytes(4, "big"))


@dataclass(frozen=True)
class Session:
    shared_secret: bytes
    constant_e: int
    matrix: Matrix
    inverse_matrix: Matrix
    mode: str = "session"
    # per-round mode only: matrices for rounds 1 .. rounds-1
    round_matrices: tuple[Matrix, ...] = ()
    round_inverses: tuple[Matrix, ...] = ()

    def __post_init__(self):
        if self.constant_e == 0:
            raise ValueError("session constant must be nonzero")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        n = self.matrix.rows
        if (self.matrix.shape, self.inverse_matrix.shape) != ((4, 4), (4, 4)):
            raise ValueError("session matrices must be 4x4")
        if mat_mul(self.matrix, self.inverse_matrix) != Matrix.identity(n, self.matrix.spec):
            raise ValueError("inverse_matrix is not the inverse of matrix")
        if self.mode == "round" and len(self.round_matrices) != len(self.round_inverses):
            raise ValueError("round matrices and inverses differ in length")

    def mixes(self, rounds: int) -> tuple[np.ndarray, np.ndarray]:
        """Forward and inverse mix stacks, one 4x4 per non-final round."""
        if self.mode == "session":
            fwd = [self.matrix] * (rounds - 1)
            inv = [self.inverse_matrix] * (rounds - 1)
        else:
            if len(self.round_matrices) < rounds - 1:
                raise ValueError(f"session was set up for {len(self.round_matrices) + 1} rounds, not {rounds}")
            fwd = self.round_matrices[:rounds - 1]
            inv = self.round_inverses[:rounds - 1]
        stack = lambda ms: np.array([m.to_array() for m in ms], dtype=np.uint8).reshape(-1, 4, 4)
        return stack(fwd), stack(inv)


@lru_cache(maxsize=64)
def _checked_seed_inverse(seed: Matrix) -> Matrix:
    if not is_mds(seed).is_mds:
        raise NotMds("seed matrix is not MDS")
    return mat_inverse(seed)


def _derive_pair(seed: Matrix, e: int) -> tuple[Matrix, Matrix]:
    # (eA)^-1 = e^-1 A^-1, so the seed inverse is computed once per seed
    matrix = derive_session_matrix(seed, e, check=False)
    return matrix, mat_scalar_mul(_checked_seed_inverse(seed), gf_inv(seed.spec, e))


def session_setup(seed: Matrix, shared_secret: bytes, mode: str = "session", rounds: int = DEFAULT_ROUNDS) -> Session:
    """Both parties call this with the same seed and secret."""
    if seed.shape != (4, 4):
        raise ValueError("seed must be 4x4")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    e = derive_constant(shared_secret)
    matrix, inverse = _derive_pair(seed, e)
    if mode == "session":
        return Session(shared_secret, e, matrix, inverse)
    pairs = [_derive_pair(seed, round_constant(shared_secret, r)) for r in range(1, rounds)]
    return Session(
        shared_secret, e, matrix, inverse, mode, tuple(m for m, _ in pairs), tuple(mi for _, mi in pairs)
    )


def _as_blocks(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.uint8)
    if arr.ndim != 2 or arr.shape[1] != BLOCK_BYTES:
        raise ValueError(f"expected an (N, {BLOCK_BYTES}) array of blocks")
    return arr


def encrypt_blocks(params: SpnParams, session: Session, blocks, trace: bool = False) -> np.ndarray:
    """Encrypt a batch.  With ``trace`` returns all round states ``(N, R, 16)``."""
    fwd, _ = session.mixes(params.rounds)
    states = _kernels.spn_encrypt(
        _as_blocks(blocks), params.round_keys, params.sbox, fwd, mul_table(session.matrix.spec), trace
    )
    return states if trace else states[:, -1]


def decrypt_blocks(params: SpnParams, session: Session, blocks) -> np.ndarray:
    _, inv = session.mixes(params.rounds)
    return _kernels.spn_decrypt(
        _as_blocks(blocks), params.round_keys, params.inv_sbox, inv, mul_table(session.matrix.spec)
    )


def _one_block(data: bytes) -> np.ndarray:
    if len(data) != BLOCK_BYTES:
        raise ValueError(f"block must be {BLOCK_BYTES} bytes, got {len(data)}")
    return np.frombuffer(bytes(data), dtype=np.uint8)[None]


def encrypt_block(params: SpnParams, session: Session, plaintext: bytes) -> bytes:
    return encrypt_blocks(params, session, _one_block(plaintext))[0].tobytes()


def decrypt_block(params: SpnParams, session: Session, ciphertext: bytes) -> bytes:
    return decrypt_blocks(params, session, _one_block(ciphertext))[0].tobytes()


@dataclass(frozen=True)
class AvalancheStats:
    mean: float
    per_round: np.ndarray  # per_round[r-1]: flipped fraction after round r
    trials: int


def _popcount_rows(x: np.ndarray) -> np.ndarray:
    return np.unpackbits(x, axis=-1).sum(axis=-1)


def avalanche_stats(params: SpnParams, session: Session, trials: int = 10_000, seed: int = 0) -> AvalancheStats:
    """Flip one random plaintext bit per trial and count flipped state bits.

    ``mean`` is the ciphertext fraction; ``per_round`` traces the state
    after each round of the same encryption.
    """
    if trials < 1000:
        raise ValueError("avalanche needs at least 1000 trials")
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 256, size=(trials, BLOCK_BYTES), dtype=np.uint8)
    bits = rng.integers(0, 8 * BLOCK_BYTES, size=trials)
    flipped = pts.copy()
    flipped[np.arange(trials), bits // 8] ^= (1 << (bits % 8)).astype(np.uint8)
    a = encrypt_blocks(params, session, pts, trace=True)
    b = encrypt_blocks(params, session, flipped, trace=True)
    frac = _popcount_rows(a ^ b) / (8 * BLOCK_BYTES)  # (trials, rounds)
    per_round = frac.mean(axis=0)
    return AvalancheStats(float(per_round[-1]), per_round, trials)
