"""Batched inner loops: determinants, branch numbers and SPN rounds.

Each kernel exists twice: an explicit-loop version compiled with
``numba.njit`` and a vectorised pure-numpy version.  Set
``DYNMDS_NUMBA=0`` to force the numpy path; it is also used automatically
when numba cannot be imported.  Both paths take and return uint8 arrays
and read field products from a full ``mul[a, b]`` table, so they agree
bit-for-bit (tests/test_kernels.py checks this).
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DYNMDS_NUMBA", "1").lower() not in ("0", "false", "no", "off")

_BN_CHUNK = 4096


def _jit(fn):
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


# -- determinants ---------------------------------------------------------

def _det_batch_loops(mats, mul, inv):
    n, k = mats.shape[0], mats.shape[1]
    out = np.empty(n, dtype=np.uint8)
    a = np.empty((k, k), dtype=np.uint8)
    for t in range(n):
        for i in range(k):
            for j in range(k):
                a[i, j] = mats[t, i, j]
        det = np.uint8(1)
        for col in range(k):
            p = -1
            for r in range(col, k):
                if a[r, col] != 0:
                    p = r
                    break
            if p < 0:
                det = np.uint8(0)
                break
            if p != col:
                # characteristic 2: a row swap does not flip the sign
                for j in range(col, k):
                    tmp = a[col, j]
                    a[col, j] = a[p, j]
                    a[p, j] = tmp
            piv = a[col, col]
            det = mul[det, piv]
            pinv = inv[piv]
            for r in range(col + 1, k):
                f = mul[a[r, col], pinv]
                if f != 0:
                    for j in range(col, k):
                        a[r, j] ^= mul[f, a[col, j]]
        out[t] = det
    return out


def det_batch_numpy(mats, mul, inv):
    a = np.array(mats, dtype=np.uint8, copy=True)
    n, k = a.shape[0], a.shape[1]
    det = np.ones(n, dtype=np.uint8)
    idx = np.arange(n)
    for col in range(k):
        nz = a[:, col:, col] != 0
        p = col + np.argmax(nz, axis=1)
        row_c = a[idx, col].copy()
        a[idx, col] = a[idx, p]
        a[idx, p] = row_c
        piv = a[:, col, col]
        # piv == 0 means the column is empty: det collapses to 0 and, since
        # inv[0] == 0, the elimination step below leaves the rows untouched
        det = mul[det, piv]
        if col + 1 < k:
            f = mul[a[:, col + 1:, col], inv[piv][:, None]]
            a[:, col + 1:, :] ^= mul[f[:, :, None], a[:, None, col, :]]
    return det


det_batch_numba = _jit(_det_batch_loops)


def det_batch(mats, mul, inv):
    """Determinants of a stack ``(N, k, k)`` of uint8 matrices."""
    mats = np.ascontiguousarray(mats, dtype=np.uint8)
    if mats.shape[0] == 0:
        return np.zeros(0, dtype=np.uint8)
    if USE_NUMBA:
        return det_batch_numba(mats, mul, inv)
    return det_batch_numpy(mats, mul, inv)


# -- branch numbers -------------------------------------------------------

def _branch_numbers_loops(mats, vecs, mul):
    n, m = mats.shape[0], mats.shape[1]
    out = np.empty(n, dtype=np.int64)
    for t in range(n):
        best = 2 * m + 1
        for v in range(vecs.shape[0]):
            w = 0
            for j in range(m):
                if vecs[v, j] != 0:
                    w += 1
            for i in range(m):
                acc = np.uint8(0)
                for j in range(m):
                    acc ^= mul[mats[t, i, j], vecs[v, j]]
                if acc != 0:
                    w += 1
            if w < best:
                best = w
        out[t] = best
    return out


def branch_numbers_numpy(mats, vecs, mul):
    out = np.empty(mats.shape[0], dtype=np.int64)
    wt_in = np.count_nonzero(vecs, axis=1)
    for lo in range(0, mats.shape[0], _BN_CHUNK):
        chunk = mats[lo:lo + _BN_CHUNK]
        # prod[t, v, i, j] = M[t, i, j] * vec[v, j]
        prod = mul[chunk[:, None, :, :], vecs[None, :, None, :]]
        image = np.bitwise_xor.reduce(prod, axis=3)
        w = wt_in[None, :] + np.count_nonzero(image, axis=2)
        out[lo:lo + _BN_CHUNK] = w.min(axis=1)
    return out


branch_numbers_numba = _jit(_branch_numbers_loops)


def branch_numbers(mats, vecs, mul):
    """min over rows v of ``vecs`` of wt(v) + wt(M v), for each M in the stack."""
    mats = np.ascontiguousarray(mats, dtype=np.uint8)
    vecs = np.ascontiguousarray(vecs, dtype=np.uint8)
    if USE_NUMBA:
        return branch_numbers_numba(mats, vecs, mul)
    return branch_numbers_numpy(mats, vecs, mul)


# -- SPN rounds -----------------------------------------------------------
# State bytes are column-major: byte (row r, column c) sits at index r + 4c.

SHIFT_ROWS = np.array([r + 4 * ((c + r) % 4) for c in range(4) for r in range(4)], dtype=np.int64)
INV_SHIFT_ROWS = np.argsort(SHIFT_ROWS).astype(np.int64)


def _spn_encrypt_loops(blocks, round_keys, sbox, mixes, mul, shift, trace):
    n = blocks.shape[0]
    rounds = round_keys.shape[0] - 1
    states = np.empty((n, rounds, 16), dtype=np.uint8)
    s = np.empty(16, dtype=np.uint8)
    tmp = np.empty(16, dtype=np.uint8)
    for t in range(n):
        for i in range(16):
            s[i] = blocks[t, i] ^ round_keys[0, i]
        for r in range(1, rounds + 1):
            for i in range(16):
                tmp[i] = sbox[s[shift[i]]]
            if r < rounds:
                m = mixes[r - 1]
                for c in range(4):
                    for i in range(4):
                        acc = np.uint8(0)
                        for j in range(4):
                            acc ^= mul[m[i, j], tmp[4 * c + j]]
                        s[4 * c + i] = acc
            else:
                for i in range(16):
                    s[i] = tmp[i]
            for i in range(16):
                s[i] ^= round_keys[r, i]
            if trace or r == rounds:
                for i in range(16):
                    states[t, r - 1, i] = s[i]
    return states


def _spn_decrypt_loops(blocks, round_keys, inv_sbox, inv_mixes, mul, inv_shift):
    n = blocks.shape[0]
    rounds = round_keys.shape[0] - 1
    out = np.empty((n, 16), dtype=np.uint8)
    s = np.empty(16, dtype=np.uint8)
    tmp = np.empty(16, dtype=np.uint8)
    for t in range(n):
        for i in range(16):
            s[i] = blocks[t, i] ^ round_keys[rounds, i]
        for r in range(rounds, 0, -1):
            if r < rounds:
                m = inv_mixes[r - 1]
                for c in range(4):
                    for i in range(4):
                        acc = np.uint8(0)
                        for j in range(4):
                            acc ^= mul[m[i, j], s[4 * c + j]]
                        tmp[4 * c + i] = acc
            else:
                for i in range(16):
                    tmp[i] = s[i]
            for i in range(16):
                s[i] = inv_sbox[tmp[inv_shift[i]]] ^ round_keys[r - 1, i]
        for i in range(16):
            out[t, i] = s[i]
    return out


def _mix_numpy(state, m, mul):
    cols = state.reshape(-1, 4, 4)  # [block, column, row]
    prod = mul[m[None, None, :, :], cols[:, :, None, :]]
    return np.bitwise_xor.reduce(prod, axis=3).reshape(-1, 16)


def spn_encrypt_numpy(blocks, round_keys, sbox, mixes, mul, shift, trace):
    rounds = round_keys.shape[0] - 1
    states = np.empty((blocks.shape[0], rounds, 16), dtype=np.uint8)
    s = blocks ^ round_keys[0]
    for r in range(1, rounds + 1):
        s = sbox[s[:, shift]]
        if r < rounds:
            s = _mix_numpy(s, mixes[r - 1], mul)
        s = s ^ round_keys[r]
        if trace or r == rounds:
            states[:, r - 1] = s
    return states


def spn_decrypt_numpy(blocks, round_keys, inv_sbox, inv_mixes, mul, inv_shift):
    rounds = round_keys.shape[0] - 1
    s = blocks ^ round_keys[rounds]
    for r in range(rounds, 0, -1):
        if r < rounds:
            s = _mix_numpy(s, inv_mixes[r - 1], mul)
        s = inv_sbox[s[:, inv_shift]] ^ round_keys[r - 1]
    return s


spn_encrypt_numba = _jit(_spn_encrypt_loops)
spn_decrypt_numba = _jit(_spn_decrypt_loops)


def spn_encrypt(blocks, round_keys, sbox, mixes, mul, trace=False):
    """Encrypt ``(N, 16)`` blocks; returns the ``(N, rounds, 16)`` round states.

    Only the last slot is filled unless ``trace`` is set.  ``mixes`` holds
    one 4x4 matrix per non-final round.
    """
    args = (
        np.ascontiguousarray(blocks, dtype=np.uint8),
        np.ascontiguousarray(round_keys, dtype=np.uint8),
        np.ascontiguousarray(sbox, dtype=np.uint8),
        np.ascontiguousarray(mixes, dtype=np.uint8).reshape(-1, 4, 4),
        mul,
        SHIFT_ROWS,
        bool(trace),
    )
    if USE_NUMBA:
        return spn_encrypt_numba(*args)
    return spn_encrypt_numpy(*args)


def spn_decrypt(blocks, round_keys, inv_sbox, inv_mixes, mul):
    args = (
        np.ascontiguousarray(blocks, dtype=np.uint8),
        np.ascontiguousarray(round_keys, dtype=np.uint8),
        np.ascontiguousarray(inv_sbox, dtype=np.uint8),
        np.ascontiguousarray(inv_mixes, dtype=np.uint8).reshape(-1, 4, 4),
        mul,
        INV_SHIFT_ROWS,
    )
    if USE_NUMBA:
        return spn_decrypt_numba(*args)
    return spn_decrypt_numpy(*args)
