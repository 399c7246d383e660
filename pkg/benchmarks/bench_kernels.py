"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each workload is one of the sweeps the test suite runs.  The numba column
is measured after a warm-up call so JIT compilation is excluded.  Both
paths must return identical arrays; a mismatch aborts the run.
"""

import argparse
import time
from itertools import product

import numpy as np

from dynmds import _kernels as K
from dynmds.fixtures import theorem_seeds
from dynmds.gfield import DEFAULT_FIELD, FieldSpec, inv_table, mul_table
from dynmds.matrix import mat_scalar_mul
from dynmds.mds import minor_stack, nonzero_vectors
from dynmds.spn import AES_SBOX, key_schedule


def workloads():
    mul, inv = mul_table(DEFAULT_FIELD), inv_table(DEFAULT_FIELD)

    # every k x k minor of every scaled seed, k = 1..4
    minors = []
    for seed in theorem_seeds().values():
        stack = np.array([mat_scalar_mul(seed, e).to_array() for e in range(1, 256)])
        for k in range(1, 5):
            minors.append(minor_stack(stack, k).reshape(-1, k, k))
    by_k = {k: np.concatenate([m for m in minors if m.shape[-1] == k]) for k in range(2, 5)}

    rng = np.random.default_rng(0)
    rand4 = rng.integers(0, 256, size=(10_000, 4, 4), dtype=np.uint8)

    gf16 = FieldSpec(4, 0b10011)
    all2x2 = np.array(list(product(range(16), repeat=4)), dtype=np.uint8).reshape(-1, 2, 2)
    vecs = nonzero_vectors(gf16, 2)

    blocks = rng.integers(0, 256, size=(10_000, 16), dtype=np.uint8)
    keys = key_schedule(b"bench", 8)
    mixes = np.repeat(theorem_seeds()["aes-circulant"].to_array()[None], 7, axis=0)

    return {
        "det 4x4 minors (closure sweep)": (K.det_batch_numpy, K.det_batch_numba, (by_k[4], mul, inv)),
        "det 3x3 minors (closure sweep)": (K.det_batch_numpy, K.det_batch_numba, (by_k[3], mul, inv)),
        "det 10k random 4x4": (K.det_batch_numpy, K.det_batch_numba, (rand4, mul, inv)),
        "branch numbers 65,536 2x2/GF(16)": (
            K.branch_numbers_numpy, K.branch_numbers_numba, (all2x2, vecs, mul_table(gf16))),
        "SPN encrypt 10k blocks, traced": (
            K.spn_encrypt_numpy, K.spn_encrypt_numba, (blocks, keys, AES_SBOX, mixes, mul, K.SHIFT_ROWS, True)),
    }


def best_of(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'workload':<36} {'numpy (ms)':>11} {'numba (ms)':>11} {'speedup':>8}")
    for name, (np_fn, nb_fn, fargs) in workloads().items():
        nb_fn(*fargs)  # JIT warm-up
        t_np, out_np = best_of(np_fn, fargs, args.repeat)
        t_nb, out_nb = best_of(nb_fn, fargs, args.repeat)
        if not np.array_equal(out_np, out_nb):
            raise SystemExit(f"{name}: numba and numpy results differ")
        print(f"{name:<36} {t_np * 1e3:>11.2f} {t_nb * 1e3:>11.2f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
