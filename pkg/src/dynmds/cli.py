"""Command-line entry point (``dynmds``).

Exit status: 0 on success, 1 on a domain error (the error class name goes
to stderr), 2 on usage errors.  ``--json`` switches every command to a
JSON object on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import costmodel, fixtures, gfield, mds, spn
from .errors import DynMdsError
from .matrix import Matrix, det_cofactor, det_gauss, format_matrix, load_matrix, mat_scalar_mul, save_matrix

DEFAULT_SEED = 0


def _const(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a constant: {text!r} (use 0x.. hex or decimal)") from None
    if value < 0:
        raise argparse.ArgumentTypeError("constants are nonnegative")
    return value


def _field(text: str) -> gfield.FieldSpec:
    try:
        return gfield.parse_field(text)
    except DynMdsError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _hex_bytes(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {text!r}") from None


def _emit(args, payload: dict, text: str | None = None):
    if args.json:
        print(json.dumps(payload))
    elif text is not None:
        print(text)
    else:
        for k, v in payload.items():
            print(f"{k}: {_plain(v)}")


def _plain(v):
    if isinstance(v, bool):
        return str(v).lower()
    if v is None:
        return "-"
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    return v


def _rows_hex(a: Matrix) -> list[list[str]]:
    return [[f"{x:02X}" for x in a.row(i)] for i in range(a.rows)]


def _matrix_payload(matrix: Matrix, **extra) -> dict:
    return {**extra, "field": str(matrix.spec), "matrix": _rows_hex(matrix)}


def _write_or_print(args, a: Matrix, **extra):
    if args.out:
        save_matrix(a, args.out)
    if args.json:
        print(json.dumps(_matrix_payload(a, **extra)))
    elif not args.out:
        sys.stdout.write(format_matrix(a))


# -- commands -------------------------------------------------------------

def cmd_verify(args):
    a = load_matrix(args.matrix)
    _emit(args, mds.is_mds(a).to_dict())
    return 0


def cmd_derive(args):
    a = load_matrix(args.matrix)
    out = mds.derive_session_matrix(a, args.e)
    _write_or_print(args, out, e=f"0x{args.e:02X}")
    return 0


def cmd_normalize(args):
    a = load_matrix(args.matrix)
    out = mds.normalize_by_pivot(a, args.pivot)
    _write_or_print(args, out, pivot=f"0x{args.pivot:02X}")
    return 0


def cmd_classify(args):
    a = load_matrix(args.matrix)
    _emit(args, {"class": mds.classify(a).value})
    return 0


def cmd_metrics(args):
    a = load_matrix(args.matrix)
    payload = mds.metrics(a).to_dict()
    payload["class"] = mds.classify(a).value
    _emit(args, payload)
    return 0


def cmd_cost(args):
    a = load_matrix(args.matrix)
    _emit(args, costmodel.estimate_generation(a, args.e).to_dict())
    return 0


def _load_fixture_set(name: str) -> dict:
    if name == "default":
        return fixtures.canonical_fixtures()
    # otherwise a directory of *.mat files, classified on load
    paths = sorted(Path(name).glob("*.mat"))
    return {mds.classify(m): m for m in map(load_matrix, paths)}


def cmd_rank(args):
    fx = _load_fixture_set(args.fixtures)
    ranked = costmodel.rank_classes(fx, args.e, require_all=args.fixtures == "default")
    timings = costmodel.time_derivation(fx, args.e) if args.bench else None
    if args.json:
        rows = []
        for r in ranked:
            row = {"rank": r.rank, **r.report.to_dict()}
            if timings:
                row["time_us"] = timings[r.cls] * 1e6
            rows.append(row)
        payload = {"ranking": rows}
        if timings:
            payload["orders_agree"] = costmodel.orders_agree(ranked, timings)
        print(json.dumps(payload))
    else:
        print(costmodel.format_table(ranked, timings))
        if timings:
            print(f"measured order agrees with model: {str(costmodel.orders_agree(ranked, timings)).lower()}")
    return 0


def cmd_find_optimal(args):
    a, b, m = mds.find_optimal_instance(args.field)
    if args.json:
        print(json.dumps(_matrix_payload(m, a=f"0x{a:02X}", b=f"0x{b:02X}")))
    else:
        print(f"a: 0x{a:02X}\nb: 0x{b:02X}")
        sys.stdout.write(format_matrix(m))
    return 0


def _read_descriptor(path: str) -> dict:
    out = {}
    base = Path(path).parent
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sep = "=" if "=" in line else ":"
        key, _, value = line.partition(sep)
        out[key.strip()] = value.strip()
    if "seed-matrix-file" in out:
        out["seed-matrix-file"] = str(base / out["seed-matrix-file"])
    return out


def _session_from_args(args):
    desc = _read_descriptor(args.session) if args.session else {}
    matrix_path = args.matrix or desc.get("seed-matrix-file")
    seed = load_matrix(matrix_path) if matrix_path else fixtures.AES_CIRCULANT
    secret = args.secret_hex if args.secret_hex is not None else bytes.fromhex(desc.get("secret-hex", ""))
    rounds = args.rounds or int(desc.get("rounds", spn.DEFAULT_ROUNDS))
    mode = args.mode or desc.get("mode", "session")
    key = args.key_hex if args.key_hex is not None else bytes.fromhex(desc.get("key-hex", secret.hex()))
    if mode not in spn.MODES:
        raise DynMdsError(f"unknown mode {mode!r}")
    session = spn.session_setup(seed, secret, mode=mode, rounds=rounds)
    return spn.make_params(key, rounds), session


def _read_blocks(path: str) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) % spn.BLOCK_BYTES:
        raise DynMdsError(f"input length {len(data)} is not a multiple of {spn.BLOCK_BYTES}")
    return np.frombuffer(data, dtype=np.uint8).reshape(-1, spn.BLOCK_BYTES)


def _demo(args, decrypt: bool):
    params, session = _session_from_args(args)
    blocks = _read_blocks(args.input)
    out = spn.decrypt_blocks(params, session, blocks) if decrypt else spn.encrypt_blocks(params, session, blocks)
    Path(args.output).write_bytes(out.tobytes())
    _emit(args, {"blocks": int(blocks.shape[0]), "e": f"0x{session.constant_e:02X}", "mode": session.mode, "rounds": params.rounds})
    return 0


def cmd_demo_encrypt(args):
    return _demo(args, decrypt=False)


def cmd_demo_decrypt(args):
    return _demo(args, decrypt=True)


def cmd_avalanche(args):
    if args.secret_hex is None and not args.session:
        args.secret_hex = b"dynmds"
    params, session = _session_from_args(args)
    stats = spn.avalanche_stats(params, session, trials=args.trials, seed=args.seed)
    payload = {"mean": stats.mean, "per_round": [round(float(x), 6) for x in stats.per_round], "trials": stats.trials}
    _emit(args, payload)
    return 0


def selftest(seed: int = DEFAULT_SEED, random_dets: int = 2000) -> dict[str, bool]:
    """Exhaustive field inverse, theorem closure on fixtures, determinant oracles."""
    spec = gfield.DEFAULT_FIELD
    checks = {}
    checks["field_inverse_q8"] = all(
        gfield.gf_mul(spec, x, gfield.gf_inv(spec, x)) == 1 and gfield.gf_inv(spec, x) == gfield.gf_pow(spec, x, 254)
        for x in range(1, 256)
    )
    closure = True
    for seed_matrix in fixtures.theorem_seeds().values():
        s = seed_matrix.spec
        stack = np.array([mat_scalar_mul(seed_matrix, e).to_array() for e in range(1, s.order)])
        closure &= bool(mds.is_mds_stack(stack, s).all())
    checks["theorem_closure"] = closure
    rng = np.random.default_rng(seed)
    gf4 = gfield.FieldSpec(2, 0b111)
    agree = all(
        det_cofactor(m) == det_gauss(m)
        for m in (Matrix.from_rows([[w, x], [y, z]], gf4) for w in range(4) for x in range(4) for y in range(4) for z in range(4))
    )
    for arr in rng.integers(0, 256, size=(random_dets, 4, 4)):
        m = Matrix.from_array(arr)
        agree &= det_cofactor(m) == det_gauss(m)
    checks["determinant_oracles"] = bool(agree)
    return checks


def cmd_selftest(args):
    checks = selftest(args.seed)
    ok = all(checks.values())
    if args.json:
        print(json.dumps({"checks": checks, "passed": ok}))
    else:
        for name, passed in checks.items():
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed for randomized commands")

    p = argparse.ArgumentParser(prog="dynmds", description="Dynamic MDS matrices over GF(2^q).")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, *flags):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        for flag in flags:
            flag(sp)
        return sp

    matrix = lambda sp: sp.add_argument("--matrix", required=True, help="matrix file")
    e_flag = lambda sp: sp.add_argument("--e", type=_const, required=True, help="scaling constant")
    e_opt = lambda sp: sp.add_argument("--e", type=_const, default=0x02, help="scaling constant (default 0x02)")
    out = lambda sp: sp.add_argument("--out", help="write the resulting matrix here")

    def session_flags(sp):
        sp.add_argument("--session", help="session descriptor file")
        sp.add_argument("--matrix", help="seed matrix file (default: AES-style circulant)")
        sp.add_argument("--secret-hex", type=_hex_bytes, help="shared secret as hex")
        sp.add_argument("--key-hex", type=_hex_bytes, help="master key as hex (default: the secret)")
        sp.add_argument("--rounds", type=int, help=f"rounds (default {spn.DEFAULT_ROUNDS})")
        sp.add_argument("--mode", choices=spn.MODES, help="one matrix per session or per round")

    def io_flags(sp):
        sp.add_argument("--in", dest="input", required=True, help="input file of 16-byte blocks")
        sp.add_argument("--out", dest="output", required=True, help="output file")

    add("verify", cmd_verify, "check every square minor", matrix)
    add("derive", cmd_derive, "scale a seed matrix by a nonzero constant", matrix, e_flag, out)
    add("normalize", cmd_normalize, "scale by the inverse of a pivot constant", matrix,
        lambda sp: sp.add_argument("--pivot", type=_const, required=True), out)
    add("classify", cmd_classify, "generation-cost class", matrix)
    add("metrics", cmd_metrics, "ones, distinct constants, bi-regularity", matrix)
    add("cost", cmd_cost, "generation cost estimate", matrix, e_opt)
    add("rank", cmd_rank, "rank fixtures by generation cost", e_opt,
        lambda sp: sp.add_argument("--fixtures", default="default", help="'default' or a directory of .mat files"),
        lambda sp: sp.add_argument("--bench", action="store_true", help="also time derivation on each fixture"))
    add("find-optimal", cmd_find_optimal, "smallest (a, b) making the optimal pattern MDS",
        lambda sp: sp.add_argument("--field", type=_field, default=gfield.DEFAULT_FIELD, help="e.g. gf(2^8,0x11B)"))
    add("demo-encrypt", cmd_demo_encrypt, "toy SPN encryption (NOT FOR PRODUCTION)", session_flags, io_flags)
    add("demo-decrypt", cmd_demo_decrypt, "toy SPN decryption (NOT FOR PRODUCTION)", session_flags, io_flags)
    add("avalanche", cmd_avalanche, "single-bit-flip avalanche statistics", session_flags,
        lambda sp: sp.add_argument("--trials", type=int, default=10_000))
    add("selftest", cmd_selftest, "exhaustive internal consistency checks")
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DynMdsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
