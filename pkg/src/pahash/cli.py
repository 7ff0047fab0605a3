"""Command-line front end: key-file hashing, field search, verification,
bound tables, and benchmarks.

Exit codes: 0 success, 1 usage error, 2 infeasible parameters,
3 a measured quantity violated its theoretical bound.

The tool never generates seed material: hashing requires the seed bits
to be supplied explicitly (file or hex), because their quality is the
caller's security responsibility.
"""

from __future__ import annotations

import argparse
import csv as _csv
import struct
import sys
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .bitlinalg import BitVector, concat, cyclic_convolve_f2
from .facm import NaSearchError, find_na_at_least, is_in_na
from .families import (
    FamilySpec,
    InfeasibleFamilyError,
    evaluate,
    make_f3,
    make_f4,
    make_g,
    make_mt,
    nearest_feasible,
    parse_spec,
    proven_delta_claims,
    serialize_spec,
)
from .security import (
    RegimeParams,
    bound_concat_classical,
    bound_concat_quantum,
    bound_dual_classical,
    bound_dual_dual_concat,
    bound_universal_classical,
    bound_universal_quantum,
    comparison_table,
    dual_delta_conversion,
    extractor_seed_lower_bound_from_log2,
    f4_bound,
    g_bounds,
    penalty_nonuniform,
    seed_lower_bound_dual,
)
from .verify import (
    SeedDistribution,
    empirical_leftover,
    flat_source,
    measure_delta_dual,
    measure_delta_universal,
    theoretical_epsilon_log2,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAIL = 3

KEYFILE_MAGIC = b"PAKEYv01"
KEYFILE_VERSION = 1
_HEADER_FIXED = struct.Struct("<8sIQQQQI")
KEYFILE_HEADER_LEN = 256


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class KeyFileHeader:
    """Fixed 256-byte header in front of the packed output bits."""

    n: int
    m: int
    d: int
    padding: int
    family: FamilySpec
    version: int = KEYFILE_VERSION

    def pack(self) -> bytes:
        record = serialize_spec(self.family).encode()
        fixed = _HEADER_FIXED.pack(
            KEYFILE_MAGIC,
            self.version,
            self.n,
            self.m,
            self.d,
            self.padding,
            len(record),
        )
        blob = fixed + record
        if len(blob) > KEYFILE_HEADER_LEN:
            raise ValueError("family record too long for the fixed header")
        return blob + b"\x00" * (KEYFILE_HEADER_LEN - len(blob))

    @classmethod
    def unpack(cls, blob: bytes) -> "KeyFileHeader":
        if len(blob) < KEYFILE_HEADER_LEN:
            raise ValueError("truncated key-file header")
        magic, version, n, m, d, padding, rec_len = _HEADER_FIXED.unpack(
            blob[: _HEADER_FIXED.size]
        )
        if magic != KEYFILE_MAGIC:
            raise ValueError("bad key-file magic")
        record = blob[_HEADER_FIXED.size : _HEADER_FIXED.size + rec_len].decode()
        header = cls(
            n=n, m=m, d=d, padding=padding, family=parse_spec(record), version=version
        )
        return header


def write_key_file(path: str, header: KeyFileHeader, bits: BitVector):
    if len(bits) != header.m:
        raise ValueError("body must carry exactly m bits")
    with open(path, "wb") as fh:
        fh.write(header.pack())
        fh.write(bits.to_bytes())


def read_key_file(path: str) -> tuple[KeyFileHeader, BitVector]:
    with open(path, "rb") as fh:
        blob = fh.read()
    header = KeyFileHeader.unpack(blob)
    body = blob[KEYFILE_HEADER_LEN:]
    return header, BitVector.from_bytes(body, header.m)


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="pahash", description=__doc__)
    p.add_argument("--version", action="version", version=f"pahash {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    na = sub.add_parser("na", help="search or test valid circulant-field sizes")
    na_sub = na.add_subparsers(dest="na_command", required=True)
    na_find = na_sub.add_parser("find", help="smallest member >= LOWER")
    na_find.add_argument("lower", type=int)
    na_find.add_argument("--count", type=int, default=1, help="list this many members")
    na_find.add_argument("--cap", type=int, default=2_000_000,
                         help="candidate budget per member")
    na_check = na_sub.add_parser("check", help="membership test")
    na_check.add_argument("k", type=int)

    am = sub.add_parser("amplify", help="hash a key file down to m bits")
    am.add_argument("--family", required=True,
                    choices=["mt", "f1", "f2", "f3", "f4", "g"])
    am.add_argument("--in", dest="input", required=True, metavar="PATH")
    am.add_argument("--out", required=True, metavar="PATH")
    am.add_argument("--seed-file", metavar="PATH")
    am.add_argument("--seed-hex", metavar="HEX")
    am.add_argument("--n", type=int, help="input bits (default: whole file)")
    am.add_argument("--m", type=int, required=True, help="output bits requested")
    am.add_argument("--l", type=int, help="intermediate width (family g)")
    am.add_argument("--t", type=float,
                    help="claimed source min-entropy, enables the error report")
    am.add_argument("--seed-minentropy", type=float, metavar="H",
                    help="seed min-entropy; adds the penalized error report")

    be = sub.add_parser("bench", help="timing table and crossover report")
    be.add_argument("--family", default="f1", choices=["mt", "f1", "f2"])
    be.add_argument("--n", required=True,
                    help="comma-separated input lengths in bits")
    be.add_argument("--l", type=int, default=2, help="blocks for f1")
    be.add_argument("--reps", type=int, default=3)
    be.add_argument("--csv", metavar="PATH")

    ve = sub.add_parser("verify", help="measure delta and leftover distance")
    ve.add_argument("--family", required=True, choices=["mt", "f1", "f2", "g"])
    ve.add_argument("--n", type=int)
    ve.add_argument("--m", type=int)
    ve.add_argument("--k", type=int)
    ve.add_argument("--l", type=int)
    ve.add_argument("--seed-minentropy", type=float, metavar="H")
    ve.add_argument("--csv", metavar="PATH")

    bo = sub.add_parser("bounds", help="evaluate the security-bound formulas")
    bo.add_argument("--m", type=int, required=True)
    bo.add_argument("--t", type=float, required=True)
    bo.add_argument("--delta", type=float, default=1.0)
    bo.add_argument("--delta-prime", type=float)
    bo.add_argument("--l", type=float)
    bo.add_argument("--eta", type=float)
    bo.add_argument("--n", type=int)
    bo.add_argument("--d", type=int)
    bo.add_argument("--h", type=float, dest="h")
    bo.add_argument("--csv", metavar="PATH")

    co = sub.add_parser("compare", help="scheme comparison table")
    co.add_argument("--alpha", type=float, required=True)
    co.add_argument("--beta", type=float, required=True)
    co.add_argument("--gamma", type=float, default=1.0)
    co.add_argument("--n", type=int, required=True)
    co.add_argument("--csv", metavar="PATH")

    return p


def _fmt_eps(log2_eps: float) -> str:
    """Linear when printable, 2^x once the exponent leaves float range."""
    if log2_eps > 64.0:
        return "inf"
    if log2_eps < -512.0:
        return f"2^{log2_eps:.6g}"
    return f"{2.0 ** log2_eps:.6g}"


def _print_table(rows: list[list[str]], out=None):
    out = out or sys.stdout
    if not rows:
        return
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


def _write_csv(path: str, rows: list[list[str]]):
    with open(path, "w", newline="") as fh:
        _csv.writer(fh).writerows(rows)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_na(args) -> int:
    if args.na_command == "check":
        print("true" if is_in_na(args.k) else "false")
        return EXIT_OK
    k = args.lower
    for _ in range(args.count):
        found = find_na_at_least(k, max_candidates=args.cap).k
        print(found)
        k = found + 1
    return EXIT_OK


def _read_seed_bits(args, d: int) -> BitVector:
    if (args.seed_file is None) == (args.seed_hex is None):
        raise UsageError("exactly one of --seed-file / --seed-hex is required")
    if args.seed_file is not None:
        with open(args.seed_file, "rb") as fh:
            data = fh.read()
    else:
        data = bytes.fromhex(args.seed_hex)
    if len(data) * 8 < d:
        raise InfeasibleFamilyError(
            f"seed provides {len(data) * 8} bits, family needs {d}"
        )
    return BitVector.from_bytes(data, d)


def _build_amplify_spec(args, n_avail: int) -> tuple[FamilySpec, int]:
    n_req = args.n if args.n is not None else n_avail
    if n_req > n_avail:
        raise InfeasibleFamilyError(
            f"--n {n_req} exceeds the {n_avail} bits available in the input"
        )
    if args.family in ("mt", "f1", "f2"):
        spec, padding = nearest_feasible(args.family, n_req, args.m)
        return spec, padding
    # structured two-stage families: search upward for a feasible n
    for n_try in range(n_req, n_req + 4096):
        try:
            if args.family == "g":
                if args.l is None:
                    raise UsageError("family g requires --l")
                spec = make_g(n_try, args.l, args.m)
            elif args.family == "f3":
                if args.t is None:
                    raise UsageError("family f3 requires --t")
                spec = make_f3(n_try, args.m, int(args.t))
            else:
                if args.t is None:
                    raise UsageError("family f4 requires --t")
                spec = make_f4(n_try, args.m, int(args.t))
            return spec, n_try - n_req
        except InfeasibleFamilyError:
            continue
    raise InfeasibleFamilyError(
        f"no feasible {args.family} family with m={args.m} near n={n_req}"
    )


def _amplify_report(spec: FamilySpec, padding: int, args) -> list[str]:
    lines = [
        f"family:   {serialize_spec(spec)}",
        f"seed:     {spec.d} bits consumed",
        f"padding:  {padding} zero bits appended to the input",
    ]
    claims = proven_delta_claims(spec)
    if claims["dual"] is not None:
        lines.append(f"claim:    {claims['dual']:g}-almost dual universal")
    if claims["universal"] is not None:
        lines.append(f"claim:    {claims['universal']:g}-almost universal")
    if claims["dual"] is None and claims["universal"] is None:
        lines.append("claim:    none (block size is not a valid field size)")
    if args.t is not None:
        try:
            log2_eps, route, delta = theoretical_epsilon_log2(spec, args.t)
        except Exception:
            lines.append("error:    no proven bound for this family")
            return lines
        lines.append(
            f"epsilon:  {_fmt_eps(log2_eps)}  (uniform {spec.d}-bit seed, "
            f"source min-entropy t={args.t:g}, {route} route, delta={delta:g})"
        )
        if args.seed_minentropy is not None:
            h = args.seed_minentropy
            if h > spec.d:
                raise InfeasibleFamilyError(
                    f"seed min-entropy {h:g} exceeds the seed length {spec.d}"
                )
            col = log2_eps + (spec.d - h) / 2.0
            dirp = log2_eps + (spec.d - h)
            lines.append(
                f"epsilon:  {_fmt_eps(col)}  (seed min-entropy h={h:g}, "
                f"collision-route penalty 2^((d-h)/2))"
            )
            lines.append(
                f"epsilon:  {_fmt_eps(dirp)}  (same, via the generic 2^(d-h) penalty)"
            )
    elif args.seed_minentropy is not None:
        lines.append("note:     --seed-minentropy given without --t; no error report")
    return lines


def _cmd_amplify(args) -> int:
    with open(args.input, "rb") as fh:
        data = fh.read()
    n_avail = len(data) * 8
    if n_avail == 0:
        raise InfeasibleFamilyError("input file is empty")
    spec, padding = _build_amplify_spec(args, n_avail)
    n_used = spec.n - padding
    x = concat(
        BitVector.from_bytes(data, n_used), BitVector.zeros(padding)
    )
    seed = _read_seed_bits(args, spec.d)
    out = evaluate(spec, seed, x)
    header = KeyFileHeader(
        n=spec.n, m=spec.m, d=spec.d, padding=padding, family=spec
    )
    write_key_file(args.out, header, out)
    for line in _amplify_report(spec, padding, args):
        print(line)
    print(f"output:   {args.out} ({spec.m} bits)")
    return EXIT_OK


def _bench_spec(family: str, n: int, l: int) -> FamilySpec:
    if family == "mt":
        return make_mt(n, n // 2)
    if family == "f1":
        spec, _ = nearest_feasible("f1", n, max(2, n // l))
        return spec
    spec, _ = nearest_feasible("f2", n, max(1, n // 2))
    return spec


def _cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.n.split(",") if s]
    except ValueError as exc:
        raise UsageError(f"bad --n list: {exc}")
    rng = np.random.default_rng(0)
    rows = [["n_bits", "family", "seconds", "Mbit/s"]]
    prev = None
    for n in sizes:
        spec = _bench_spec(args.family, n, args.l)
        x = BitVector.random(spec.n, rng)
        seed = BitVector.random(spec.d, rng)
        evaluate(spec, seed, x)  # warm the transform path
        best = min(
            _timed(lambda: evaluate(spec, seed, x)) for _ in range(args.reps)
        )
        rate = spec.n / best / 1e6
        rows.append([str(spec.n), serialize_spec(spec), f"{best:.4f}", f"{rate:.2f}"])
        if prev is not None:
            print(f"time ratio vs previous n: {best / prev:.2f}")
        prev = best
    _print_table(rows)
    if args.csv:
        _write_csv(args.csv, rows)

    print()
    print("convolution crossover (seconds per call):")
    cross = [["L", "schoolbook", "fft"]]
    for L in (16, 32, 64, 128, 256, 512):
        a = BitVector.random(L, rng)
        b = BitVector.random(L, rng)
        ts = _timed(lambda: cyclic_convolve_f2(a, b, method="schoolbook"), reps=20)
        tf = _timed(lambda: cyclic_convolve_f2(a, b, method="fft"), reps=20)
        cross.append([str(L), f"{ts / 20:.2e}", f"{tf / 20:.2e}"])
    _print_table(cross)
    return EXIT_OK


def _timed(fn, reps: int = 1) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return time.perf_counter() - t0


def _verify_build_spec(args) -> FamilySpec:
    from .families import make_f1, make_f2

    if args.family == "mt":
        if args.n is None or args.m is None:
            raise UsageError("verify mt requires --n and --m")
        return make_mt(args.n, args.m)
    if args.family == "f1":
        if args.m is None or args.l is None:
            raise UsageError("verify f1 requires --m and --l")
        return make_f1(args.m, args.l)
    if args.family == "f2":
        if args.k is None or args.l is None:
            raise UsageError("verify f2 requires --k and --l")
        return make_f2(args.k, args.l)
    if args.n is None or args.m is None or args.l is None:
        raise UsageError("verify g requires --n, --l and --m")
    return make_g(args.n, args.l, args.m)


def _cmd_verify(args) -> int:
    spec = _verify_build_spec(args)
    if spec.n > 16 or spec.d > 16:
        raise InfeasibleFamilyError(
            "verification is exhaustive; use n and d at most 16"
        )
    claims = proven_delta_claims(spec)
    seed_dist = None
    if args.seed_minentropy is not None:
        h = int(args.seed_minentropy)
        seed_dist = SeedDistribution.restricted_uniform(spec.d, h)

    du = measure_delta_universal(spec, seed_dist)
    dd = measure_delta_dual(spec, seed_dist)
    print(f"family:        {serialize_spec(spec)}")
    print(f"seed law:      min-entropy {du.seed_min_entropy:g} of {spec.d} bits")
    print(f"delta:         {du.delta}  (claim: {claims['universal']})")
    print(f"delta_dual:    {dd.delta}  (claim: {claims['dual']})")

    failed = False
    if seed_dist is None:
        if claims["universal"] is not None and du.delta > claims["universal"]:
            failed = True
        if claims["dual"] is not None and dd.delta > claims["dual"]:
            failed = True

    rows = [["t", "bound", "bound_penalized", "measured", "ok"]]
    for t in range(1, spec.n + 1):
        rep = empirical_leftover(spec, seed_dist, flat_source(spec.n, t, t))
        rows.append(
            [
                str(t),
                f"{rep.bound:.6g}",
                f"{rep.bound_penalized:.6g}",
                f"{float(rep.measured):.6g}",
                "yes" if rep.ok else "NO",
            ]
        )
        failed = failed or not rep.ok
    _print_table(rows)
    if args.csv:
        _write_csv(args.csv, rows)
    if failed:
        print("verification FAILED", file=sys.stderr)
        return EXIT_VERIFY_FAIL
    print("all measured quantities within bounds")
    return EXIT_OK


def _cmd_bounds(args) -> int:
    import math as _math

    from .security import ExtractorBound

    m, t = args.m, args.t
    records: list[ExtractorBound] = []
    rows = [["formula", "epsilon", "notes"]]

    def add(name, value, note=""):
        records.append(
            ExtractorBound(
                formula_id=name,
                n=args.n,
                m=m,
                t=t,
                d=args.d,
                h=args.h,
                delta=max(args.delta, 1.0),
                delta_prime=args.delta_prime,
                eta=args.eta,
                epsilon=value,
                log2_epsilon=_math.log2(value) if value > 0 else float("-inf"),
                notes=note,
            )
        )
        rows.append([name, f"{value:.6g}", note])

    add("universal-classical", bound_universal_classical(args.delta, m, t),
        f"delta={args.delta:g}")
    add("dual-classical", bound_dual_classical(args.delta, m, t),
        f"delta={args.delta:g}")
    add(
        "universal-quantum",
        bound_universal_quantum(args.delta, m, t, args.eta),
        "eta minimized" if args.eta is None else f"eta={args.eta:g}",
    )
    if args.delta_prime is not None and args.l is not None:
        add(
            "concat-classical",
            bound_concat_classical(args.delta, args.delta_prime, m, args.l, t),
            f"delta'={args.delta_prime:g} l={args.l:g}",
        )
        if args.eta is not None:
            add(
                "concat-quantum",
                bound_concat_quantum(
                    args.delta, args.delta_prime, m, args.l, t, args.eta
                ),
                f"delta'={args.delta_prime:g} l={args.l:g} eta={args.eta:g}",
            )
        add(
            "dual-dual-concat",
            bound_dual_dual_concat(args.delta, args.delta_prime, m, t),
            f"delta'={args.delta_prime:g}",
        )
    if args.n is not None:
        if args.l is not None:
            eps_c, eps_q = g_bounds(args.n, args.l, m, t, args.eta)
            add("two-stage-classical", eps_c, f"n={args.n} l={args.l:g}")
            add("two-stage-quantum", eps_q, f"n={args.n} l={args.l:g}")
        if m <= t < args.n:
            add("f4-quantum", f4_bound(args.n, m, t), f"n={args.n}")
        rows.append([
            "seed-floor-dual-family",
            f"{seed_lower_bound_dual(args.n, m, args.delta):.6g}",
            "bits of seed min-entropy",
        ])
        rows.append([
            "dual-delta-conversion",
            f"{dual_delta_conversion(args.delta, args.n, m):.6g}",
            "universality parameter of the dual family",
        ])
        from .security import bound_dual_classical_log2

        log2_eps = min(bound_dual_classical_log2(args.delta, m, t), 0.0)
        rows.append([
            "seed-floor-any-extractor",
            f"{extractor_seed_lower_bound_from_log2(args.n, m, t, log2_eps):.6g}",
            "bits, at the dual-route epsilon",
        ])
    if args.d is not None and args.h is not None:
        if args.h < args.d:
            base = bound_dual_classical(args.delta, m, t)
            add(
                "penalized-collision-route",
                penalty_nonuniform(base, args.d, args.h, "collision"),
                f"d={args.d} h={args.h:g}",
            )
            add(
                "penalized-direct-route",
                penalty_nonuniform(base, args.d, args.h, "direct"),
                f"d={args.d} h={args.h:g}",
            )
        else:
            rows.append(["penalty", "-", "seed at full entropy, no penalty"])
    assert len(records) >= 3  # the records carry the same data as the table
    _print_table(rows)
    if args.csv:
        _write_csv(args.csv, rows)
    return EXIT_OK


def _cmd_compare(args) -> int:
    regime = RegimeParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma, n=args.n)
    rows = [
        [
            "scheme",
            "complexity",
            "h_bits",
            "t_classical",
            "t_quantum",
            "exact",
        ]
    ]
    for r in comparison_table(regime):
        rows.append(
            [
                r.scheme,
                r.complexity,
                f"{r.h_bits:.6g}",
                "-" if r.t_classical_bits is None else f"{r.t_classical_bits:.6g}",
                "-" if r.t_quantum_bits is None else f"{r.t_quantum_bits:.6g}",
                "yes" if (r.h_exact and r.t_exact) else "leading-order",
            ]
        )
    _print_table(rows)
    if args.csv:
        _write_csv(args.csv, rows)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "na":
            return _cmd_na(args)
        if args.command == "amplify":
            return _cmd_amplify(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "compare":
            return _cmd_compare(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"pahash: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleFamilyError, NaSearchError, ValueError) as exc:
        print(f"pahash: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
