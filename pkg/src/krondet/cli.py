"""``krondet`` command line: compute | verify | expand | generate | bench.

Exit codes: 0 pass, 1 verification failure, 2 parse error, 3 validation
error, 4 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import bench as bench_mod
from . import instance_io
from .closed_form import bareiss_det, closed_form_det, lu_sign_log_det
from .core import ModeError, ResourceError, ScalarMode, ShapeError, VerificationError
from .dense_oracle import DENSE_CAP_ENV
from .generator import Profile, random_instance
from .proof_expansion import (DEFAULT_TUPLE_LIMIT, assemble_c_diag, b_columns_det,
                              c_diag_det, enumerate_gamma, full_leibniz_check,
                              sum_block_diagonal, tuple_count, y_power_identity)
from .verify import Corruption, verify_instance

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3, 4
CHECKS = ("detb", "cdiag", "sumdiag", "ypower", "full-leibniz")


class _Usage(Exception):
    pass


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", nargs="?", help="instance JSON file (omit to generate)")
    p.add_argument("--N", type=int, default=3, help="number of terms (generated instances)")
    p.add_argument("--F", type=int, default=2, help="size of each A matrix (generated instances)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--profile", type=str.upper, default=None,
                   choices=[pr.value for pr in Profile])
    p.add_argument("--mode", choices=[m.value for m in ScalarMode], default=None)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")


def _mode(args, fallback: ScalarMode | None) -> ScalarMode | None:
    return ScalarMode(args.mode) if args.mode else fallback


def _load(args, seed: int | None = None, default_profile: Profile = Profile.UNIFORM,
          default_mode: ScalarMode | None = None):
    if args.instance:
        return instance_io.load(args.instance, _mode(args, default_mode) or ScalarMode.FLOAT)
    profile = Profile(args.profile) if args.profile else default_profile
    return random_instance(args.N, args.F, args.seed if seed is None else seed, profile,
                           _mode(args, default_mode))


def _jsonable(v):
    return str(v) if isinstance(v, Fraction) else v


def cmd_compute(args) -> int:
    inst = _load(args)
    bd = closed_form_det(inst)
    report = {"mode": inst.mode.value, "N": inst.N, "F": inst.F, **bd.to_dict()}
    if args.json:
        print(json.dumps(report, indent=2))
        return EXIT_OK
    t = bd.total
    print(f"mode        {inst.mode.value}")
    print(f"N, F        {inst.N}, {inst.F}")
    print(f"sign        {t.sign:+d}")
    print(f"log_abs     {'undefined' if t.is_zero else repr(t.log_abs)}")
    print(f"value       {report['value']}" + ("  [overflow]" if report["overflow"] else "")
          + ("  [underflow]" if report["underflow"] else ""))
    for n, d in enumerate(bd.detA, start=1):
        print(f"det A[{n}]    sign {d.sign:+d}  log_abs {d.log_abs!r}")
    print(f"det X       sign {bd.detX.sign:+d}  log_abs {bd.detX.log_abs!r}")
    print(f"det Y       sign {bd.detY.sign:+d}  log_abs {bd.detY.log_abs!r}")
    if bd.zero_factors():
        print(f"zero factors: {', '.join(bd.zero_factors())}")
    return EXIT_OK


def _parse_corrupt(text: str) -> Corruption:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise _Usage("--debug-corrupt expects ROW,COL[,DELTA]")
    delta = Fraction(parts[2]) if len(parts) == 3 else Fraction(1)
    return Corruption(int(parts[0]), int(parts[1]), delta)


def cmd_verify(args) -> int:
    corrupt = _parse_corrupt(args.debug_corrupt) if args.debug_corrupt else None
    seeds = [None] if args.instance else range(args.seed, args.seed + args.seeds)
    reports = []
    for s in seeds:
        inst = _load(args, seed=s)
        label = args.instance or f"N={inst.N} F={inst.F} seed={s}"
        reports.append(verify_instance(inst, cap=args.cap, corrupt=corrupt, label=label))
    failed = [r for r in reports if not r.passed]
    if args.json:
        print(json.dumps({"reports": [r.to_dict() for r in reports],
                          "passed": len(reports) - len(failed), "failed": len(failed)}, indent=2))
    else:
        for r in reports:
            d = r.to_dict()
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.label}  closed={d['closed_form_value']}"
                  f"  dense={d['dense_value']}  |dlog|={d['log_diff']}  |d|={d['abs_diff']}")
        print(f"{len(reports) - len(failed)}/{len(reports)} passed")
    return EXIT_FAIL if failed else EXIT_OK


def _run_check(name: str, inst, limit: int) -> tuple[bool, int, str]:
    """Returns (passed, enumerated count, detail)."""
    N, F = inst.N, inst.F
    try:
        if name == "detb":
            perms = [g.gammas[0] for g in enumerate_gamma(N, 1, limit)]
            for g in perms:
                b_columns_det(inst, g)
            return True, len(perms), "direct == prod(Y) * det(X) * sgn"
        if name == "cdiag":
            count = 0
            exact = inst.mode is ScalarMode.EXACT
            for gamma in enumerate_gamma(N, F, limit):
                contrib = c_diag_det(inst, gamma).total
                M = assemble_c_diag(inst, gamma)
                direct = bareiss_det(M) if exact else lu_sign_log_det(M).value().value
                ok = contrib == direct if exact else abs(contrib - direct) <= 1e-9 * max(1.0, abs(direct))
                if not ok:
                    return False, count, f"tuple {count} {gamma.one_based()}: {contrib} vs {direct}"
                count += 1
            return True, count, "block products == det(assembled C_diag)"
        if name == "sumdiag":
            s = sum_block_diagonal(inst, limit)
            return True, tuple_count(N, F), f"sum = {_jsonable(s)}"
        if name == "ypower":
            s = y_power_identity(inst.Y, F, limit)
            return True, tuple_count(N, F), f"sum = det(Y)^F = {_jsonable(s)}"
        if name == "full-leibniz":
            lhs, _ = full_leibniz_check(inst)
            return True, math.factorial(inst.size), f"det(G) = {_jsonable(lhs)}"
    except VerificationError as exc:
        return False, 0, str(exc)
    raise _Usage(f"unknown check {name!r}")


def cmd_expand(args) -> int:
    inst = _load(args, default_profile=Profile.INTEGER_SMALL, default_mode=ScalarMode.EXACT)
    names = CHECKS if args.checks == "all" else tuple(c.strip() for c in args.checks.split(","))
    for n in names:
        if n not in CHECKS:
            raise _Usage(f"unknown check {n!r}; choose from {', '.join(CHECKS)}")
    results = []
    for n in names:
        ok, count, detail = _run_check(n, inst, args.limit)
        results.append({"check": n, "passed": ok, "count": count, "detail": detail})
    if args.json:
        print(json.dumps({"mode": inst.mode.value, "N": inst.N, "F": inst.F,
                          "checks": results}, indent=2))
    else:
        for r in results:
            print(f"{'PASS' if r['passed'] else 'FAIL'}  {r['check']:<13} count={r['count']}  {r['detail']}")
    return EXIT_OK if all(r["passed"] for r in results) else EXIT_FAIL


def cmd_generate(args) -> int:
    inst = _load(args)
    text = instance_io.dumps(inst, indent=None if args.compact else 2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = bench_mod.parse_grid(args.grid)
    rows = bench_mod.run_grid(sizes, reps=args.reps, seed=args.seed, cap=args.cap)
    text = (json.dumps([r.as_dict() for r in rows], indent=2) if args.json
            else bench_mod.rows_to_csv(rows).rstrip("\n"))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krondet",
        description="Determinants of sum_n A[n] kron x[n] y[n]^T: closed form, dense oracle, "
                    "and permutation-expansion checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="closed-form determinant with per-factor breakdown")
    _add_source(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="closed form against the dense oracle")
    _add_source(p)
    p.add_argument("--seeds", type=int, default=1, help="sweep this many consecutive seeds")
    p.add_argument("--cap", type=int, default=None,
                   help=f"dense NF cap (default: ${DENSE_CAP_ENV} or 4096)")
    p.add_argument("--debug-corrupt", metavar="ROW,COL[,DELTA]", default=None,
                   help="perturb one entry of G before the dense determinant (negative control)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("expand", help="permutation-expansion identity checks")
    _add_source(p)
    p.add_argument("--checks", default="all", help=f"comma list from {', '.join(CHECKS)} or 'all'")
    p.add_argument("--limit", type=int, default=DEFAULT_TUPLE_LIMIT, help="max tuples enumerated")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("generate", help="write a seeded instance as JSON")
    _add_source(p)
    p.add_argument("--out", default=None)
    p.add_argument("--compact", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="closed form vs dense timing table")
    p.add_argument("--grid", default="4,8,16,32", help="N=F values, or NxF items, comma separated")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except instance_io.InstanceParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ShapeError, ModeError, ValueError) as exc:
        print(f"invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
