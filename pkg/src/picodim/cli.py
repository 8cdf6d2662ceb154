"""Command-line front end: ``picodim <command> ...``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage or schema error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

import mpmath

from .algebra import (DEFAULT_PRIMES, SchemaError, algebra_from_json, build_W, check_grading,
                      check_simple, check_unit)
from .cache import ResultCache
from .codim import BudgetExceeded, codim
from .exponent import (ExponentError, cubic_estimate, erratum_note, exp_estimate,
                       lagrange_estimate, numeric_maximize)
from .freepoly import WITNESS_NAMES, evaluate_witness
from .phi import (check_eq0, check_lemma7, check_lemma7a, check_push_down_monotone,
                  necessary_ok, phi_any, phi_point, sandwich, sufficient_ok, weight)
from .symfunc import (KlmtDecomposition, colength, colength_bound, decompose_klmt, hook_degree,
                      lemma4_failures, lemma4_witness, multiplicities, partitions)
from .verify import verify_paper, w_structure_mismatches

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_algebra_file(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return algebra_from_json(data)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from None


def _algebra(args):
    if getattr(args, "file", None):
        return parse_algebra_file(args.file)
    if args.spec != "W":
        raise UsageError(f"unknown built-in algebra {args.spec!r} (only W)")
    return build_W()


def _primes(text: str) -> tuple:
    try:
        primes = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"bad prime list {text!r}") from None
    return primes


def _partition(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(" ", ",").split(",") if x)
    except ValueError:
        raise UsageError(f"bad partition {text!r}") from None


def _degrees(text: str) -> list:
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _emit_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=1, default=str)
    sys.stdout.write("\n")


# --- commands ---------------------------------------------------------------------

def cmd_algebra(args) -> int:
    A = _algebra(args)
    result = {"digest": A.digest(), "dim": A.dim, "simple": check_simple(A)}
    if A.unit_index is not None:
        result["unit"] = check_unit(A, A.basis(A.unit_index))
    if A.grades is not None:
        result["grading"] = check_grading(A, A.grades)
    if A.dim == 4 and not args.file:
        result["matches_W_rules"] = not w_structure_mismatches(A)
    ok = all(v for k, v in result.items() if isinstance(v, bool))
    if args.json:
        _emit_json(dict(result, passed=ok))
    else:
        for k, v in result.items():
            print(f"{k:16} {v}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_codim(args) -> int:
    A = _algebra(args)
    cache = None if args.no_cache else ResultCache(args.cache_dir, force=args.force)
    results = [codim(A, n, _primes(args.primes), override=args.override, cache=cache)
               for n in _degrees(args.n)]
    if args.json:
        _emit_json([{"n": r.n, "c_n": r.c_n, "rank_per_prime": r.rank_per_prime,
                     "consensus": r.consensus, "method_notes": r.method_notes,
                     "seconds": r.seconds} for r in results])
    elif args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(["n", "c_n", "prime1_rank", "prime2_rank", "seconds"])
        for r in results:
            ranks = list(r.rank_per_prime.values())
            w.writerow([r.n, r.c_n, ranks[0], ranks[1], f"{r.seconds:.3f}"])
    else:
        for r in results:
            print(f"c_{r.n} = {r.c_n}   ranks {r.rank_per_prime}   {r.seconds:.2f}s")
            print(f"  {r.method_notes}")
    return EXIT_OK if all(r.consensus for r in results) else EXIT_FAIL


def cmd_cochar(args) -> int:
    A = _algebra(args)
    dec = multiplicities(A, args.n, _primes(args.primes), override=args.override)
    rows = [(lam, m, hook_degree(lam), m * hook_degree(lam)) for lam, m in dec.mult.items() if m]
    nonzero = dec.nonzero()
    necessary = all(necessary_ok(lam) for lam in nonzero)
    sufficient = all(dec.mult.get(lam, 0) >= 1 for lam in partitions(args.n, max_len=4)
                 if not lemma4_failures(decompose_klmt(lam)))
    col = colength(dec)
    bound_ok = col <= colength_bound(A.dim, args.n)
    if args.json:
        _emit_json({"n": args.n, "multiplicities": {",".join(map(str, l)): m for l, m, _, _ in rows},
                    "degree_sum": dec.degree_sum(), "colength": col, "colength_bound_ok": bound_ok,
                    "necessary_condition_ok": necessary, "sufficient_condition_ok": sufficient})
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["lambda", "m", "deg", "contribution"])
        for lam, m, deg, c in rows:
            w.writerow([" ".join(map(str, lam)), m, deg, c])
        if not args.csv:
            print(f"# degree sum {dec.degree_sum()}, colength {col}, "
                  f"necessary {necessary}, sufficient {sufficient}", file=sys.stderr)
    return EXIT_OK if necessary and sufficient and bound_ok else EXIT_FAIL


def cmd_witness(args) -> int:
    A = _algebra(args)
    if args.name:
        value = evaluate_witness(args.name, A)
        report = {"name": args.name, "coordinates": [str(c) for c in value.coeffs],
                  "nonzero": not value.is_zero()}
    else:
        if None in (args.k, args.l, args.m, args.t):
            raise UsageError("give a witness name or all of --k --l --m --t")
        dec = KlmtDecomposition(args.k, args.l, args.m, args.t)
        bad = lemma4_failures(dec)
        if bad:
            raise UsageError("; ".join(bad))
        _, report = lemma4_witness(dec, A)
    ok = report["nonzero"] and report.get("e0_is_unit", True)
    if args.json:
        _emit_json(dict(report, passed=ok))
    else:
        for k, v in report.items():
            print(f"{k:16} {v}")
        print("verdict          " + ("nonzero" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_phi(args) -> int:
    if args.point:
        x = [mpmath.mpf(v) for v in args.point.split(",")]
        out = {"point": args.point, "phi": mpmath.nstr(phi_point(x), 15)}
    else:
        lam = _partition(args.partition)
        out = {"lambda": list(lam), "phi": mpmath.nstr(phi_any(lam), 15),
               "necessary_ok": necessary_ok(lam)}
        if len(lam) <= 4:
            out.update(weight=weight(lam), sufficient_ok=sufficient_ok(lam),
                       klmt=list(vars(decompose_klmt(lam)).values()))
    if args.json:
        _emit_json(out)
    else:
        for k, v in out.items():
            print(f"{k:14} {v}")
    return EXIT_OK


_BOUND_CHECKS = {
    "eq0": check_eq0,
    "lemma7": check_lemma7,
    "lemma7a": check_lemma7a,
    "monotone": check_push_down_monotone,
}


def cmd_bounds(args) -> int:
    names = args.check.split(",")
    unknown = [c for c in names if c not in _BOUND_CHECKS]
    if unknown:
        raise UsageError(f"unknown check(s) {unknown}; choose from {sorted(_BOUND_CHECKS)}")
    found = {}
    for n in _degrees(args.n):
        for name in names:
            found[f"{name}@{n}"] = _BOUND_CHECKS[name](n)
    if args.json:
        _emit_json({k: {"violations": len(v), "examples": v[:5]} for k, v in found.items()})
    else:
        for k, v in found.items():
            print(f"{k:16} {len(v)} violations" + (f"  e.g. {v[0]}" if v else ""))
    return EXIT_FAIL if any(found.values()) else EXIT_OK


def cmd_sandwich(args) -> int:
    out = sys.stdout if args.out in (None, "-", "csv") else open(args.out, "w", newline="")
    ok = True
    try:
        out.write("n,b_weight0,a_upper,argmax_b,argmax_a\n")
        for n in range(args.start, args.stop + 1, args.step):
            row = sandwich(n)
            ok &= bool(row.b_weight0 <= row.a_upper)
            out.write(row.as_csv() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_exponent(args) -> int:
    if args.method == "all":
        try:
            rep = exp_estimate(sandwich_n=None if args.no_sandwich else 6000)
        except ExponentError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAIL
        ok = max(rep["pairwise_differences"].values()) <= args.tol
    else:
        est = {"cubic": cubic_estimate, "lagrange": lagrange_estimate,
               "numeric": numeric_maximize}[args.method]()
        rep = dict(est.to_json(), erratum=erratum_note())
        ok = all(float(r) <= args.tol for r in est.residuals.values())
    if args.json:
        _emit_json(dict(rep, passed=ok))
    else:
        print(f"exp(W) = {rep['value']}")
        for e in rep.get("estimates", []):
            print(f"  {e['method']:9} {e['value']}")
        if "sandwich" in rep:
            s = rep["sandwich"]
            print(f"  sandwich n={s['n']}: [{s['b_weight0']}, {s['a_upper']}]")
        print("note: " + rep["erratum"]["text"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    A = parse_algebra_file(args.file) if args.file else None
    cache = ResultCache(args.cache_dir) if args.deep else None
    report = verify_paper(A, deep=args.deep, cache=cache)
    if args.json:
        _emit_json(report.to_json())
    else:
        print("\n".join(report.lines()))
        print("ALL PASS" if report.passed else "FAILED")
    return report.exit_code


# --- parser -----------------------------------------------------------------------

def _add_algebra_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--spec", default="W", help="built-in algebra (default W)")
    g.add_argument("--file", help="algebra JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="picodim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    default_primes = ",".join(map(str, DEFAULT_PRIMES))

    p = sub.add_parser("algebra", help="structural checks of an algebra")
    p.add_argument("action", choices=["verify"])
    _add_algebra_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("codim", help="codimensions c_n")
    p.add_argument("--n", required=True, help="degree, list 1,2,3 or range 1-5")
    _add_algebra_args(p)
    p.add_argument("--primes", default=default_primes)
    p.add_argument("--force", action="store_true", help="recompute even if cached")
    p.add_argument("--override", action="store_true", help="ignore the size budget")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--no-cache", action="store_true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_codim)

    p = sub.add_parser("cochar", help="cocharacter multiplicities")
    p.add_argument("--n", type=int, required=True)
    _add_algebra_args(p)
    p.add_argument("--primes", default=default_primes)
    p.add_argument("--override", action="store_true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_cochar)

    p = sub.add_parser("witness", help="evaluate a witness or the (k,l,m,t) product")
    p.add_argument("name", nargs="?", choices=WITNESS_NAMES)
    for c in "klmt":
        p.add_argument(f"--{c}", type=int)
    _add_algebra_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("phi", help="Phi of a partition or a point")
    p.add_argument("partition", nargs="?", help="e.g. 3,1,1,1")
    p.add_argument("--point", help="x1,x2,x3,x4 summing to 1")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("bounds", help="exhaustive inequality checks")
    p.add_argument("--n", required=True, help="degree, list or range")
    p.add_argument("--check", default="eq0,lemma7,lemma7a")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sandwich", help="b_weight0(n) and a_upper(n) as CSV")
    p.add_argument("--from", dest="start", type=int, default=6)
    p.add_argument("--to", dest="stop", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--out", default="-", help="output path, or - / csv for stdout")
    p.set_defaults(func=cmd_sandwich)

    p = sub.add_parser("exponent", help="exp(W) by three methods")
    p.add_argument("--method", choices=["cubic", "lagrange", "numeric", "all"], default="all")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--no-sandwich", action="store_true", help="skip the n=6000 cross-check")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("verify-paper", help="run the full acceptance suite")
    p.add_argument("--deep", action="store_true", help="add c_6 with two-prime consensus")
    p.add_argument("--file", help="run against an algebra JSON file instead of W")
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "phi" and not (args.partition or args.point):
        parser.error("phi needs a partition or --point")
    try:
        return args.func(args)
    except (SchemaError, UsageError, BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
