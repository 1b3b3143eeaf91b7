"""Command-line entry point.

Exit codes: 0 when everything checks out, 1 on a mismatch or failed
self-test, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from .character_group import CharacterGroup, DelsarteMatrix, betti2, hodge11, lefschetz
from .exact_arith import SingularMatrixError
from .formula_table import (
    default_threads,
    find_maximal,
    load_table,
    match_catalog,
    verify_all,
)
from .hodge_classes import DEFAULT_MAX_ORDER, EXCEPTIONAL_COUNT, census, format_exceptional, sorted_exceptional
from .surface_catalog import classify_surfaces, format_row

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print(text)


def parse_matrix(text: str) -> DelsarteMatrix:
    """Rows separated by ';', entries by ',' or whitespace."""
    try:
        rows = [[int(a) for a in r.replace(",", " ").split()] for r in text.split(";") if r.strip()]
    except ValueError:
        raise InputError(f"matrix entries must be integers: {text!r}") from None
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise InputError("matrix must be 4x4")
    try:
        return DelsarteMatrix.from_rows(rows)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_picard(args) -> int:
    if args.matrix:
        A = parse_matrix(args.matrix)
        if args.n is not None and args.n != A.degree:
            raise InputError(f"matrix has degree {A.degree}, not {args.n}")
        label = "matrix"
    else:
        if args.case is None or args.n is None:
            raise InputError("picard needs --case and --n, or --matrix")
        table = load_table()
        if args.case not in table.entries:
            raise InputError(f"unknown case {args.case}")
        if args.n < 5:
            raise InputError("catalog degree must be at least 5")
        try:
            A = table[args.case].surface.matrix(args.n)
        except SingularMatrixError as exc:
            raise InputError(str(exc)) from None
        label = f"case {args.case}"
    n = A.degree
    t0 = time.perf_counter()
    G = CharacterGroup.build(A)
    lam = lefschetz(A, G)
    cen = census(A, G, args.max_order)
    rho = betti2(n) - lam
    try:
        h11 = hodge11(n)
    except ArithmeticError:
        h11 = None
    data = {
        "surface": label, "n": n, "L": cen.L, "L0": cen.L0, "L0_or_D": cen.L0_or_D,
        "D": cen.D, "R": cen.R, "I": cen.I, "lambda": lam, "b2": betti2(n), "rho": rho,
        "h11": h11, "maximal": rho == h11, "seconds": round(time.perf_counter() - t0, 3),
    }
    text = "\n".join(f"{k:>9}: {v}" for k, v in data.items())
    _emit(args, text, data)
    return EXIT_OK


def cmd_classify(args) -> int:
    cands, pruned, final = classify_surfaces()
    table = load_table()
    matched = match_catalog(final, table)
    counts = {"candidates": len(cands), "pruned": len(pruned), "final": len(final)}
    ok = counts == {"candidates": 2401, "pruned": 90, "final": 83} and len(matched) == 83
    catalog = [
        {"case": cid, "rows": [format_row(r) for r in table[cid].surface.rows],
         "equation": table[cid].surface.equation()}
        for cid in sorted(matched)
    ]
    lines = [f"candidates {counts['candidates']}", f"after prune/dedup {counts['pruned']}",
             f"final {counts['final']}"]
    lines += [f"{c['case']:>3}  {c['equation']}" for c in catalog]
    _emit(args, "\n".join(lines), {"counts": counts, "catalog": catalog})
    if args.emit:
        Path(args.emit).write_text(
            "".join(f"{c['case']}\t{'; '.join(c['rows'])}\n" for c in catalog), encoding="utf-8")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_verify(args) -> int:
    if args.n_from < 5 or args.n_to < args.n_from:
        raise InputError("need 5 <= n-from <= n-to")
    table = load_table()
    cases = args.case or None
    if cases and any(c not in table.entries for c in cases):
        raise InputError(f"unknown case in {cases}")
    rep = verify_all(range(args.n_from, args.n_to + 1), cases, args.threads, args.budget, table)
    data = {
        "results": [{"case": r.label, "n": r.n, "computed": r.computed, "formula": r.formula,
                     "match": r.match} for r in rep.results],
        "mismatches": len(rep.mismatches),
        "untested": [{"case": c.case_id, "term": str(c.term)} for c in rep.untested()],
        "failed_terms": [{"case": c.case_id, "term": str(c.term), "n": c.failed_at} for c in rep.failed_terms()],
        "seconds": round(rep.seconds, 1),
    }
    lines = [f"checked {len(rep.results)} (case, n) pairs in {rep.seconds:.1f}s"]
    lines += [f"MISMATCH case {r.label} n={r.n}: computed {r.computed}, formula {r.formula}"
              for r in rep.mismatches]
    lines += [f"untested case {c.case_id}: {c.term}" for c in rep.untested()]
    lines += [f"term failed case {c.case_id}: {c.term} ({c.status})" for c in rep.failed_terms()]
    lines.append("all match" if rep.ok else f"{len(rep.mismatches)} mismatches")
    _emit(args, "\n".join(lines), data)
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_exceptional(args) -> int:
    t0 = time.perf_counter()
    vecs = sorted_exceptional(args.max_order)
    if args.emit:
        Path(args.emit).write_text(format_exceptional(vecs), encoding="utf-8")
    data = {"max_order": args.max_order, "count": len(vecs), "seconds": round(time.perf_counter() - t0, 1)}
    _emit(args, f"{len(vecs)} exceptional vectors (orders <= {args.max_order})", data)
    if args.max_order == DEFAULT_MAX_ORDER and len(vecs) != EXCEPTIONAL_COUNT:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_maximal(args) -> int:
    if args.n_max < args.n_min or args.n_min < 5:
        raise InputError("need 5 <= n-min <= n-max")
    hits = find_maximal(range(args.n_min, args.n_max + 1))
    data = [{"surface": h.label, "n": h.n, "rho": h.rho, "equation": h.equation} for h in hits]
    text = "\n".join(f"n={h.n:<3} rho={h.rho:<4} {h.equation}  (case {h.label})" for h in hits)
    _emit(args, text or "no maximal surfaces", data)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delsarte", description="Picard numbers of Delsarte surfaces.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--threads", type=int, default=None,
                        help="worker processes (default: DELSARTE_THREADS or CPU count)")
    common.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER,
                        help="largest order searched for exceptional classes")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("picard", parents=[common], help="rho of one surface")
    s.add_argument("--case", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--matrix", help="exponent rows, e.g. '6,0,0,0;0,6,0,0;0,0,6,0;0,0,0,6'")
    s.set_defaults(func=cmd_picard)

    s = sub.add_parser("classify", parents=[common], help="run the surface classification")
    s.add_argument("--emit", help="write the catalog to this file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("verify", parents=[common], help="check the formula table against direct counts")
    s.add_argument("--n-from", type=int, default=6)
    s.add_argument("--n-to", type=int, default=36)
    s.add_argument("--case", type=int, action="append", help="restrict to a case (repeatable)")
    s.add_argument("--budget", type=int, default=54,
                   help="largest n used to reach delta terms not triggered in the window")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("exceptional", parents=[common], help="build the exceptional set")
    s.add_argument("--emit", help="write one vector per line to this file")
    s.set_defaults(func=cmd_exceptional)

    s = sub.add_parser("maximal", parents=[common], help="search for surfaces with rho = h11")
    s.add_argument("--n-min", type=int, default=5)
    s.add_argument("--n-max", type=int, default=12)
    s.set_defaults(func=cmd_maximal)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.threads is None:
        args.threads = default_threads()
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
