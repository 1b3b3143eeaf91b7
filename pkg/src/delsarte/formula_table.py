"""Closed Picard-number formulas for the catalog, and checks against direct counts.

A formula is a quasi-polynomial: a polynomial in n plus delta terms
``(c1*n + c0) * [n mod j in S]``. The shipped table ``data/formulas.txt`` holds
one record per catalog case; see the header of that file for the format.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .character_group import CharacterGroup, betti2, hodge11, lefschetz
from .exact_arith import SingularMatrixError
from .surface_catalog import SingularPoint, SymbolicSurface, format_row, parse_row

CASE_COUNT = 83


class TableParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class DeltaTerm:
    """``(c1*n + c0)`` whenever ``n mod modulus`` lies in ``residues``."""

    coefficient: Tuple[int, int]
    raw_residues: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"delta modulus must be at least 2, got {self.modulus}")
        if not self.raw_residues:
            raise ValueError("delta term needs at least one residue")

    @property
    def residues(self) -> frozenset:
        return frozenset(r % self.modulus for r in self.raw_residues)

    def triggered(self, n: int) -> bool:
        return n % self.modulus in self.residues

    def __call__(self, n: int):
        c1, c0 = self.coefficient
        return (c1 * n + c0) if self.triggered(n) else 0

    def normalized(self) -> "DeltaTerm":
        return DeltaTerm(self.coefficient, tuple(sorted(self.residues)), self.modulus)

    def __str__(self):
        c1, c0 = self.coefficient
        coef = _poly_str([c0, c1])
        if "+" in coef[1:] or "-" in coef[1:]:
            coef = f"({coef})"
        elif coef == "1":
            coef = ""
        elif coef == "-1":
            coef = "-"
        res = ",".join(str(r) for r in self.raw_residues)
        if len(self.raw_residues) > 1:
            res = "{" + res + "}"
        return f"{coef}d[{res};{self.modulus}]"

    def serialize(self) -> str:
        c1, c0 = self.coefficient
        return f"{c1},{c0} | {','.join(str(r) for r in self.raw_residues)} | {self.modulus}"

    @classmethod
    def parse(cls, text: str) -> "DeltaTerm":
        parts = [p.strip() for p in text.split("|")]
        if len(parts) != 3:
            raise ValueError(f"delta term needs 'c1,c0 | residues | modulus': {text!r}")
        c1, c0 = (int(x) for x in parts[0].split(","))
        residues = tuple(int(r) for r in parts[1].split(","))
        return cls((c1, c0), residues, int(parts[2]))


def _poly_str(coeffs) -> str:
    out = ""
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mon = "" if k == 0 else ("n" if k == 1 else f"n^{k}")
        mag = abs(c)
        body = (str(mag) if (mag != 1 or not mon) else "") + mon
        sign = "-" if c < 0 else "+"
        out += (("-" if c < 0 else "") + body) if not out else f"{sign}{body}"
    return out or "0"


@dataclass(frozen=True)
class QuasiPolynomial:
    base: Tuple = (0,)
    terms: Tuple[DeltaTerm, ...] = ()

    def __call__(self, n: int):
        val = sum(c * n**k for k, c in enumerate(self.base))
        return val + sum(t(n) for t in self.terms)

    def moduli(self) -> List[int]:
        return sorted({t.modulus for t in self.terms})

    def __str__(self):
        out = _poly_str(list(self.base))
        for t in self.terms:
            s = str(t)
            out += s if s.startswith("-") else "+" + s
        return out


def evaluate(q: QuasiPolynomial, n: int):
    return q(n)


@dataclass(frozen=True)
class TableEntry:
    case_id: int
    surface: SymbolicSurface
    singular: Tuple[str, ...]
    formula: QuasiPolynomial
    note: str = ""
    degree: Optional[int] = None

    @property
    def label(self) -> str:
        return f"{self.case_id}" if self.degree is None else f"extra-{self.degree}"

    def singular_points(self) -> List[SingularPoint]:
        return [SingularPoint.parse(p) for p in self.singular]


@dataclass
class FormulaTable:
    entries: Dict[int, TableEntry]
    extras: Dict[int, TableEntry]
    header: Tuple[str, ...] = ()

    def __getitem__(self, case_id: int) -> TableEntry:
        return self.entries[case_id]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries[k] for k in sorted(self.entries))


def _record_lines(e: TableEntry) -> List[str]:
    head = f"[case {e.case_id}]" if e.degree is None else f"[extra {e.degree}]"
    lines = [head, "rows = " + "; ".join(format_row(r) for r in e.surface.rows)]
    lines.append(("singular = " + "; ".join(e.singular)).rstrip())
    lines.append("base = " + ",".join(str(c) for c in e.formula.base))
    lines.extend("delta = " + t.serialize() for t in e.formula.terms)
    lines.append(("note = " + e.note).rstrip())
    return lines


def serialize_table(table: FormulaTable) -> str:
    lines = list(table.header)
    for e in table:
        lines.extend(_record_lines(e))
        lines.append("")
    for d in sorted(table.extras):
        lines.extend(_record_lines(table.extras[d]))
        lines.append("")
    return "\n".join(lines)


def parse_table(text: str) -> FormulaTable:
    header: List[str] = []
    entries: Dict[int, TableEntry] = {}
    extras: Dict[int, TableEntry] = {}
    cur: Optional[dict] = None

    def finish(lineno):
        if cur is None:
            return
        for key in ("rows", "base"):
            if key not in cur:
                raise TableParseError(lineno, f"record {cur['head']} has no {key}")
        formula = QuasiPolynomial(tuple(cur["base"]), tuple(cur["delta"]))
        surface = SymbolicSurface(cur["rows"], cur.get("id"), cur.get("degree"))
        entry = TableEntry(cur.get("id") or 0, surface, tuple(cur["singular"]), formula,
                           cur.get("note", ""), cur.get("degree"))
        if cur.get("degree") is None:
            entries[entry.case_id] = entry
        else:
            extras[cur["degree"]] = entry

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, 1):
        if cur is None and not line.startswith("["):
            header.append(line)
            continue
        if line.startswith("["):
            finish(lineno)
            if not line.endswith("]"):
                raise TableParseError(lineno, f"bad record header {line!r}")
            kind, _, ident = line[1:-1].partition(" ")
            try:
                num = int(ident)
            except ValueError:
                raise TableParseError(lineno, f"bad record id {ident!r}") from None
            cur = {"head": line, "delta": [], "singular": []}
            if kind == "case":
                if not 1 <= num <= CASE_COUNT or num in entries:
                    raise TableParseError(lineno, f"unknown or duplicate case id {num}")
                cur["id"] = num
            elif kind == "extra":
                cur["degree"] = num
            else:
                raise TableParseError(lineno, f"unknown record kind {kind!r}")
            continue
        if line == "":
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise TableParseError(lineno, f"expected 'key = value', got {line!r}")
        try:
            if key == "rows":
                rows = tuple(parse_row(r) for r in value.split(";"))
                if len(rows) != 4:
                    raise ValueError("need four monomial rows")
                cur["rows"] = rows
            elif key == "singular":
                cur["singular"] = [p.strip() for p in value.split(";")] if value else []
                for p in cur["singular"]:
                    SingularPoint.parse(p)
            elif key == "base":
                cur["base"] = [int(c) for c in value.split(",")]
            elif key == "delta":
                cur["delta"].append(DeltaTerm.parse(value))
            elif key == "note":
                cur["note"] = value
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise TableParseError(lineno, str(exc)) from None
    finish(len(lines))
    if len(entries) != CASE_COUNT:
        raise TableParseError(len(lines), f"expected {CASE_COUNT} cases, found {len(entries)}")
    return FormulaTable(entries, extras, tuple(header))


def table_text() -> str:
    return resources.files("delsarte").joinpath("data/formulas.txt").read_text(encoding="utf-8")


_TABLE: Optional[FormulaTable] = None


def load_table() -> FormulaTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = parse_table(table_text())
    return _TABLE


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseResult:
    label: str
    n: int
    computed: int
    formula: int
    lefschetz: int
    seconds: float

    @property
    def match(self) -> bool:
        return self.computed == self.formula


def compute_rho(entry: TableEntry, n: int) -> Tuple[int, int]:
    """(rho, lambda) from the character group at degree n."""
    A = entry.surface.matrix(n)
    lam = lefschetz(A, CharacterGroup.build(A))
    return betti2(n) - lam, lam


def verify_case(case_id, n: int, table: Optional[FormulaTable] = None) -> CaseResult:
    table = table or load_table()
    entry = table.extras[n] if case_id == "extra" else table[int(case_id)]
    t0 = time.perf_counter()
    rho, lam = compute_rho(entry, n)
    return CaseResult(entry.label, n, rho, entry.formula(n), lam, time.perf_counter() - t0)


def _verify_task(args):
    case_id, n = args
    return verify_case(case_id, n)


def default_threads() -> int:
    env = os.environ.get("DELSARTE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_tasks(tasks: Sequence[Tuple], threads: Optional[int] = None) -> List[CaseResult]:
    threads = threads or default_threads()
    if threads == 1 or len(tasks) < 2:
        return [_verify_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_verify_task, tasks, chunksize=4))


@dataclass
class TermCoverage:
    case_id: int
    term: DeltaTerm
    verified_at: Optional[int]
    failed_at: Optional[int] = None

    @property
    def status(self) -> str:
        if self.failed_at is not None:
            return f"failed at n={self.failed_at}"
        return "untested" if self.verified_at is None else f"n={self.verified_at}"


@dataclass
class VerificationReport:
    results: List[CaseResult]
    coverage: List[TermCoverage] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def mismatches(self) -> List[CaseResult]:
        return [r for r in self.results if not r.match]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def untested(self) -> List[TermCoverage]:
        return [c for c in self.coverage if c.verified_at is None and c.failed_at is None]

    def failed_terms(self) -> List[TermCoverage]:
        return [c for c in self.coverage if c.failed_at is not None]


def first_trigger(term: DeltaTerm, n_min: int = 6) -> int:
    return min(n_min + (r - n_min) % term.modulus for r in term.residues)


def verify_all(n_range: Iterable[int], cases: Optional[Sequence[int]] = None, threads: Optional[int] = None,
               extra_budget: Optional[int] = None, table: Optional[FormulaTable] = None) -> VerificationReport:
    """Direct rho against the table for every case and every n in ``n_range``.

    Delta terms never triggered inside the window are additionally verified at
    their smallest triggering degree when that degree is at most
    ``extra_budget``; the rest are reported as untested.
    """
    t0 = time.perf_counter()
    table = table or load_table()
    ns = sorted(set(n_range))
    cases = sorted(cases) if cases is not None else sorted(table.entries)
    tasks = {(c, n) for c in cases for n in ns}
    planned: List[Tuple[int, DeltaTerm, Optional[int]]] = []
    for c in cases:
        for term in table[c].formula.terms:
            hit = next((n for n in ns if term.triggered(n)), None)
            if hit is None and extra_budget is not None:
                n0 = first_trigger(term, max(6, ns[0] if ns else 6))
                if n0 <= extra_budget:
                    hit = n0
                    tasks.add((c, n0))
            planned.append((c, term, hit))
    results = run_tasks(sorted(tasks), threads)
    ok = {(int(r.label), r.n) for r in results if r.match}
    coverage = []
    for c, t, _ in planned:
        hits = [n for cc, n in sorted(tasks) if cc == c and t.triggered(n)]
        good = [n for n in hits if (c, n) in ok]
        bad = [n for n in hits if (c, n) not in ok]
        coverage.append(TermCoverage(c, t, good[0] if good else None, None if good or not bad else bad[0]))
    return VerificationReport(results, coverage, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# maximal surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaximalHit:
    label: str
    n: int
    rho: int
    equation: str


def find_maximal(n_range: Iterable[int], table: Optional[FormulaTable] = None) -> List[MaximalHit]:
    """All (surface, n) with rho = h11(n), by direct computation."""
    table = table or load_table()
    hits = []
    for n in sorted(set(n_range)):
        entries = list(table)
        if n in table.extras:
            entries.append(table.extras[n])
        for e in entries:
            try:
                A = e.surface.matrix(n)
            except SingularMatrixError:
                continue
            rho = betti2(n) - lefschetz(A)
            if rho == hodge11(n):
                hits.append(MaximalHit(e.label, n, rho, _instantiate_equation(e.surface, n)))
    return hits


def _instantiate_equation(s: SymbolicSurface, n: int) -> str:
    vars_ = "XYZU"
    monos = []
    for row in s.exponent_rows(n):
        monos.append("".join(v if e == 1 else f"{v}^{e}" for v, e in zip(vars_, row) if e))
    return "+".join(monos)


# ---------------------------------------------------------------------------
# formula discovery
# ---------------------------------------------------------------------------

class DiscoveryError(ValueError):
    pass


def _fit_exact(points: Sequence[Tuple[int, int]], max_degree: int) -> Optional[Tuple[Fraction, ...]]:
    """Lowest-degree polynomial through all points, verified by at least one spare point."""
    k = len(points)
    for deg in range(0, min(max_degree, k - 2) + 1):
        pts = points[: deg + 1]
        coeffs = _interpolate(pts)
        if all(sum(c * x**i for i, c in enumerate(coeffs)) == y for x, y in points):
            return coeffs
    return None


def _interpolate(points) -> Tuple[Fraction, ...]:
    m = len(points)
    coeffs = [Fraction(0)] * m
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xj * basis[t + 1]
            denom *= xi - xj
        for t in range(m):
            coeffs[t] += yi * basis[t] / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _int_or_frac(c: Fraction):
    return int(c) if c.denominator == 1 else c


def _pad(c, k):
    return tuple(c) + (Fraction(0),) * (k - len(c))


def _divisors(P: int) -> List[int]:
    return [d for d in range(2, P + 1) if P % d == 0]


def fit_quasi_polynomial(samples: Mapping[int, int], period_bound: int, max_degree: int = 2) -> QuasiPolynomial:
    """Smallest-period quasi-polynomial reproducing ``samples`` exactly."""
    ns = sorted(samples)
    if len(ns) < 2 * period_bound:
        raise DiscoveryError(f"need at least {2 * period_bound} samples for period bound {period_bound}, "
                             f"got {len(ns)}")
    stubborn: List[int] = []
    for P in range(1, period_bound + 1):
        polys = {}
        stubborn = []
        for r in range(P):
            pts = [(n, samples[n]) for n in ns if n % P == r]
            fit = _fit_exact(pts, max_degree)
            if fit is None:
                stubborn.append(r)
            polys[r] = fit
        if not stubborn:
            return _assemble(polys, P)
    raise DiscoveryError(f"no period <= {period_bound} fits; classes mod {period_bound} that do not "
                         f"stabilize: {stubborn}")


def _assemble(polys: Dict[int, Tuple[Fraction, ...]], P: int) -> QuasiPolynomial:
    width = max(2, max(len(p) for p in polys.values()))
    polys = {r: _pad(p, width) for r, p in polys.items()}
    counts = Counter(polys[r] for r in range(P))
    top = max(counts.values())
    base = next(polys[r] for r in range(P) if counts[polys[r]] == top)
    corr = {}
    for r in range(P):
        diff = tuple(a - b for a, b in zip(polys[r], base))
        if any(diff[2:]):
            raise DiscoveryError(f"class {r} mod {P} differs from the base by a non-affine polynomial")
        corr[r] = (diff[1], diff[0])
    terms: List[Tuple[Tuple, int, int]] = []
    for m in _divisors(P):
        for s in range(m):
            lifts = [r for r in range(P) if r % m == s]
            vals = Counter(corr[r] for r in lifts)
            v, cnt = vals.most_common(1)[0]
            if v == (0, 0):
                continue
            if m == P or 2 * cnt > len(lifts):
                terms.append((v, s, m))
                for r in lifts:
                    corr[r] = (corr[r][0] - v[0], corr[r][1] - v[1])
    merged: Dict[Tuple, List[int]] = {}
    for v, s, m in terms:
        merged.setdefault((v, m), []).append(s)
    delta = tuple(
        DeltaTerm((_int_or_frac(v[0]), _int_or_frac(v[1])), tuple(res), m)
        for (v, m), res in sorted(merged.items(), key=lambda kv: (kv[0][1], kv[1]))
    )
    while len(base) > 1 and base[-1] == 0:
        base = base[:-1]
    return QuasiPolynomial(tuple(_int_or_frac(c) for c in base), delta)


def discover_formula(surface: SymbolicSurface, sample_range: Iterable[int], period_bound: int,
                     max_degree: int = 2) -> QuasiPolynomial:
    """Recover a closed formula for rho(n) from direct computations over ``sample_range``."""
    ns = sorted(set(sample_range))
    if len(ns) < 2 * period_bound:
        raise DiscoveryError(f"window of {len(ns)} degrees is shorter than two periods of {period_bound}")
    samples = {}
    for n in ns:
        A = surface.matrix(n)
        samples[n] = betti2(n) - lefschetz(A)
    return fit_quasi_polynomial(samples, period_bound, max_degree)


# ---------------------------------------------------------------------------
# catalog <-> table
# ---------------------------------------------------------------------------

def match_catalog(surfaces: Sequence[SymbolicSurface], table: Optional[FormulaTable] = None) -> Dict[int, SymbolicSurface]:
    """Pair pipeline survivors with table cases up to coordinate permutation."""
    table = table or load_table()
    by_form = {}
    for e in table:
        key = e.surface.canonical_form()
        if key in by_form:
            raise ValueError(f"cases {by_form[key]} and {e.case_id} are permutations of each other")
        by_form[key] = e.case_id
    out = {}
    for s in surfaces:
        cid = by_form.get(s.canonical_form())
        if cid is None:
            raise ValueError(f"surface {s.equation()} is not in the table")
        if cid in out:
            raise ValueError(f"case {cid} matched twice")
        out[cid] = SymbolicSurface(s.rows, cid)
    return out
