import pytest

from delsarte.character_group import hodge11
from delsarte.formula_table import (
    DeltaTerm,
    DiscoveryError,
    QuasiPolynomial,
    TableParseError,
    discover_formula,
    evaluate,
    find_maximal,
    first_trigger,
    fit_quasi_polynomial,
    load_table,
    parse_table,
    serialize_table,
    table_text,
    verify_all,
    verify_case,
)


@pytest.fixture(scope="module")
def table():
    return load_table()


def test_load(table):
    assert len(table) == 83
    assert sorted(table.extras) == [5]
    assert [e.case_id for e in table] == list(range(1, 84))


def test_roundtrip_is_byte_identical(table):
    assert serialize_table(table) == table_text()
    assert serialize_table(parse_table(serialize_table(table))) == table_text()


def test_case26_terms(table):
    terms = {(t.coefficient[1], tuple(sorted(t.residues)), t.modulus) for t in table[26].formula.terms}
    assert (4, (4,), 12) in terms
    assert (32, (22,), 120) in terms


def test_residues_normalized():
    t = DeltaTerm((0, 2), (3,), 3)
    assert t.residues == {0}
    assert t(6) == 2 and t(7) == 0
    assert t.normalized().raw_residues == (0,)
    with pytest.raises(ValueError):
        DeltaTerm((0, 1), (0,), 1)
    with pytest.raises(ValueError):
        DeltaTerm((0, 1), (), 4)


@pytest.mark.parametrize("case,n,rho", [(26, 7, 23), (1, 6, 28), (83, 6, 86), (26, 16, 48)])
def test_evaluate(table, case, n, rho):
    assert evaluate(table[case].formula, n) == rho


def test_extra_entry(table):
    assert table.extras[5].formula(5) == 25
    r = verify_case("extra", 5)
    assert r.match and r.computed == 25


def _broken(text, old, new):
    assert old in text
    return text.replace(old, new, 1)


def test_parse_errors_carry_line_numbers():
    text = table_text()
    bad = _broken(text, "[case 26]", "[case 99]")
    with pytest.raises(TableParseError) as exc:
        parse_table(bad)
    assert exc.value.lineno == bad.split("\n").index("[case 99]") + 1
    with pytest.raises(TableParseError, match="duplicate"):
        parse_table(_broken(text, "[case 26]", "[case 25]"))
    with pytest.raises(TableParseError, match="modulus"):
        parse_table(_broken(text, "delta = 0,4 | 4 | 12", "delta = 0,4 | 4 | 1"))
    with pytest.raises(TableParseError):
        parse_table(_broken(text, "delta = 0,4 | 4 | 12", "delta = 0,4 | x | 12"))
    with pytest.raises(TableParseError, match="expected 83"):
        parse_table(text.split("[case 83]")[0])


@pytest.mark.parametrize("case,n", [(26, 7), (83, 6), (26, 16)])
def test_verify_case(case, n):
    r = verify_case(case, n)
    assert r.match
    assert r.computed == r.formula


def test_verify_case10_window():
    rep = verify_all(range(6, 21), cases=[10], threads=1)
    assert rep.ok
    cov = {(t.term.modulus, tuple(sorted(t.term.residues))): t for t in rep.coverage}
    for key in ((5, (0,)), (14, (7,)), (18, (6,))):
        assert cov[key].verified_at is not None


def test_verify_empty_range():
    rep = verify_all([], cases=[1], threads=1)
    assert rep.results == [] and rep.ok


def test_verify_parallel_is_deterministic():
    serial = verify_all(range(6, 10), cases=[17, 26, 83], threads=1)
    parallel = verify_all(range(6, 10), cases=[17, 26, 83], threads=2)
    assert serial.results == [r for r in serial.results]
    assert [(r.label, r.n, r.computed) for r in serial.results] == [
        (r.label, r.n, r.computed) for r in parallel.results]


def test_budget_reaches_untriggered_terms():
    rep = verify_all(range(6, 12), cases=[10], threads=1, extra_budget=40)
    assert not rep.untested()
    assert any(r.n > 11 for r in rep.results)
    assert first_trigger(DeltaTerm((0, 6), (6,), 18)) == 6
    assert first_trigger(DeltaTerm((0, 8), (15, 20), 30)) == 15


def test_case75_mismatch_is_reported():
    # the shipped row disagrees with direct computation for n = 30, 32 mod 60
    rep = verify_all([30, 31, 32], cases=[75], threads=1)
    assert [(r.n, r.computed, r.formula) for r in rep.mismatches] == [(30, 242, 210), (32, 210, 242)]
    assert rep.failed_terms()


def test_find_maximal():
    hits = find_maximal(range(5, 13))
    assert [(h.label, h.n, h.rho) for h in hits] == [("77", 5, 45), ("82", 6, 86), ("83", 6, 86)]
    assert find_maximal(range(7, 13)) == []
    assert load_table()[83].formula(7) < hodge11(7)


def test_fit_truncated_row(table):
    row = QuasiPolynomial(table[26].formula.base,
                          tuple(t for t in table[26].formula.terms if t.modulus <= 12))
    got = fit_quasi_polynomial({n: row(n) for n in range(6, 54)}, 24)
    assert all(got(n) == row(n) for n in range(6, 400))
    assert max(got.moduli()) == 12


def test_fit_constant():
    q = fit_quasi_polynomial({n: 7 for n in range(6, 30)}, 8)
    assert q.base == (7,) and q.terms == ()


def test_fit_short_window():
    with pytest.raises(DiscoveryError):
        fit_quasi_polynomial({n: n for n in range(6, 20)}, 8)


def test_discover_small_period_case(table):
    q = discover_formula(table[16].surface, range(6, 30), 10)
    assert all(q(n) == table[16].formula(n) for n in range(6, 200))
    with pytest.raises(DiscoveryError):
        discover_formula(table[16].surface, range(6, 10), 10)
