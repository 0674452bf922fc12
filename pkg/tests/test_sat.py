import itertools

import pytest
from hypothesis import given, settings, strategies as st

from bqlab.errors import CapacityError, ParseError
from bqlab.sat import CnfFormula, brute_force_sat, count_models, parse_dimacs


def enumerate_models(f):
    """Independent check: walk every assignment with plain Python."""
    count = 0
    for values in itertools.product((False, True), repeat=f.num_vars):
        if all(any(values[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses):
            count += 1
    return count


def test_parse_basic():
    f = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n")
    assert f.num_vars == 2
    assert f.clauses == ((1, 2), (-1,))


def test_parse_tautological_clause():
    f = parse_dimacs("p cnf 1 1\n1 -1 0\n")
    assert f.clauses == ((1, -1),)
    assert brute_force_sat(f) == 1


def test_parse_comments_and_multiline_clause():
    f = parse_dimacs("c hello\np cnf 3 1\n1 -2\n3 0\n")
    assert f.clauses == ((1, -2, 3),)


@pytest.mark.parametrize(
    "text, line",
    [
        ("p cnf 1 2\n1 0\n", 1),
        ("p cnf 2\n1 0\n", 1),
        ("p dnf 1 1\n1 0\n", 1),
        ("p cnf 1 1\n2 0\n", 2),
        ("p cnf 2 1\n1 2\n", 2),
        ("1 0\n", 1),
        ("p cnf 2 1\n1 x 0\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as err:
        parse_dimacs(text)
    assert err.value.lineno == line


def test_unsat_pair():
    assert brute_force_sat(CnfFormula(1, ((1,), (-1,)))) == 0


def test_sat_disjunction():
    f = CnfFormula(2, ((1, 2),))
    assert brute_force_sat(f) == 1
    assert count_models(f) == enumerate_models(f) == 3


def test_empty_clause_list():
    f = CnfFormula(2, ())
    assert brute_force_sat(f) == 1
    assert count_models(f) == 4


def test_empty_clause_unsat():
    f = CnfFormula(2, ((1,), ()))
    assert brute_force_sat(f) == 0
    assert count_models(f) == 0


def test_duplicate_literals_allowed():
    assert count_models(CnfFormula(2, ((1, 1),))) == 2


def test_capacity():
    with pytest.raises(CapacityError):
        brute_force_sat(CnfFormula(21, ((1,),)))


@st.composite
def formulas(draw, max_vars=6, max_clauses=6):
    n = draw(st.integers(1, max_vars))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4), max_size=max_clauses))
    return CnfFormula(n, tuple(tuple(c) for c in clauses))


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_sat_iff_models(f):
    assert count_models(f) == enumerate_models(f)
    assert brute_force_sat(f) == int(count_models(f) >= 1)


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_round_trip(f):
    assert parse_dimacs(f.to_dimacs()) == f


@settings(max_examples=100, deadline=None)
@given(formulas(), st.data())
def test_dropping_a_clause_keeps_satisfiable(f, data):
    if not f.clauses or not brute_force_sat(f):
        return
    i = data.draw(st.integers(0, len(f.clauses) - 1))
    assert brute_force_sat(f.without_clause(i)) == 1
