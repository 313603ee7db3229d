import random

from hypothesis import given
from hypothesis import strategies as st

from occurfree.gen import (
    EquationConfig,
    ModedConfig,
    TermConfig,
    random_equations,
    random_moding,
    random_term,
    tidy_clause,
    tidy_query,
    well_moded_clause,
)
from occurfree.modes import is_tidy_clause, is_tidy_query, is_well_3_moded
from occurfree.oracles import is_unifier, more_general, rational_unifiable, robinson, robinson_eqs
from occurfree.parser import parse_equations, parse_term
from occurfree.terms import Substitution, VarSupply, term_size, variables


def test_robinson():
    scope = {}
    s, t = parse_term("f(X,g(Y))", scope=scope), parse_term("f(a,g(X))", scope=scope)
    theta = robinson([(s, t)])
    assert theta == Substitution({scope["X"]: parse_term("a"), scope["Y"]: parse_term("a")})
    assert robinson([(parse_term("X", scope=scope), parse_term("f(X)", scope=scope))]) is None
    assert robinson([(parse_term("a"), parse_term("b"))]) is None


def test_more_general():
    scope = {}
    eqs = parse_equations("X = Y", scope=scope)
    X, Y = scope["X"], scope["Y"]
    a = parse_term("a")
    assert more_general(Substitution({X: Y}), Substitution({X: a, Y: a}), {X, Y})
    assert not more_general(Substitution({X: a, Y: a}), Substitution({X: Y}), {X, Y})
    assert more_general(Substitution({X: Y}), Substitution({Y: X}), {X, Y})
    assert is_unifier(Substitution({X: Y}), eqs)


def test_rational_unifiable():
    assert rational_unifiable(parse_equations("X = f(X)"))
    assert rational_unifiable(parse_equations("g(X,X) = g(Y,f(Y))"))
    assert not rational_unifiable(parse_equations("p(a,f(X),X) = p(b,Y,Y)"))
    assert not rational_unifiable(parse_equations("X = f(X), X = g(X,X)"))


def test_finite_unifiable_implies_rational():
    rng = random.Random(3)
    for _ in range(500):
        eqs = random_equations(rng)
        if robinson_eqs(eqs) is not None:
            assert rational_unifiable(eqs)


@given(st.integers(0, 10**6))
def test_random_term_bounds(seed):
    rng = random.Random(seed)
    cfg = TermConfig(max_size=9)
    t = random_term(rng, [], cfg)
    assert term_size(t) <= 9 and not variables(t)
    eqs = random_equations(rng, EquationConfig(max_vars=4))
    assert 1 <= len(eqs) <= 3
    assert len(variables(tuple(x for e in eqs for x in e.terms()))) <= 4


@given(st.integers(0, 10**6))
def test_constructive_generators(seed):
    rng = random.Random(seed)
    m = random_moding(rng)
    supply = VarSupply()
    assert is_tidy_query(tidy_query(rng, m, supply=supply), m)
    assert is_tidy_clause(tidy_clause(rng, m, supply=supply), m)
    m3 = random_moding(rng, values="+-?")
    assert is_well_3_moded(well_moded_clause(rng, m3, ModedConfig(), supply), m3)
