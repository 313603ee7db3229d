import graphlib
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from occurfree.gen import _freshen, random_moding, random_term, tidy_query, well_moded_query
from occurfree.modes import (
    MINUS,
    PLUS,
    Moding,
    SearchCapExceeded,
    UndeclaredPredicate,
    candidate_modings,
    dep_graph,
    grounding_transform,
    input_linear,
    input_output_disjoint,
    is_nicely_moded,
    is_tidy_clause,
    is_tidy_program,
    is_tidy_query,
    is_weakly_tidy,
    is_well_3_moded,
    is_well_moded,
    output_linear,
    project,
    search_modings,
    tidy_clause_problems,
    weakly_linear,
)
from occurfree.parser import parse_moding, parse_program, parse_query, render
from occurfree.terms import Struct, VarSupply

M1 = parse_moding("flatten(+,-), flatten_dl(+,-,+)")
M2 = parse_moding("flatten(-,+), flatten_dl(-,+,-)")
PQ = parse_moding("pq(+,-,-,-)")


def atom(text):
    (a,) = parse_query(text)
    return a


def test_project():
    a = atom("pq(I,Cs,Us,Ds)")
    p = project(a, PQ)
    assert render(p.inputs) == "I" and render(p.outputs) == "Cs, Us, Ds" and p.neutral == ()
    d = atom("d(F*G,X,D)")
    p = project(d, parse_moding("d(+,?,?)"))
    assert render(p.inputs) == "F*G" and p.outputs == () and render(p.neutral) == "X, D"
    p = project(d, parse_moding("d(?,?,?)"))
    assert p.inputs == p.outputs == ()
    with pytest.raises(UndeclaredPredicate):
        project(atom("r(X)"), PQ)


def test_builtins_are_inputs():
    assert PQ.mode(("constant", 1)) == (PLUS,)
    assert PQ.mode(("\\==", 2)) == (PLUS, PLUS)


def test_linearity_classes():
    a = atom("pq(I,[I|_],[I|_],[I|_])")
    assert input_linear(a, PQ) and not output_linear(a, PQ) and not input_output_disjoint(a, PQ)
    g = atom("pq(a,b,c,d)")
    assert input_linear(g, PQ) and output_linear(g, PQ) and input_output_disjoint(g, PQ)
    assert not input_output_disjoint(atom("p(X,X)"), parse_moding("p(+,-)"))


def test_weakly_linear():
    a = atom("pq(I,[I|_],[I|_],[I|_])")
    assert weakly_linear(a, PQ)
    assert not weakly_linear(a, parse_moding("pq(-,-,-,-)"))
    assert weakly_linear(atom("pq(A,B,C,D)"), parse_moding("pq(-,-,-,-)"))


def test_flatten_dependency_edges(corpus):
    body = corpus("flatten.pl").clauses[0].body
    assert dep_graph(body, M1).edges == {(1, 0)}
    assert dep_graph(body, M2).edges == {(0, 1)}
    assert is_tidy_query(body, M1) and is_tidy_query(body, M2)


def test_cyclic_query_not_tidy():
    q = parse_query("q(X,Y), q(Y,Z), q(Z,X)")
    m = parse_moding("q(+,-)")
    assert output_linear(q, m)
    assert not dep_graph(q, m).is_acyclic()
    assert not is_tidy_query(q, m)
    assert not is_tidy_query(parse_query("q(X,X)"), m)  # self loop


def test_tidy_programs(corpus):
    flatten = corpus("flatten.pl")
    assert is_tidy_program(flatten, M1) and is_tidy_program(flatten, M2)
    nq = corpus("nqueens.pl")
    assert not any(is_tidy_program(nq, m) for m in candidate_modings(sorted(nq.predicates())))


def test_tidy_clause_problems():
    c = parse_program("p(X,X) :- q(X,Y).").clauses[0]
    m = parse_moding("p(+,+), q(-,-)")
    problems = tidy_clause_problems(c, m)
    assert "head is not input linear" in problems
    assert "head input variable occurs in a body output position" in problems
    assert not is_tidy_clause(c, m)


def test_nicely_moded(corpus):
    assert is_nicely_moded(corpus("flatten.pl"), M2)
    assert not is_nicely_moded(corpus("flatten.pl"), M1)
    assert is_nicely_moded(corpus("derivative.pl"), parse_moding("d(-,+,-)"))
    q = parse_query("q(X,Y), q(Z,X)")
    m = parse_moding("q(+,-)")
    assert is_tidy_query(q, m) and not is_nicely_moded(q, m)


def test_well_3_moded(corpus):
    assert is_well_3_moded(corpus("nqueens.pl"), parse_moding("pqs(+,?,?,?), pq(+,?,?,?)"))
    assert is_well_3_moded(corpus("use2.pl"), parse_moding("p(+,?,?)"))
    assert is_well_3_moded(parse_query("pqs(s(s(0)),A,B,C), pq(s(0),A,D,E)"), parse_moding("pqs(+,?,?,?), pq(+,?,?,?)"))
    assert not is_well_3_moded(parse_query("pq(I,A,B,C)"), PQ)


def test_well_moded_needs_two_values():
    with pytest.raises(ValueError):
        is_well_moded(parse_query("p(a)"), parse_moding("p(?)"))
    m = parse_moding("app(+,+,-)")
    p = parse_program("app([],Ys,Ys).\napp([X|Xs],Ys,[X|Zs]) :- app(Xs,Ys,Zs).")
    assert is_well_moded(p, m)
    assert is_well_moded(p, parse_moding("app(-,-,+)"))
    assert not is_well_moded(p, parse_moding("app(+,-,-)"))


@given(st.data())
def test_ground_input_queries_are_well_3_moded(data):
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    m = random_moding(rng, values="+-?")
    supply = VarSupply()
    pool = [supply.fresh() for _ in range(4)]
    q = []
    for _ in range(rng.randint(1, 3)):
        name, n = rng.choice([("p", 1), ("q", 2), ("r", 3)])
        q.append(Struct(name, tuple(random_term(rng, [] if md == PLUS else pool) for md in m.mode((name, n)))))
    assert is_well_3_moded(tuple(q), m)


def test_grounding_transform(corpus):
    p = corpus("appendixB.pl")
    c = grounding_transform(p.clauses[0], p.moding)
    assert render(c) == "p('$g0') :- q('$g0',Y), q(Y,Z), q(Z,'$g0')."
    ground_head = p.clauses[1]
    m = parse_moding("p(+), q(-,-)")
    assert grounding_transform(ground_head, m) == ground_head
    c2 = parse_program("r(X) :- s(X).").clauses[0]
    assert render(grounding_transform(c2, parse_moding("r(+), s(-)"))) == "r('$g0') :- s('$g0')."


def test_weakly_tidy(corpus):
    p = corpus("appendixB.pl")
    assert is_weakly_tidy(p, p.moding, parse_moding("p(+), q(+,-)"))
    assert is_weakly_tidy(p, p.moding, parse_moding("p(+), q(-,+)"))
    assert not is_tidy_program(p, parse_moding("p(+), q(+,-)"))


def test_search_modings(corpus):
    found, n = search_modings(corpus("flatten.pl"), "tidy")
    assert M1 in found and M2 in found and n == 32
    found, n = search_modings(corpus("nqueens.pl"), "tidy")
    assert found == [] and n == 256
    found, _ = search_modings(corpus("use2.pl"), "tidy")
    assert all(m[("p", 3)].count(PLUS) <= 1 for m in found) and len(found) == 4
    found, _ = search_modings(corpus("flatten.pl"), "tidy", limit=1)
    assert len(found) == 1
    with pytest.raises(SearchCapExceeded):
        search_modings(corpus("flatten.pl"), "tidy", cap=4)


def test_moding_validation():
    with pytest.raises(ValueError):
        Moding({("p", 2): ("+",)})
    with pytest.raises(ValueError):
        Moding({("p", 1): ("x",)})
    m = parse_moding("p(+,?)")
    assert not m.is_two_valued() and not m.has_output()
    assert m.updated({("p", 2): (MINUS, MINUS)}).has_output()
    assert m.render() == "p(+,?)"


# -- properties ----------------------------------------------------------------


@given(st.integers(0, 10**6))
def test_tidy_query_permutation_stable(seed):
    rng = random.Random(seed)
    m = random_moding(rng)
    q = tidy_query(rng, m)
    assert is_tidy_query(q, m)
    perm = list(q)
    rng.shuffle(perm)
    assert is_tidy_query(tuple(perm), m)


@given(st.integers(0, 10**6))
def test_linear_query_tidy_under_any_moding(seed):
    rng = random.Random(seed)
    supply = VarSupply()
    q = []
    for _ in range(rng.randint(1, 4)):
        name, n = rng.choice([("p", 1), ("q", 2), ("r", 3)])
        q.append(Struct(name, tuple(_freshen(random_term(rng, [supply.fresh()]), supply) for _ in range(n))))
    m = random_moding(rng)
    assert is_tidy_query(tuple(q), m)


@given(st.integers(0, 10**6))
def test_nicely_moded_implies_tidy(seed):
    rng = random.Random(seed)
    m = random_moding(rng)
    q = tidy_query(rng, m)
    if is_nicely_moded(q, m):
        assert is_tidy_query(q, m)
    # ordering a tidy query topologically makes it nicely moded
    g = dep_graph(q, m)
    order = list(graphlib.TopologicalSorter({j: {i for i, k in g.edges if k == j} for j in range(len(q))}).static_order())
    assert is_nicely_moded(tuple(q[i] for i in order), m)


@given(st.integers(0, 10**6))
def test_generated_well_moded_queries(seed):
    rng = random.Random(seed)
    m = random_moding(rng, values="+-?")
    assert is_well_3_moded(well_moded_query(rng, m), m)
