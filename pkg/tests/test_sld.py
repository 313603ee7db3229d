import pytest

from occurfree.modes import inputs_ground, is_tidy_query, is_well_3_moded
from occurfree.parser import parse_moding, parse_program, parse_query, render
from occurfree.sld import (
    CYCLIC,
    DEPTH_CUT,
    FAILURE,
    FLOUNDERED,
    OPEN,
    SUCCESS,
    AllRules,
    Leftmost,
    ModeCompatible,
    NotUnifiable,
    build_tree,
    check_query_ground_inputs,
    execute_unsound,
    one_ground,
    resolve,
    run_builtin,
    select,
    syntactic_certificates,
    unify_atoms,
    verify_occur_check_free,
)
from occurfree.terms import apply, compose_all, is_variant, standardize_apart, variables

D3 = parse_moding("d(+,?,?)")
NQ3 = parse_moding("pqs(+,?,?,?), pq(+,?,?,?)")


def q(text, scope=None):
    return parse_query(text, scope=scope)


def test_select():
    assert select(q("d(x*x,x,D)"), Leftmost()) == [0]
    assert select(q("d(F,x,D), d(G,x,E)"), ModeCompatible(D3)) == []
    assert select(q("d(F,x,D), d(x,x,E)"), ModeCompatible(D3)) == [1]
    assert select(q("a, b, c"), AllRules()) == [0, 1, 2]
    with pytest.raises(ValueError):
        select((), Leftmost())


def test_resolve_derivative(corpus):
    p = corpus("derivative.pl")
    scope = {}
    query = q("d(x*x,x,D)", scope)
    c = standardize_apart(p.clauses[2], variables(query))
    res, theta = resolve(query, 0, c)
    assert len(res) == 2
    assert render(res[0]) == "d(x,x,DF)" and render(res[1]) == "d(x,x,DG)"
    assert render(apply(theta, scope["D"]), None).replace(" ", "") == "x*DG+DF*x"


def test_resolve_flatten(corpus):
    p = corpus("flatten.pl")
    query = q("flatten([[a],b],R)")
    c = standardize_apart(p.clauses[3], variables(query))
    res, _ = resolve(query, 0, c)
    assert is_variant(res, q("flatten_dl([[a],b],R,[])"))


def test_resolve_failures():
    p = parse_program("p(a).\neq(Z,Z).")
    with pytest.raises(NotUnifiable) as info:
        resolve(q("p(b)"), 0, p.clauses[0])
    assert info.value.reason == "clash"
    with pytest.raises(NotUnifiable) as info:
        unify_atoms(q("eq(X,f(X))")[0], p.clauses[1].head)
    assert info.value.reason == "occur"
    with pytest.raises(NotUnifiable) as info:
        unify_atoms(q("eq(X,f(X))")[0], p.clauses[1].head, "unsound")
    assert info.value.reason == "cyclic"


def test_builtins():
    assert run_builtin(q("constant(a)")[0]) is True
    assert run_builtin(q("constant(f(a))")[0]) is False
    assert run_builtin(q("constant(X)")[0]) is False
    assert run_builtin(q("a \\== b")[0]) is True
    assert run_builtin(q("X \\== X")[0]) is False
    assert run_builtin(q("p(a)")[0]) is None


def test_nqueens_small_tree(corpus):
    t = build_tree(corpus("nqueens.pl"), q("pqs(s(0),[A],_,_)"), Leftmost(), max_depth=50)
    assert t.complete and len(t.leaves(SUCCESS)) >= 1


def test_flatten_answer(corpus):
    t = build_tree(corpus("flatten.pl"), q("flatten([[a],[b]],Ys)"), Leftmost())
    assert [render(a) for a in t.answers()] == ["flatten([[a],[b]],[a,b])"]


def test_flounder_at_root(corpus):
    t = build_tree(corpus("derivative.pl"), q("d(F,x,D)"), ModeCompatible(D3))
    assert [n.status for n in t.nodes] == [FLOUNDERED]


def test_bounds(corpus):
    t = build_tree(corpus("nqueens.pl"), q("pqs(s(s(0)),[A,B],_,_)"), AllRules(), max_nodes=50)
    assert t.truncated and t.leaves(DEPTH_CUT)
    t = build_tree(corpus("nqueens.pl"), q("pqs(s(s(0)),[A,B],_,_)"), Leftmost(), max_depth=2)
    assert t.truncated and all(n.depth <= 2 for n in t.nodes)
    with pytest.raises(ValueError):
        build_tree(corpus("nqueens.pl"), q("pqs(0,A,B,C)"), Leftmost(), max_depth=0)


def test_available_unifications_recorded_for_every_head(corpus):
    p = corpus("use2.pl")
    t = build_tree(p, q("p([a],X,Y)"), Leftmost())
    root = [au for au in t.unifications if au.node == 0]
    assert sorted(au.clause_index for au in root) == [0, 1]
    assert {au.outcome for au in root} == {"unified", "clash"}


def test_verify_examples(corpus):
    nq = corpus("nqueens.pl")
    weak = verify_occur_check_free(build_tree(nq, q("pqs(s(0),[A],_,_)"), AllRules(), max_depth=60), "weak")
    assert weak.verified
    bad = verify_occur_check_free(build_tree(nq, q("pq(a,L,[L|_],_)"), Leftmost(), max_depth=60), "strict")
    assert bad.status == "refuted" and bad.witness.clause_index == 2
    assert bad.witness.nsto.witness.failure.reason == "occur"
    fl = build_tree(corpus("flatten.pl"), q("flatten([a,[b]],R)"), Leftmost())
    v = verify_occur_check_free(fl, "strict")
    assert v.verified and not v.bounded
    with pytest.raises(ValueError):
        verify_occur_check_free(fl, "both")
    plain = build_tree(corpus("flatten.pl"), q("flatten([a],R)"), Leftmost(), classify_unifications=False)
    assert plain.unifications == [] and verify_occur_check_free(plain).verified


def test_ground_input_checks():
    m = parse_moding("pqs(+,?,?,?), pq(+,?,?,?)")
    assert check_query_ground_inputs(q("pqs(s(s(0)),[A,B],_,_)"), m)
    assert not check_query_ground_inputs(q("pq(X,A,B,C)"), m)
    assert check_query_ground_inputs((), m)
    assert one_ground(q("pqs(s(0),A,B,C), pq(a,X,Y,Z)")) and not one_ground(q("pq(X,a,b,c)"))


def test_unsound_engine_examples(corpus):
    use2 = corpus("use2.pl")
    query = q("p([a,b],X,Y)")
    assert execute_unsound(use2, query, AllRules()).answer_keys() == build_tree(use2, query, AllRules()).answer_keys()
    eq = corpus("eq.pl")
    query = q("eq(g(X,X),g(Y,f(Y)))")
    unsound = execute_unsound(eq, query, Leftmost())
    sound = build_tree(eq, query, Leftmost())
    assert [n.status for n in unsound.nodes] == [OPEN, CYCLIC]
    assert [n.status for n in sound.nodes] == [FAILURE]
    fl = corpus("flatten.pl")
    query = q("flatten([[a,[b]],c],R)")
    assert execute_unsound(fl, query, AllRules()).signature() == build_tree(fl, query, AllRules()).signature()


def test_syntactic_certificates(corpus):
    fl = corpus("flatten.pl")
    names = [c.name for c in syntactic_certificates(fl, q("flatten([a],R)"))]
    assert "tidy" in names
    certs = syntactic_certificates(corpus("nqueens.pl"), q("pqs(s(0),A,B,C)"))
    assert [(c.name, c.property, c.rules) for c in certs] == [("well-3-moded+weakly-linear-heads", "weak", "any")]
    assert syntactic_certificates(corpus("nqueens.pl"), q("pq(X,A,B,C)")) == []


# -- tree invariants ------------------------------------------------------------


def test_leftmost_selects_ground_inputs_on_well_3_moded(corpus):
    for name, query, m in [
        ("derivative.pl", "d(x*x*x,x,D)", D3),
        ("nqueens.pl", "pqs(s(s(0)),[A,B],_,_)", NQ3),
        ("use2.pl", "p([a,b,c],X,Y)", parse_moding("p(+,?,?)")),
    ]:
        p = corpus(name)
        query = q(query)
        assert is_well_3_moded(p, m) and is_well_3_moded(query, m)
        t = build_tree(p, query, Leftmost(), max_depth=60, classify_unifications=False)
        for n in t.nodes:
            if n.query and n.status != DEPTH_CUT:
                assert inputs_ground(n.query[0], m), (name, render(n.query))
            assert is_well_3_moded(n.query, m)
        mc = build_tree(p, query, ModeCompatible(m), max_depth=60, classify_unifications=False)
        assert not mc.leaves(FLOUNDERED)


def test_one_ground_persists(corpus):
    for name, query in [("nqueens.pl", "pqs(s(s(0)),[A,B],_,_)"), ("use2.pl", "p([a,b],X,Y)")]:
        t = build_tree(corpus(name), q(query), AllRules(), max_depth=60, max_nodes=3000, classify_unifications=False)
        assert all(one_ground(n.query) for n in t.nodes)


def test_tidy_persists(corpus):
    m1 = corpus("flatten.pl").moding
    t = build_tree(corpus("flatten.pl"), q("flatten([[a,[b]],c,[]],R)"), AllRules(), max_nodes=3000, classify_unifications=False)
    assert all(is_tidy_query(n.query, m1) for n in t.nodes)


def test_dual_engines_agree_when_weakly_verified(corpus):
    cases = [
        ("nqueens.pl", "pqs(s(s(0)),[A,B],_,_)", Leftmost()),
        ("use2.pl", "p([a,b],X,Y)", AllRules()),
        ("derivative.pl", "d(x*x,x,D)", Leftmost()),
        ("flatten.pl", "flatten([[a],b],R)", AllRules()),
    ]
    for name, query, rule in cases:
        p = corpus(name)
        sound = build_tree(p, q(query), rule, max_depth=60, max_nodes=4000)
        assert verify_occur_check_free(sound, "weak").verified
        unsound = execute_unsound(p, q(query), rule, max_depth=60, max_nodes=4000)
        assert unsound.answer_keys() == sound.answer_keys()
        assert [n.status for n in unsound.nodes] == [n.status for n in sound.nodes]
        assert unsound.signature() == sound.signature()


def test_answers_against_independent_resolution(corpus):
    # the answer of every success leaf is the query instantiated by the composed path mgus
    p = corpus("nqueens.pl")
    t = build_tree(p, q("pqs(s(s(0)),[A,B],_,_)"), AllRules(), max_depth=60, max_nodes=2000)
    for leaf in t.leaves(SUCCESS):
        path = []
        n = leaf
        while n.parent is not None:
            path.append(n.mgu)
            n = t.nodes[n.parent]
        theta = compose_all(reversed(path))
        assert t.answer(leaf) == apply(theta, t.query)
