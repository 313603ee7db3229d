"""Bounded SLD trees with pluggable selection rules.

Every selected-atom / standardized-apart-head pair with a matching
predicate (an *available unification*) is recorded and classified as
NSTO/WNSTO.  The sound engine resolves with MMA; the unsound engine uses
MMA⁻, as Prolog does, and marks resolution steps whose semi-solved result
has no finite solution as ``cyclic_binding``.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .canonical import equation_key, query_key
from .modes import MINUS, Moding, inputs_ground, is_tidy_program, is_tidy_query, is_well_3_moded, weakly_linear_heads
from .nsto import DEFAULT_BUDGET, Classification, Verdict, classify
from .parser import Program
from .terms import Atom, Clause, Struct, Substitution, Var, VarSupply, apply, is_ground, standardize_apart
from .unify import MMA, MMA_MINUS, EquationSet, FirstApplicable, extract_mgu, finish_semi_solved, run

SOUND = "sound"
UNSOUND = "unsound"

OPEN = "open"
SUCCESS = "success"
FAILURE = "failure"
FLOUNDERED = "floundered"
DEPTH_CUT = "depth_cut"
CYCLIC = "cyclic_binding"

DEFAULT_MAX_DEPTH = 500
DEFAULT_MAX_NODES = 20_000


# ---------------------------------------------------------------------------
# selection rules


@dataclass(frozen=True)
class Leftmost:
    name = "leftmost"


@dataclass(frozen=True)
class ModeCompatible:
    """Selects the first atom whose input positions are ground."""

    moding: Moding
    name = "mode-compatible"


@dataclass(frozen=True)
class AllRules:
    """Branches over every atom position (approximates "any selection rule")."""

    name = "all"


SelectionRule = Leftmost | ModeCompatible | AllRules


def select(q: Sequence[Atom], rule: SelectionRule) -> list[int]:
    """Indices of the atoms to resolve; an empty list means the query flounders."""
    if not q:
        raise ValueError("cannot select from the empty query")
    if isinstance(rule, Leftmost):
        return [0]
    if isinstance(rule, AllRules):
        return list(range(len(q)))
    for i, a in enumerate(q):
        if inputs_ground(a, rule.moding):
            return [i]
    return []


# ---------------------------------------------------------------------------
# resolution


class NotUnifiable(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def unify_atoms(a: Atom, h: Atom, engine: str = SOUND) -> Substitution:
    """Unify ``a`` with ``h``; raises :class:`NotUnifiable` with reason clash, occur or cyclic."""
    if a.indicator != h.indicator:
        raise NotUnifiable("clash")
    E = EquationSet.unify(a.args, h.args)
    if engine == SOUND:
        trace = run(E, FirstApplicable(), MMA)
        if trace.failure is not None:
            raise NotUnifiable(trace.failure.reason)
        return extract_mgu(trace.final)
    trace = run(E, FirstApplicable(), MMA_MINUS)
    if trace.failure is not None:
        raise NotUnifiable(trace.failure.reason)
    theta = finish_semi_solved(trace.final)
    if theta is None:
        raise NotUnifiable("cyclic")
    return theta


def resolve(q: Sequence[Atom], i: int, c: Clause, engine: str = SOUND) -> tuple[tuple[Atom, ...], Substitution]:
    """SLD resolvent of ``q`` at atom ``i`` with (standardized apart) clause ``c``."""
    theta = unify_atoms(q[i], c.head, engine)
    q = tuple(q)
    return apply(theta, q[:i] + c.body + q[i + 1 :]), theta


def run_builtin(a: Atom) -> bool | None:
    """Evaluate a built-in atom; ``None`` if ``a`` is not a built-in."""
    if a.indicator == ("constant", 1):
        t = a.args[0]
        return isinstance(t, Struct) and not t.args
    if a.indicator == ("\\==", 2):
        return a.args[0] != a.args[1]
    return None


# ---------------------------------------------------------------------------
# trees


@dataclass
class SldNode:
    id: int
    query: tuple[Atom, ...]
    depth: int
    parent: int | None = None
    selected: int | None = None  # atom index in the parent's query
    clause: int | None = None  # None for built-in steps
    mgu: Substitution | None = None
    status: str = OPEN
    children: list[int] = field(default_factory=list)


@dataclass
class AvailableUnification:
    node: int
    atom_index: int
    clause_index: int
    atom: Atom
    head: Atom
    nsto: Verdict | None
    wnsto: Verdict | None
    outcome: str  # "unified", "clash", "occur" or "cyclic"
    occurrences: int = 1


@dataclass
class SldTree:
    program: Program
    query: tuple[Atom, ...]
    rule: SelectionRule
    engine: str
    max_depth: int
    max_nodes: int
    nodes: list[SldNode] = field(default_factory=list)
    unifications: list[AvailableUnification] = field(default_factory=list)
    truncated: bool = False

    def leaves(self, status: str) -> list[SldNode]:
        return [n for n in self.nodes if n.status == status]

    def answer(self, node: SldNode | int) -> tuple[Atom, ...]:
        """The initial query instantiated by the mgus along the path to ``node``."""
        if isinstance(node, int):
            node = self.nodes[node]
        # later mgus never rebind a variable an earlier one eliminated, so the
        # path's bindings merge into one triangular map
        bindings: dict = {}
        while node.parent is not None:
            bindings.update(node.mgu)
            node = self.nodes[node.parent]
        done: dict = {}

        def walk(t):
            if isinstance(t, Var):
                if t not in bindings:
                    return t
                if t not in done:
                    done[t] = walk(bindings[t])
                return done[t]
            if not t.args:
                return t
            return Struct(t.functor, tuple(walk(x) for x in t.args))

        return tuple(walk(a) for a in self.query)

    def answers(self) -> list[tuple[Atom, ...]]:
        return [self.answer(n) for n in self.leaves(SUCCESS)]

    def answer_keys(self) -> list[tuple]:
        return sorted(query_key(a) for a in self.answers())

    def signature(self) -> list[tuple]:
        """Shape of the tree modulo variable renaming, in breadth-first order."""
        return [
            (n.depth, n.parent, n.selected, n.clause, n.status, query_key(n.query))
            for n in self.nodes
        ]

    @property
    def complete(self) -> bool:
        return not self.truncated


def build_tree(
    program: Program,
    query: Sequence[Atom],
    rule: SelectionRule | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
    max_depth: int = DEFAULT_MAX_DEPTH,
    classify_unifications: bool = True,
    engine: str = SOUND,
    budget: int = DEFAULT_BUDGET,
    moding: Moding | None = None,
) -> SldTree:
    """Breadth-first SLD tree for ``program`` and ``query`` within the given bounds."""
    if max_nodes < 1 or max_depth < 1:
        raise ValueError("bounds must be positive")
    # terms can nest about as deep as the tree; term walkers recurse
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20 * max_depth + 2000))
    rule = rule or Leftmost()
    moding = moding if moding is not None else program.moding
    query = tuple(query)
    supply = VarSupply.above(query, *program.clauses)
    tree = SldTree(program, query, rule, engine, max_depth, max_nodes)
    tree.nodes.append(SldNode(0, query, 0))
    cache: dict[tuple, Classification] = {}
    seen_au: dict[tuple, AvailableUnification] = {}
    todo = deque([0])

    while todo:
        node = tree.nodes[todo.popleft()]
        if not node.query:
            node.status = SUCCESS
            continue
        if node.depth >= max_depth or len(tree.nodes) >= max_nodes:
            node.status = DEPTH_CUT
            tree.truncated = True
            continue
        picks = select(node.query, rule)
        if not picks:
            node.status = FLOUNDERED
            continue
        qkey = query_key(node.query) if classify_unifications else None
        for i in picks:
            atom = node.query[i]
            builtin = run_builtin(atom)
            if builtin is not None:
                if builtin:
                    _add_child(tree, node, node.query[:i] + node.query[i + 1 :], Substitution(), i, None, todo)
                continue
            for ci, clause in program.clauses_for(atom.indicator):
                renamed = standardize_apart(clause, supply=supply)
                outcome = "unified"
                try:
                    resolvent, theta = resolve(node.query, i, renamed, engine)
                except NotUnifiable as e:
                    outcome = e.reason
                if classify_unifications:
                    au_key = (qkey, i, ci)
                    if au_key in seen_au:
                        seen_au[au_key].occurrences += 1
                    else:
                        eq_key = equation_key(EquationSet.unify(atom.args, renamed.head.args).equations)
                        cl = cache.get(eq_key)
                        if cl is None:
                            cl = cache[eq_key] = classify(atom, renamed.head, moding, budget)
                        au = AvailableUnification(node.id, i, ci, atom, renamed.head, cl.nsto, cl.wnsto, outcome)
                        seen_au[au_key] = au
                        tree.unifications.append(au)
                if outcome == "unified":
                    _add_child(tree, node, resolvent, theta, i, ci, todo)
                elif outcome == "cyclic":
                    child = _add_child(tree, node, node.query, Substitution(), i, ci, None)
                    child.status = CYCLIC
        if not node.children:
            node.status = FAILURE
    return tree


def _add_child(tree: SldTree, parent: SldNode, query, theta, i, ci, todo) -> SldNode:
    child = SldNode(
        len(tree.nodes),
        tuple(query),
        parent.depth + 1,
        parent.id,
        i,
        ci,
        theta,
    )
    tree.nodes.append(child)
    parent.children.append(child.id)
    if todo is not None:
        todo.append(child.id)
    return child


def execute_unsound(program: Program, query: Sequence[Atom], rule: SelectionRule | None = None, **bounds) -> SldTree:
    return build_tree(program, query, rule, engine=UNSOUND, **bounds)


# ---------------------------------------------------------------------------
# verification


STRICT = "strict"
WEAK = "weak"


@dataclass
class Verification:
    mode: str
    status: str  # "verified", "refuted" or "budget_exceeded"
    bounded: bool
    checked: int
    witness: AvailableUnification | None = None

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def verify_occur_check_free(tree: SldTree, mode: str = STRICT) -> Verification:
    """Check that every available unification in ``tree`` is NSTO (strict) or WNSTO (weak)."""
    if mode not in (STRICT, WEAK):
        raise ValueError(f"unknown verification mode {mode!r}")
    unknown = None
    for au in tree.unifications:
        v = au.nsto if mode == STRICT else au.wnsto
        if v is None:
            raise ValueError("tree was built without classification")
        if v.value is False:
            return Verification(mode, "refuted", tree.truncated, len(tree.unifications), au)
        if v.value is None and unknown is None:
            unknown = au
    if unknown is not None:
        return Verification(mode, "budget_exceeded", tree.truncated, len(tree.unifications), unknown)
    return Verification(mode, "verified", tree.truncated, len(tree.unifications))


def check_query_ground_inputs(q: Sequence[Atom], m: Moding) -> bool:
    return all(inputs_ground(a, m) for a in q)


def one_ground(q: Sequence[Atom]) -> bool:
    """Every atom's first argument is ground."""
    return all(not a.args or is_ground(a.args[0]) for a in q)


@dataclass(frozen=True)
class Certificate:
    name: str
    property: str  # STRICT or WEAK
    rules: str  # "any" or "mode-compatible"


def syntactic_certificates(program: Program, query: Sequence[Atom], moding: Moding | None = None) -> list[Certificate]:
    """Unconditional (bound-free) sufficient conditions that hold for ``program`` with ``query``."""
    m = moding if moding is not None else program.moding
    out = []
    try:
        if m.is_two_valued() and is_tidy_program(program, m) and is_tidy_query(query, m):
            out.append(Certificate("tidy", STRICT, "any"))
        if is_well_3_moded(program, m) and is_well_3_moded(tuple(query), m) and weakly_linear_heads(program, m):
            rules = "any" if not m.has_output() else "mode-compatible"
            out.append(Certificate("well-3-moded+weakly-linear-heads", WEAK, rules))
    except KeyError:
        pass
    return out


def modes_have_output(m: Moding) -> bool:
    return any(MINUS in mode for mode in m.values())
