"""Mode-based syntactic classifications of atoms, queries, clauses and programs.

A :class:`Moding` maps each predicate ``name/arity`` to a tuple over
``"+"`` (input), ``"-"`` (output) and ``"?"`` (neutral).  A moding without
neutral positions is a standard two-valued moding.
"""

from __future__ import annotations

import graphlib
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .terms import (
    Atom,
    Clause,
    Struct,
    Substitution,
    Var,
    apply,
    is_ground,
    is_linear,
    iter_vars,
    seq_vars,
    var_list,
)

PLUS, MINUS, NEUTRAL = "+", "-", "?"
MODE_CHARS = (PLUS, MINUS, NEUTRAL)

BUILTINS: frozenset[tuple[str, int]] = frozenset({("constant", 1), ("\\==", 2)})

Indicator = tuple[str, int]


class UndeclaredPredicate(KeyError):
    def __init__(self, indicator: Indicator):
        super().__init__(indicator)
        self.indicator = indicator

    def __str__(self) -> str:
        return f"no mode declared for {self.indicator[0]}/{self.indicator[1]}"


class Moding(Mapping[Indicator, tuple[str, ...]]):
    """Per-predicate modes; built-in predicates are implicitly all-input."""

    __slots__ = ("_modes", "builtins")

    def __init__(self, modes: Mapping[Indicator, Sequence[str]] | Iterable = (), builtins: Iterable[Indicator] = BUILTINS):
        items = modes.items() if isinstance(modes, Mapping) else modes
        table = {}
        for (name, arity), mode in items:
            mode = tuple(mode)
            if len(mode) != arity:
                raise ValueError(f"mode for {name}/{arity} has {len(mode)} positions")
            bad = [m for m in mode if m not in MODE_CHARS]
            if bad:
                raise ValueError(f"invalid mode symbol {bad[0]!r} for {name}/{arity}")
            table[(name, arity)] = mode
        self._modes = table
        self.builtins = frozenset(builtins)

    def __getitem__(self, ind: Indicator) -> tuple[str, ...]:
        return self._modes[ind]

    def __iter__(self):
        return iter(sorted(self._modes))

    def __len__(self) -> int:
        return len(self._modes)

    def __eq__(self, other):
        if isinstance(other, Moding):
            return self._modes == other._modes
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._modes.items()))

    def __repr__(self) -> str:
        return f"Moding({self.render()!r})"

    def mode(self, ind: Indicator) -> tuple[str, ...]:
        if ind in self._modes:
            return self._modes[ind]
        if ind in self.builtins:
            return (PLUS,) * ind[1]
        raise UndeclaredPredicate(ind)

    def is_two_valued(self) -> bool:
        return all(NEUTRAL not in m for m in self._modes.values())

    def has_output(self) -> bool:
        return any(MINUS in m for m in self._modes.values())

    def updated(self, other: Mapping[Indicator, Sequence[str]]) -> "Moding":
        table = dict(self._modes)
        table.update({k: tuple(v) for k, v in other.items()})
        return Moding(table, self.builtins)

    def render(self) -> str:
        return ", ".join(f"{n}({','.join(m)})" if m else n for (n, _), m in sorted(self._modes.items()))


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Projection:
    inputs: tuple
    outputs: tuple
    neutral: tuple


def project(a: Atom, m: Moding) -> Projection:
    if not a.args:
        return Projection((), (), ())
    mode = m.mode(a.indicator)
    pick = lambda c: tuple(t for t, x in zip(a.args, mode) if x == c)  # noqa: E731
    return Projection(pick(PLUS), pick(MINUS), pick(NEUTRAL))


def var_in(a: Atom, m: Moding) -> set[Var]:
    return seq_vars(project(a, m).inputs)


def var_out(a: Atom, m: Moding) -> set[Var]:
    return seq_vars(project(a, m).outputs)


def input_linear(q: Atom | Sequence[Atom], m: Moding) -> bool:
    return is_linear(tuple(t for a in _atoms(q) for t in project(a, m).inputs))


def output_linear(q: Atom | Sequence[Atom], m: Moding) -> bool:
    return is_linear(tuple(t for a in _atoms(q) for t in project(a, m).outputs))


def input_output_disjoint(a: Atom, m: Moding) -> bool:
    return not (var_in(a, m) & var_out(a, m))


def inputs_ground(a: Atom, m: Moding) -> bool:
    return is_ground(project(a, m).inputs)


def weakly_linear(a: Atom, m: Moding) -> bool:
    """Every variable occurring more than once in ``a`` occurs in an input position."""
    counts = Counter(iter_vars(a))
    ins = var_in(a, m)
    return all(v in ins for v, n in counts.items() if n > 1)


def _atoms(q) -> tuple[Atom, ...]:
    return (q,) if isinstance(q, Struct) else tuple(q)


# ---------------------------------------------------------------------------
# queries and clauses


@dataclass(frozen=True)
class DepGraph:
    size: int
    edges: frozenset[tuple[int, int]]

    def is_acyclic(self) -> bool:
        if any(i == j for i, j in self.edges):
            return False
        ts = graphlib.TopologicalSorter({i: set() for i in range(self.size)})
        for i, j in self.edges:
            ts.add(j, i)
        try:
            ts.prepare()
        except graphlib.CycleError:
            return False
        return True


def dep_graph(q: Sequence[Atom], m: Moding) -> DepGraph:
    """Edges ``i -> j`` when a variable occurs in an output of ``q[i]`` and an input of ``q[j]``."""
    outs = [var_out(a, m) for a in q]
    ins = [var_in(a, m) for a in q]
    edges = {(i, j) for i in range(len(q)) for j in range(len(q)) if outs[i] & ins[j]}
    return DepGraph(len(q), frozenset(edges))


def is_tidy_query(q: Sequence[Atom], m: Moding) -> bool:
    return output_linear(q, m) and dep_graph(q, m).is_acyclic()


def tidy_clause_problems(c: Clause, m: Moding) -> list[str]:
    problems = []
    if not output_linear(c.body, m):
        problems.append("body is not output linear")
    elif not dep_graph(c.body, m).is_acyclic():
        problems.append("body dependency relation is cyclic")
    if not input_linear(c.head, m):
        problems.append("head is not input linear")
    shared = var_in(c.head, m) & seq_vars(t for a in c.body for t in project(a, m).outputs)
    if shared:
        problems.append("head input variable occurs in a body output position")
    return problems


def is_tidy_clause(c: Clause, m: Moding) -> bool:
    return not tidy_clause_problems(c, m)


def is_tidy_program(p, m: Moding) -> bool:
    return all(is_tidy_clause(c, m) for c in _clauses(p))


def is_nicely_moded_query(q: Sequence[Atom], m: Moding) -> bool:
    """Output linear, and every dependency edge points strictly left to right."""
    if not output_linear(q, m):
        return False
    return all(i < j for i, j in dep_graph(q, m).edges)


def nicely_moded_clause_problems(c: Clause, m: Moding) -> list[str]:
    problems = []
    if not is_nicely_moded_query(c.body, m):
        problems.append("body is not nicely moded")
    if not input_linear(c.head, m):
        problems.append("head is not input linear")
    if var_in(c.head, m) & seq_vars(t for a in c.body for t in project(a, m).outputs):
        problems.append("head input variable occurs in a body output position")
    return problems


def is_nicely_moded(x, m: Moding) -> bool:
    """Nicely moded query, clause (with input-linear head) or program."""
    if isinstance(x, Clause):
        return not nicely_moded_clause_problems(x, m)
    if _is_program(x):
        return all(is_nicely_moded(c, m) for c in _clauses(x))
    return is_nicely_moded_query(tuple(x), m)


def well_3_moded_problems(c: Clause, m: Moding) -> list[str]:
    """Violations of the defining-occurrence conditions for ``c``.

    A defining occurrence of ``V`` is one in an input position of the head
    or in an output position of a body atom.
    """
    problems = []
    defined = set(var_in(c.head, m))
    body_out = [var_out(a, m) for a in c.body]
    for i, a in enumerate(c.body):
        missing = var_in(a, m) - defined
        if missing:
            names = ", ".join(sorted(_vname(v) for v in missing))
            problems.append(f"input of body atom {i + 1} uses undefined {names}")
        defined |= body_out[i]
    head_out = var_out(c.head, m)
    missing = head_out - defined
    if missing:
        names = ", ".join(sorted(_vname(v) for v in missing))
        problems.append(f"head output variable {names} has no defining occurrence")
    return problems


def is_well_3_moded(x, m: Moding) -> bool:
    """Well-3-moded clause, program or query (a query ``Q`` as clause ``p <- Q``)."""
    if isinstance(x, Clause):
        return not well_3_moded_problems(x, m)
    if _is_program(x):
        return all(is_well_3_moded(c, m) for c in _clauses(x))
    return not well_3_moded_problems(Clause(Struct("$query"), tuple(x)), m)


def is_well_moded(x, m: Moding) -> bool:
    if not m.is_two_valued():
        raise ValueError("well-modedness needs a two-valued moding")
    return is_well_3_moded(x, m)


def weakly_linear_heads(p, m: Moding) -> bool:
    return all(weakly_linear(c.head, m) for c in _clauses(p))


# ---------------------------------------------------------------------------
# grounding transform for weak tidiness


def grounding_transform(c: Clause, m: Moding) -> Clause:
    """Replace each variable in a ``+`` head position by a reserved fresh constant."""
    grounded = var_list(project(c.head, m).inputs)
    if not grounded:
        return c
    theta = Substitution({v: Struct(f"$g{i}") for i, v in enumerate(grounded)})
    return apply(theta, c)


def is_weakly_tidy(p, m: Moding, m2: Moding) -> bool:
    return all(is_tidy_clause(grounding_transform(c, m), m2) for c in _clauses(p))


# ---------------------------------------------------------------------------
# moding search

PROPERTIES = ("tidy", "nicely_moded", "well_moded")


class SearchCapExceeded(ValueError):
    pass


def _check(prop: str):
    return {
        "tidy": is_tidy_program,
        "nicely_moded": is_nicely_moded,
        "well_moded": is_well_moded,
    }[prop]


def candidate_modings(predicates: Sequence[Indicator], builtins=BUILTINS) -> Iterable[Moding]:
    positions = [(ind, i) for ind in predicates for i in range(ind[1])]
    for combo in itertools.product((PLUS, MINUS), repeat=len(positions)):
        modes: dict[Indicator, list[str]] = {ind: [] for ind in predicates}
        for (ind, _), c in zip(positions, combo):
            modes[ind].append(c)
        yield Moding(modes, builtins)


def search_modings(p, prop: str = "tidy", limit: int | None = None, cap: int = 16) -> tuple[list[Moding], int]:
    """All two-valued modings of the user predicates of ``p`` satisfying ``prop``.

    Returns the matches (at most ``limit``) and the number of candidates examined.
    """
    check = _check(prop)
    preds = sorted(user_predicates(p))
    total = sum(a for _, a in preds)
    if total > cap:
        raise SearchCapExceeded(f"{total} argument positions exceed the cap of {cap}")
    found: list[Moding] = []
    searched = 0
    for cand in candidate_modings(preds, getattr(p, "builtins", BUILTINS)):
        searched += 1
        if check(p, cand):
            found.append(cand)
            if limit is not None and len(found) >= limit:
                break
    return found, searched


def user_predicates(p) -> set[Indicator]:
    builtins = getattr(p, "builtins", BUILTINS)
    out = set()
    for c in _clauses(p):
        for a in (c.head, *c.body):
            if a.indicator not in builtins:
                out.add(a.indicator)
    return out


def _clauses(p) -> tuple[Clause, ...]:
    if isinstance(p, Clause):
        return (p,)
    return tuple(getattr(p, "clauses", p))


def _is_program(x) -> bool:
    if hasattr(x, "clauses"):
        return True
    return bool(x) and all(isinstance(c, Clause) for c in x)


def _vname(v: Var) -> str:
    return v.name or f"_G{v.id}"
