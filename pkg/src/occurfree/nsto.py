"""Deciding NSTO and WNSTO for equation sets, exactly and by sufficient conditions.

``E`` is NSTO when no MMA run on ``E`` performs the occur-check failure
action, and WNSTO when at least one run avoids it.  The exact deciders
explore the run space (the action for a chosen equation is determined, so
only the choice of equation branches) with memoization modulo variable
renaming.  The certificate functions check the sufficient conditions based
on linearity, modes and splitting of the set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .canonical import equation_key
from .modes import (
    Moding,
    NEUTRAL,
    input_linear,
    input_output_disjoint,
    inputs_ground,
    output_linear,
    project,
    weakly_linear,
)
from .terms import Atom, Equation, Struct, apply, equations, is_linear, seq_vars, variables
from .unify import (
    MMA,
    Action,
    Choice,
    EquationSet,
    Failure,
    FirstApplicable,
    RunTrace,
    Scripted,
    applicable,
    extract_mgu,
    run,
    _rewrite,
)

NSTO = "NSTO"
WNSTO = "WNSTO"
DEFAULT_BUDGET = 100_000


@dataclass(frozen=True)
class Verdict:
    """Outcome of an NSTO/WNSTO check.

    ``value`` is ``None`` when the node budget ran out.  ``witness`` is a
    run performing the occur-check failure (refuting NSTO) or an
    occur-check-free run (establishing WNSTO).
    """

    property: str
    value: bool | None
    witness: RunTrace | None = None
    certificate: str | None = None
    explored: int = 0

    @property
    def budget_exceeded(self) -> bool:
        return self.value is None

    def value_text(self) -> str:
        return "budget_exceeded" if self.value is None else str(self.value).lower()

    def to_json(self) -> dict:
        out = {"property": self.property, "value": self.value_text(), "certificate": self.certificate}
        if self.witness is not None:
            out["witness"] = [f"{c.action.label}:{','.join(map(str, c.indices))}" for c in self.witness.choices()]
            out["witness_outcome"] = self.witness.outcome
        return out


def _as_set(E) -> EquationSet:
    if isinstance(E, EquationSet):
        return E
    if isinstance(E, Equation):
        return EquationSet.of([E])
    return EquationSet.of(E)


def _replay(E: EquationSet, path: list[Choice]) -> RunTrace:
    return run(E, Scripted(path), MMA)


def _search(E: EquationSet, budget: int, goal):
    """DFS over MMA states; ``goal(state, choices)`` returns a finishing choice list or ``None``."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    seen: set = set()
    stack: list[tuple[EquationSet, list[Choice]]] = [(E, [])]
    explored = 0
    while stack:
        state, path = stack.pop()
        key = equation_key(state.equations)
        if key in seen:
            continue
        seen.add(key)
        explored += 1
        if explored > budget:
            return None, explored, True
        choices = applicable(state, MMA)
        hit = goal(state, choices)
        if hit is not None:
            return path + hit, explored, False
        for c in reversed(choices):
            if c.action in (Action.OCCUR_FAIL, Action.CLASH):
                continue
            nxt = _rewrite(state, c)
            stack.append((nxt, path + [c]))
    return None, explored, False


def decide_nsto(E, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Exact NSTO check; a ``False`` verdict carries a run ending in action (6)."""
    E = _as_set(E)

    def occur(state, choices):
        for c in choices:
            if c.action is Action.OCCUR_FAIL:
                return [c]
        return None

    path, explored, over = _search(E, budget, occur)
    if over:
        return Verdict(NSTO, None, explored=explored, certificate="exact")
    if path is None:
        return Verdict(NSTO, True, explored=explored, certificate="exact")
    return Verdict(NSTO, False, _replay(E, path), "exact", explored)


def decide_wnsto(E, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Exact WNSTO check; a ``True`` verdict carries an occur-check-free run."""
    E = _as_set(E)

    def finish(state, choices):
        if not choices:
            return []
        for c in choices:
            if c.action is Action.CLASH:
                return [c]
        return None

    path, explored, over = _search(E, budget, finish)
    if over:
        return Verdict(WNSTO, None, explored=explored, certificate="exact")
    if path is None:
        return Verdict(WNSTO, False, explored=explored, certificate="exact")
    return Verdict(WNSTO, True, _replay(E, path), "exact", explored)


# ---------------------------------------------------------------------------
# run-space enumeration


@dataclass
class Terminal:
    """A distinct end state of a family of runs, with the number of runs reaching it."""

    state: EquationSet | None
    failure: Failure | None
    runs: int
    example: list[Choice] = field(default_factory=list)


class BudgetExceeded(RuntimeError):
    pass


def enumerate_terminals(E, algorithm: str = MMA, budget: int = DEFAULT_BUDGET) -> list[Terminal]:
    """All end states of all runs of ``algorithm`` on ``E``, with run counts.

    End states are merged modulo renaming; run counts are exact path counts.
    """
    E = _as_set(E)
    memo: dict = {}
    terminals: dict = {}

    def visit(state: EquationSet, path: list[Choice]) -> dict:
        key = equation_key(state.equations)
        if key in memo:
            return memo[key]
        if len(memo) >= budget:
            raise BudgetExceeded(f"more than {budget} states")
        choices = applicable(state, algorithm)
        out: dict = {}
        if not choices:
            terminals.setdefault(("ok", key), Terminal(state, None, 0, path))
            out[("ok", key)] = 1
        for c in choices:
            nxt = _rewrite(state, c)
            if isinstance(nxt, Failure):
                fk = ("fail", nxt.reason, key, c.indices)
                terminals.setdefault(fk, Terminal(None, nxt, 0, path + [c]))
                out[fk] = out.get(fk, 0) + 1
            else:
                for k2, n in visit(nxt, path + [c]).items():
                    out[k2] = out.get(k2, 0) + n
        memo[key] = out
        return out

    for k2, n in visit(E, []).items():
        terminals[k2].runs = n
    return list(terminals.values())


# ---------------------------------------------------------------------------
# sufficient conditions


def nsto_by_linearity(s: Sequence, t: Sequence) -> bool:
    """Variable-disjoint sequences, one of them linear."""
    s, t = tuple(s), tuple(t)
    if len(s) != len(t):
        raise ValueError(f"sequence lengths differ: {len(s)} vs {len(t)}")
    if seq_vars(s) & seq_vars(t):
        return False
    return is_linear(s) or is_linear(t)


def _same_predicate(a: Atom, h: Atom) -> None:
    if a.indicator != h.indicator:
        raise ValueError(f"predicate mismatch: {a.indicator} vs {h.indicator}")


def nsto_by_atom_conditions(a: Atom, h: Atom, m: Moding) -> bool:
    """Variable disjoint; one atom input-output disjoint; one input linear and the other output linear."""
    _same_predicate(a, h)
    if NEUTRAL in m.mode(a.indicator):
        return False
    if variables(a) & variables(h):
        return False
    if not (input_output_disjoint(a, m) or input_output_disjoint(h, m)):
        return False
    return (input_linear(a, m) and output_linear(h, m)) or (input_linear(h, m) and output_linear(a, m))


def wnsto_by_weakly_linear(a: Atom, h: Atom, m: Moding) -> bool:
    """Input positions of ``a`` ground and ``h`` weakly linear."""
    _same_predicate(a, h)
    if variables(a) & variables(h):
        raise ValueError("atoms must be variable disjoint")
    return inputs_ground(a, m) and weakly_linear(h, m)


def wnsto_by_split(E1, E2, budget: int = DEFAULT_BUDGET) -> Verdict:
    """WNSTO of ``E1 ∪ E2`` from NSTO of ``E1`` and of ``E2`` instantiated by an mgu of ``E1``.

    Falls back to the exact decision when the split does not certify.
    """
    E1, E2 = _as_set(E1), _as_set(E2)
    union = EquationSet.of([*E1.equations, *E2.equations])
    v1 = decide_nsto(E1, budget)
    if v1.value is True:
        r1 = run(E1, FirstApplicable(), MMA)
        if not r1.succeeded:
            return Verdict(WNSTO, True, certificate="split", explored=v1.explored)
        theta = extract_mgu(r1.final)
        v2 = decide_nsto(EquationSet(tuple(apply(theta, e) for e in E2.equations)), budget)
        if v2.value is True:
            return Verdict(WNSTO, True, certificate="split", explored=v1.explored + v2.explored)
    fallback = decide_wnsto(union, budget)
    return fallback


def split_by_moding(a: Atom, h: Atom, m: Moding) -> tuple[list[Equation], list[Equation]]:
    """Equations between input positions, and between all other positions."""
    pa, ph = project(a, m), project(h, m)
    e1 = equations(pa.inputs, ph.inputs)
    e2 = equations(pa.outputs + pa.neutral, ph.outputs + ph.neutral)
    return e1, e2


# ---------------------------------------------------------------------------
# combined classification


@dataclass(frozen=True)
class Classification:
    nsto: Verdict
    wnsto: Verdict


def classify(a: Atom, h: Atom, m: Moding | None = None, budget: int = DEFAULT_BUDGET) -> Classification:
    """NSTO and WNSTO verdicts for ``a ≐ h``, trying certificates cheapest first.

    Order: atom conditions, linearity, weakly-linear head, moded split,
    exact search.
    """
    _same_predicate(a, h)
    E = EquationSet.unify(a.args, h.args)
    nsto_v: Verdict | None = None
    if m is not None:
        try:
            if nsto_by_atom_conditions(a, h, m):
                nsto_v = Verdict(NSTO, True, certificate="atom-conditions")
        except KeyError:
            m = None
    if nsto_v is None and nsto_by_linearity(a.args, h.args):
        nsto_v = Verdict(NSTO, True, certificate="linearity")
    if nsto_v is not None:
        return Classification(nsto_v, Verdict(WNSTO, True, certificate=nsto_v.certificate))

    wnsto_v: Verdict | None = None
    if m is not None and not (variables(a) & variables(h)):
        if wnsto_by_weakly_linear(a, h, m):
            wnsto_v = Verdict(WNSTO, True, certificate="weakly-linear")
        else:
            e1, e2 = split_by_moding(a, h, m)
            if e1:
                v = wnsto_by_split(e1, e2, budget)
                if v.value is True and v.certificate == "split":
                    wnsto_v = v
    nsto_v = decide_nsto(E, budget)
    if wnsto_v is None:
        if nsto_v.value is True:
            wnsto_v = Verdict(WNSTO, True, certificate="exact")
        else:
            wnsto_v = decide_wnsto(E, budget)
    return Classification(nsto_v, wnsto_v)


def classify_equations(E, budget: int = DEFAULT_BUDGET) -> Classification:
    """Like :func:`classify` for a bare equation set (no modes, so only linearity certifies)."""
    E = _as_set(E)
    if len(E) == 1 and all(isinstance(t, Struct) for t in E[0].terms()):
        a, h = E[0].lhs, E[0].rhs
        if a.functor == h.functor and len(a.args) == len(h.args):
            return classify(a, h, None, budget)
    lhs = tuple(e.lhs for e in E.equations)
    rhs = tuple(e.rhs for e in E.equations)
    if nsto_by_linearity(lhs, rhs):
        v = Verdict(NSTO, True, certificate="linearity")
        return Classification(v, Verdict(WNSTO, True, certificate="linearity"))
    nsto_v = decide_nsto(E, budget)
    wnsto_v = Verdict(WNSTO, True, certificate="exact") if nsto_v.value is True else decide_wnsto(E, budget)
    return Classification(nsto_v, wnsto_v)
