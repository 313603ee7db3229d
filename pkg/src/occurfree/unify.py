"""Martelli-Montanari unification (MMA) and its occur-check-free variant (MMA⁻).

Both algorithms rewrite an :class:`EquationSet` one equation (or, for
collapsing, one pair of equations) at a time.  MMA has the actions

    (1) decompose, (2) clash, (3) delete, (4) orient, (5) eliminate, (6) occur-check failure

and MMA⁻ drops (6) and replaces (5) by

    (5a) variable-variable elimination, (5b) collapse of ``X ≐ t, X ≐ u``.

A run is driven by a :class:`Strategy` and recorded as a :class:`RunTrace`.
"""

from __future__ import annotations

import enum
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .terms import (
    Equation,
    Expression,
    Struct,
    Substitution,
    Var,
    apply,
    equations,
    iter_vars,
    max_arity,
    occurs_in,
    term_size,
)

MMA = "mma"
MMA_MINUS = "mma-minus"
ALGORITHMS = (MMA, MMA_MINUS)


class Action(enum.Enum):
    DECOMPOSE = "1"
    CLASH = "2"
    DELETE = "3"
    ORIENT = "4"
    ELIMINATE = "5"
    OCCUR_FAIL = "6"
    VAR_VAR = "5a"
    COLLAPSE = "5b"

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, text: str) -> "Action":
        for a in cls:
            if text in (a.label, a.value, a.name):
                return a
        raise ValueError(f"unknown action {text!r}")


MMA_ONLY = {Action.ELIMINATE, Action.OCCUR_FAIL}
MMA_MINUS_ONLY = {Action.VAR_VAR, Action.COLLAPSE}
FAILING = {Action.CLASH, Action.OCCUR_FAIL}


@dataclass(frozen=True, order=True)
class Choice:
    """An action applied to the equation(s) at ``indices`` of the current set."""

    indices: tuple[int, ...]
    action: Action = field(compare=False)

    def __str__(self) -> str:
        return f"{self.action.label}({','.join(map(str, self.indices))})"


class InapplicableChoice(ValueError):
    pass


class MeasureViolation(AssertionError):
    pass


# ---------------------------------------------------------------------------
# equation sets


@dataclass(frozen=True)
class EquationSet:
    """Ordered multiset of equations, each carrying an insertion timestamp."""

    equations: tuple[Equation, ...] = ()
    stamps: tuple[int, ...] = ()
    next_stamp: int = 0

    def __post_init__(self):
        if len(self.stamps) != len(self.equations):
            object.__setattr__(self, "stamps", tuple(range(len(self.equations))))
            object.__setattr__(self, "next_stamp", max(self.next_stamp, len(self.equations)))

    @classmethod
    def of(cls, eqs: Iterable[Equation | tuple]) -> "EquationSet":
        out: list[Equation] = []
        for e in eqs:
            if isinstance(e, Equation):
                out.extend(equations(e.lhs, e.rhs))
            else:
                out.extend(equations(*e))
        return cls(tuple(out))

    @classmethod
    def unify(cls, s: Expression, t: Expression) -> "EquationSet":
        """The set for ``s ≐ t``; tuples are expanded pairwise."""
        return cls(tuple(equations(s, t)))

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def __getitem__(self, i: int) -> Equation:
        return self.equations[i]

    def terms(self):
        return tuple(t for e in self.equations for t in (e.lhs, e.rhs))

    def replace(self, updates: dict[int, Equation], drop: Iterable[int] = (), extra: Sequence[Equation] = ()) -> "EquationSet":
        drop = set(drop)
        eqs, stamps = [], []
        for i, (e, s) in enumerate(zip(self.equations, self.stamps)):
            if i in drop:
                continue
            eqs.append(updates.get(i, e))
            stamps.append(s)
        n = self.next_stamp
        for e in extra:
            eqs.append(e)
            stamps.append(n)
            n += 1
        return EquationSet(tuple(eqs), tuple(stamps), n)

    def as_multiset(self) -> Counter:
        return Counter(self.equations)

    def __str__(self) -> str:
        from .parser import render

        return render(self)


def _occurrences(E: EquationSet) -> Counter:
    return Counter(iter_vars(E.terms()))


def _elsewhere(v: Var, eq: Equation, counts: Counter) -> bool:
    own = sum(1 for x in iter_vars((eq.lhs, eq.rhs)) if x == v)
    return counts[v] > own


def _single_action(eq: Equation, counts: Counter, algorithm: str) -> Action | None:
    l, r = eq.lhs, eq.rhs
    if isinstance(l, Struct) and isinstance(r, Struct):
        if l.functor == r.functor and len(l.args) == len(r.args):
            return Action.DECOMPOSE
        return Action.CLASH
    if isinstance(l, Struct):
        return Action.ORIENT
    if r == l:
        return Action.DELETE
    if algorithm == MMA:
        if occurs_in(l, r):
            return Action.OCCUR_FAIL
        if _elsewhere(l, eq, counts):
            return Action.ELIMINATE
        return None
    if isinstance(r, Var) and _elsewhere(l, eq, counts):
        return Action.VAR_VAR
    return None


def applicable(E: EquationSet, algorithm: str = MMA) -> list[Choice]:
    """Every choice applicable in ``E``, sorted by equation indices."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    counts = _occurrences(E)
    out = []
    for i, eq in enumerate(E.equations):
        a = _single_action(eq, counts, algorithm)
        if a is not None:
            out.append(Choice((i,), a))
    if algorithm == MMA_MINUS:
        groups: dict[Var, list[int]] = {}
        for i, eq in enumerate(E.equations):
            if isinstance(eq.lhs, Var) and isinstance(eq.rhs, Struct):
                groups.setdefault(eq.lhs, []).append(i)
        for idx in groups.values():
            for a in range(len(idx)):
                for b in range(a + 1, len(idx)):
                    out.append(Choice((idx[a], idx[b]), Action.COLLAPSE))
    out.sort()
    return out


def applicable_mma(E: EquationSet) -> list[Choice]:
    return applicable(E, MMA)


def applicable_mma_minus(E: EquationSet) -> list[Choice]:
    return applicable(E, MMA_MINUS)


@dataclass(frozen=True)
class Failure:
    reason: str  # "clash" or "occur"
    equation: Equation
    step: int = -1

    def describe(self) -> str:
        from .parser import render

        l, r = self.equation.lhs, self.equation.rhs
        if self.reason == "clash":
            return f"clash {_head(l)}/{_head(r)}"
        return f"occur {render(l)}/{render(r)}"


def _head(t) -> str:
    from .parser import render

    if isinstance(t, Struct):
        return t.functor if not t.args else f"{t.functor}/{len(t.args)}"
    return render(t)


def step(E: EquationSet, choice: Choice, algorithm: str = MMA) -> EquationSet | Failure:
    """Apply ``choice`` to ``E``; failing actions return a :class:`Failure`."""
    if choice not in applicable(E, algorithm) or _action_at(E, choice, algorithm) != choice.action:
        raise InapplicableChoice(f"{choice} is not applicable under {algorithm}")
    return _rewrite(E, choice)


def _action_at(E: EquationSet, choice: Choice, algorithm: str) -> Action | None:
    for c in applicable(E, algorithm):
        if c.indices == choice.indices:
            return c.action
    return None


def _rewrite(E: EquationSet, choice: Choice) -> EquationSet | Failure:
    a = choice.action
    i = choice.indices[0]
    eq = E.equations[i]
    if a is Action.CLASH:
        return Failure("clash", eq)
    if a is Action.OCCUR_FAIL:
        return Failure("occur", eq)
    if a is Action.DECOMPOSE:
        kids = [Equation(x, y) for x, y in zip(eq.lhs.args, eq.rhs.args)]
        return E.replace({}, drop=[i], extra=kids)
    if a is Action.DELETE:
        return E.replace({}, drop=[i])
    if a is Action.ORIENT:
        return E.replace({i: Equation(eq.rhs, eq.lhs)})
    if a in (Action.ELIMINATE, Action.VAR_VAR):
        theta = Substitution({eq.lhs: eq.rhs})
        updates = {j: apply(theta, e) for j, e in enumerate(E.equations) if j != i}
        return E.replace(updates)
    if a is Action.COLLAPSE:
        j = choice.indices[1]
        small, big = _collapse_order(E, i, j)
        s1 = E.equations[small].rhs
        s2 = E.equations[big].rhs
        return E.replace({big: Equation(s1, s2)})
    raise AssertionError(a)


def _collapse_order(E: EquationSet, i: int, j: int) -> tuple[int, int]:
    """Indices ``(kept, rewritten)``: the smaller right-hand side is kept; ties keep the older equation."""
    ti, tj = E.equations[i].rhs, E.equations[j].rhs
    ki = (term_size(ti), E.stamps[i])
    kj = (term_size(tj), E.stamps[j])
    return (i, j) if ki <= kj else (j, i)


# ---------------------------------------------------------------------------
# strategies


class Strategy:
    def choose(self, E: EquationSet, choices: list[Choice], step_no: int) -> Choice:
        raise NotImplementedError


class FirstApplicable(Strategy):
    """Lowest equation index first (collapse pairs are ordered lexicographically)."""

    def choose(self, E, choices, step_no):
        return choices[0]

    def __repr__(self):
        return "FirstApplicable()"


class SeededRandom(Strategy):
    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, E, choices, step_no):
        return self.rng.choice(choices)

    def __repr__(self):
        return f"SeededRandom({self.seed})"


class Scripted(Strategy):
    """Replays a fixed sequence of choices (given as :class:`Choice` or index tuples)."""

    def __init__(self, script: Sequence[Choice | int | tuple[int, ...]]):
        self.script = list(script)

    def choose(self, E, choices, step_no):
        if step_no >= len(self.script):
            raise InapplicableChoice(f"script exhausted at step {step_no}")
        want = self.script[step_no]
        if isinstance(want, Choice):
            key = want.indices
        elif isinstance(want, int):
            key = (want,)
        else:
            key = tuple(want)
        for c in choices:
            if c.indices == key and (not isinstance(want, Choice) or c.action == want.action):
                return c
        raise InapplicableChoice(f"scripted choice {want} is not applicable at step {step_no}")

    def __repr__(self):
        return f"Scripted({self.script!r})"


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class Step:
    choice: Choice
    before: EquationSet
    after: EquationSet | None  # None when the step halts with failure


@dataclass(frozen=True)
class RunTrace:
    algorithm: str
    initial: EquationSet
    steps: tuple[Step, ...]
    failure: Failure | None = None

    @property
    def final(self) -> EquationSet:
        for s in reversed(self.steps):
            if s.after is not None:
                return s.after
        return self.initial

    @property
    def succeeded(self) -> bool:
        return self.failure is None

    @property
    def outcome(self) -> str:
        return "success" if self.failure is None else f"failure({self.failure.reason})"

    def choices(self) -> list[Choice]:
        return [s.choice for s in self.steps]

    def actions(self) -> list[Action]:
        return [s.choice.action for s in self.steps]

    def occur_check_free(self) -> bool:
        return Action.OCCUR_FAIL not in self.actions()

    def render(self) -> str:
        from .parser import render

        lines = [f"0 start - | {render(self.initial)}"]
        for n, s in enumerate(self.steps, 1):
            idx = ",".join(map(str, s.choice.indices))
            rhs = render(s.after) if s.after is not None else "fail"
            lines.append(f"{n} {s.choice.action.label} {idx} | {rhs}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        from .parser import render

        return {
            "algorithm": self.algorithm,
            "initial": render(self.initial),
            "steps": [
                {
                    "step": n,
                    "action": s.choice.action.label,
                    "indices": list(s.choice.indices),
                    "set": render(s.after) if s.after is not None else None,
                }
                for n, s in enumerate(self.steps, 1)
            ],
            "outcome": self.outcome,
            "final": render(self.final) if self.failure is None else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def run(E: EquationSet, strategy: Strategy | None = None, algorithm: str = MMA, check_measure: bool = False,
        max_steps: int | None = None) -> RunTrace:
    """Execute one maximal run of ``algorithm`` on ``E``.

    With ``check_measure`` every MMA⁻ step is checked to strictly decrease
    the termination measure; a violation raises :class:`MeasureViolation`.
    ``max_steps`` turns a (supposedly impossible) endless run into an error.
    """
    if strategy is None:
        strategy = FirstApplicable()
    if check_measure and algorithm != MMA_MINUS:
        raise ValueError("the termination measure is defined for MMA⁻ runs")
    k = choose_k(E)
    steps: list[Step] = []
    cur = E
    while True:
        choices = applicable(cur, algorithm)
        if not choices:
            return RunTrace(algorithm, E, tuple(steps))
        if max_steps is not None and len(steps) >= max_steps:
            raise RuntimeError(f"run exceeded {max_steps} steps")
        c = strategy.choose(cur, choices, len(steps))
        nxt = _rewrite(cur, c)
        if isinstance(nxt, Failure):
            steps.append(Step(c, cur, None))
            f = Failure(nxt.reason, nxt.equation, len(steps))
            return RunTrace(algorithm, E, tuple(steps), f)
        if check_measure:
            before, after = measure(cur, k), measure(nxt, k)
            if not after < before:
                raise MeasureViolation(f"{c} did not decrease the measure: {before} -> {after}")
        steps.append(Step(c, cur, nxt))
        cur = nxt


def replay(trace: RunTrace) -> RunTrace:
    return run(trace.initial, Scripted(trace.choices()), trace.algorithm)


# ---------------------------------------------------------------------------
# solved forms


def is_semi_solved(E: EquationSet) -> bool:
    counts = _occurrences(E)
    lhs = []
    for eq in E.equations:
        if not isinstance(eq.lhs, Var) or eq.lhs == eq.rhs:
            return False
        lhs.append(eq.lhs)
        if isinstance(eq.rhs, Var) and counts[eq.lhs] != 1:
            return False
    return len(set(lhs)) == len(lhs)


def is_solved(E: EquationSet) -> bool:
    if not is_semi_solved(E):
        return False
    heads = {eq.lhs for eq in E.equations}
    return not any(v in heads for eq in E.equations for v in iter_vars(eq.rhs))


class NotSolved(ValueError):
    pass


def extract_mgu(E: EquationSet) -> Substitution:
    if not is_solved(E):
        raise NotSolved("equation set is not in solved form")
    return Substitution({eq.lhs: eq.rhs for eq in E.equations})


def finish_semi_solved(E: EquationSet) -> Substitution | None:
    """Complete a semi-solved set with MMA; ``None`` means it has no finite unifier."""
    if not is_semi_solved(E):
        raise ValueError("equation set is not in semi-solved form")
    trace = run(E, FirstApplicable(), MMA)
    if trace.failure is not None:
        return None
    return extract_mgu(trace.final)


def unify_mma(s: Expression, t: Expression) -> Substitution | None:
    """An mgu of ``s`` and ``t`` computed by a FirstApplicable MMA run, or ``None``."""
    trace = run(EquationSet.unify(s, t), FirstApplicable(), MMA)
    return extract_mgu(trace.final) if trace.succeeded else None


def composition_of_run(trace: RunTrace) -> Substitution:
    """Compose ``{X/t}`` for each eliminated equation ``X ≐ t``, in run order.

    Final equations whose variable was never eliminated (it occurred
    nowhere else, so elimination would change nothing) are appended as
    trailing bindings.
    """
    from .terms import compose

    theta = Substitution()
    eliminated = set()
    for s in trace.steps:
        if s.choice.action is Action.ELIMINATE:
            eq = s.before.equations[s.choice.indices[0]]
            eliminated.add(eq.lhs)
            theta = compose(theta, Substitution({eq.lhs: eq.rhs}))
    if trace.succeeded:
        for eq in trace.final.equations:
            if isinstance(eq.lhs, Var) and eq.lhs not in eliminated:
                theta = compose(theta, Substitution({eq.lhs: eq.rhs}))
    return theta


# ---------------------------------------------------------------------------
# termination measure


def choose_k(E: EquationSet) -> int:
    return max(2, 1 + max_arity(E.terms()))


def _check_k(E: EquationSet, k: int, alternative: bool) -> None:
    top = max_arity(E.terms())
    if alternative:
        if k < max(2, top):
            raise ValueError(f"k={k} is below max(2, max arity)={max(2, top)}")
    elif k < 2 or k <= top:
        raise ValueError(f"k={k} must be at least 2 and exceed every arity (max {top})")


def norm(E: EquationSet | Sequence[Equation], k: int, alternative: bool = False) -> int:
    """Sum over equations of ``k ** max(|lhs|, |rhs|)``.

    ``alternative`` admits ``k = max(2, max arity)`` instead of requiring
    ``k`` to exceed every arity.
    """
    if not isinstance(E, EquationSet):
        E = EquationSet(tuple(E))
    _check_k(E, k, alternative)
    return sum(k ** max(term_size(e.lhs), term_size(e.rhs)) for e in E.equations)


def measure(E: EquationSet, k: int) -> tuple[int, int, int]:
    n = norm(E, k)
    counts = _occurrences(E)
    f45a = sum(1 for eq in E.equations if _single_action(eq, counts, MMA_MINUS) in (Action.ORIENT, Action.VAR_VAR))
    f5b = sum(1 for eq in E.equations if isinstance(eq.lhs, Var) and isinstance(eq.rhs, Struct))
    return (n, f45a, f5b)
