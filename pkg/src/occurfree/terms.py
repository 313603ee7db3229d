"""Finite first-order terms, atoms, equations and substitutions.

Atoms share the representation of compound terms: an atom ``p(t1,...,tn)``
is a :class:`Struct` whose functor is the predicate symbol.  Equations may
relate terms, atoms or tuples of them; tuple equations are expanded
pairwise by :func:`equations`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union


@dataclass(frozen=True, slots=True)
class Var:
    """A logic variable, identified by ``id``; ``name`` is display-only."""

    id: int
    name: str | None = field(default=None, compare=False)

    def __repr__(self) -> str:
        return f"Var({self.id}, {self.name!r})"


@dataclass(frozen=True, slots=True)
class Struct:
    """Compound term ``functor(args...)``; a constant has no args."""

    functor: str
    args: tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))

    def __repr__(self) -> str:
        if not self.args:
            return f"Struct({self.functor!r})"
        return f"Struct({self.functor!r}, {self.args!r})"


Term = Union[Var, Struct]
Atom = Struct
Expression = Union[Term, tuple]


def const(name: str) -> Struct:
    return Struct(name)


def is_var(t: object) -> bool:
    return isinstance(t, Var)


def is_ground(t: Expression) -> bool:
    return next(iter_vars(t), None) is None


def iter_vars(e: Expression) -> Iterator[Var]:
    """Yield every variable occurrence in ``e``, left to right."""
    stack = [e]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Struct):
            stack.extend(reversed(t.args))
        elif hasattr(t, "terms"):
            stack.extend(reversed(tuple(t.terms())))
        else:
            stack.extend(reversed(tuple(t)))


def variables(e: Expression) -> set[Var]:
    return set(iter_vars(e))


def var_list(e: Expression) -> list[Var]:
    """Distinct variables of ``e`` in order of first occurrence."""
    return list(dict.fromkeys(iter_vars(e)))


def occurs_in(v: Var, t: Expression) -> bool:
    return any(x == v for x in iter_vars(t))


def term_size(t: Expression) -> int:
    """Number of variable and function-symbol occurrences in ``t``."""
    if isinstance(t, Var):
        return 1
    if isinstance(t, Struct):
        return 1 + sum(term_size(a) for a in t.args)
    return sum(term_size(a) for a in t)


def is_linear(e: Expression) -> bool:
    seen = set()
    for v in iter_vars(e):
        if v in seen:
            return False
        seen.add(v)
    return True


def max_arity(e: Expression) -> int:
    if isinstance(e, Var):
        return 0
    if isinstance(e, Struct):
        return max([len(e.args), *(max_arity(a) for a in e.args)])
    return max((max_arity(a) for a in e), default=0)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Struct):
        for a in t.args:
            yield from subterms(a)


# ---------------------------------------------------------------------------
# substitutions


class Substitution(Mapping[Var, Term]):
    """Immutable finite map from variables to terms, without ``X/X`` bindings."""

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        m = {}
        for v, t in items:
            if not isinstance(v, Var):
                raise TypeError(f"substitution domain must be variables, got {v!r}")
            if t != v:
                m[v] = t
        self._map = m
        self._hash = None

    def __getitem__(self, v: Var) -> Term:
        return self._map[v]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"{v!r}: {t!r}" for v, t in self._map.items())
        return f"Substitution({{{inner}}})"

    def domain(self) -> set[Var]:
        return set(self._map)

    def range_vars(self) -> set[Var]:
        out: set[Var] = set()
        for t in self._map.values():
            out.update(iter_vars(t))
        return out

    def all_vars(self) -> set[Var]:
        return self.domain() | self.range_vars()

    def is_idempotent(self) -> bool:
        return not (self.domain() & self.range_vars())

    def __call__(self, e):
        return apply(self, e)


EMPTY = Substitution()


def apply(theta: Mapping[Var, Term], e):
    """Simultaneously replace each bound variable of ``e``.

    Works on terms, tuples/lists of expressions, equations and clauses
    (anything exposing ``map_terms``).  Unchanged subterms are shared.
    """
    if not theta:
        return e
    m = theta._map if isinstance(theta, Substitution) else dict(theta)
    if isinstance(e, (Var, Struct)):
        return _apply_term(m, e)
    if isinstance(e, (tuple, list)):
        return type(e)(apply(theta, a) for a in e)
    if hasattr(e, "map_terms"):
        return e.map_terms(lambda t: _apply_term(m, t))
    raise TypeError(f"cannot apply a substitution to {type(e).__name__}")


def _apply_term(m: dict, t: Term) -> Term:
    if type(t) is Var:
        return m.get(t, t)
    args = t.args
    if not args:
        return t
    new = tuple([_apply_term(m, a) for a in args])
    for a, b in zip(args, new):
        if a is not b:
            return Struct(t.functor, new)
    return t


def compose(theta: Substitution, gamma: Substitution) -> Substitution:
    """Return ``theta . gamma``: first ``theta``, then ``gamma``."""
    out = {v: apply(gamma, t) for v, t in theta.items()}
    for v, t in gamma.items():
        if v not in theta:
            out[v] = t
    return Substitution(out)


def compose_all(subs: Iterable[Substitution]) -> Substitution:
    result = EMPTY
    for s in subs:
        result = compose(result, s)
    return result


def restrict(theta: Substitution, vs: Iterable[Var]) -> Substitution:
    keep = set(vs)
    return Substitution((v, t) for v, t in theta.items() if v in keep)


def linear_for(theta: Substitution, vs: Iterable[Var]) -> bool:
    """True iff for any two distinct ``X, Y`` in ``vs`` the pair ``Xθ, Yθ`` is linear."""
    vs = list(dict.fromkeys(vs))
    images = [apply(theta, v) for v in vs]
    for i, j in itertools.combinations(range(len(images)), 2):
        if not is_linear((images[i], images[j])):
            return False
    return True


def is_renaming(theta: Mapping[Var, Term]) -> bool:
    vals = list(theta.values())
    return all(isinstance(t, Var) for t in vals) and len(set(vals)) == len(vals)


# ---------------------------------------------------------------------------
# fresh variables


class VarSupply:
    """Monotone source of fresh variables for one analysis session."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)

    def fresh(self, name: str | None = None) -> Var:
        return Var(next(self._counter), name)

    @classmethod
    def above(cls, *exprs) -> "VarSupply":
        """A supply whose ids exceed every variable id in ``exprs``."""
        top = -1
        for e in exprs:
            for v in iter_vars(_as_expr(e)):
                top = max(top, v.id)
        return cls(top + 1)


def _as_expr(e):
    if isinstance(e, (Var, Struct, tuple)):
        return e
    if hasattr(e, "terms"):
        return tuple(e.terms())
    return tuple(e)


# ---------------------------------------------------------------------------
# equations


@dataclass(frozen=True, slots=True)
class Equation:
    lhs: Term
    rhs: Term

    def map_terms(self, fn) -> "Equation":
        return Equation(fn(self.lhs), fn(self.rhs))

    def terms(self):
        return (self.lhs, self.rhs)


def equations(s: Expression, t: Expression) -> list[Equation]:
    """Expand ``s ≐ t`` into equations between terms/atoms.

    Tuples are expanded pairwise; atoms and terms are kept whole.
    """
    if isinstance(s, (tuple, list)) or isinstance(t, (tuple, list)):
        if not (isinstance(s, (tuple, list)) and isinstance(t, (tuple, list))):
            raise ValueError("cannot equate a tuple with a non-tuple")
        if len(s) != len(t):
            raise ValueError(f"tuple lengths differ: {len(s)} vs {len(t)}")
        out: list[Equation] = []
        for a, b in zip(s, t):
            out.extend(equations(a, b))
        return out
    return [Equation(s, t)]


# ---------------------------------------------------------------------------
# clauses


@dataclass(frozen=True, slots=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()

    def map_terms(self, fn) -> "Clause":
        return Clause(fn(self.head), tuple(fn(a) for a in self.body))

    def terms(self):
        return (self.head, *self.body)

    @property
    def indicator(self) -> tuple[str, int]:
        return self.head.indicator


def rename(e, supply: VarSupply, mapping: dict[Var, Var] | None = None):
    """Consistently replace every variable of ``e`` by a fresh one."""
    if mapping is None:
        mapping = {}
    for v in iter_vars(_as_expr(e)):
        if v not in mapping:
            mapping[v] = supply.fresh(v.name)
    return apply(Substitution(mapping), e)


def standardize_apart(c: Clause, avoid: Iterable[Var] = (), supply: VarSupply | None = None) -> Clause:
    """A variant of ``c`` whose variables are fresh and disjoint from ``avoid``."""
    if supply is None:
        supply = VarSupply.above(c, tuple(avoid))
    if is_ground(c.terms()):
        return c
    return rename(c, supply)


def is_variant(a, b) -> bool:
    """True iff ``a`` and ``b`` are equal up to a bijective variable renaming."""
    fwd: dict[Var, Var] = {}
    bwd: dict[Var, Var] = {}

    def walk(x, y) -> bool:
        if isinstance(x, Var) or isinstance(y, Var):
            if not (isinstance(x, Var) and isinstance(y, Var)):
                return False
            if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
                return False
            return True
        if isinstance(x, Struct):
            if not isinstance(y, Struct) or x.functor != y.functor or len(x.args) != len(y.args):
                return False
            return all(walk(p, q) for p, q in zip(x.args, y.args))
        x, y = _as_expr(x), _as_expr(y)
        return len(x) == len(y) and all(walk(p, q) for p, q in zip(x, y))

    return walk(a, b)


def seq_vars(terms: Sequence[Expression]) -> set[Var]:
    out: set[Var] = set()
    for t in terms:
        out.update(iter_vars(t))
    return out
