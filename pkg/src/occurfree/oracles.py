"""Reference implementations used to cross-check the main algorithms.

These share only the term representation with the rest of the package:
a textbook Robinson unifier with occur check, and a rational-tree unifier
(union-find, no occur check) deciding solvability over infinite terms.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .terms import Equation, Struct, Substitution, Term, Var, apply


def robinson(pairs: Iterable[tuple[Term, Term]]) -> Substitution | None:
    """Most general idempotent unifier of ``pairs`` or ``None``."""
    binding: dict[Var, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var) and t in binding:
            t = binding[t]
        return t

    def occurs(v: Var, t: Term) -> bool:
        stack = [t]
        while stack:
            u = walk(stack.pop())
            if u == v:
                return True
            if isinstance(u, Struct):
                stack.extend(u.args)
        return False

    stack = list(pairs)
    while stack:
        s, t = stack.pop()
        s, t = walk(s), walk(t)
        if s == t:
            continue
        if isinstance(s, Var):
            if occurs(s, t):
                return None
            binding[s] = t
        elif isinstance(t, Var):
            if occurs(t, s):
                return None
            binding[t] = s
        elif s.functor != t.functor or len(s.args) != len(t.args):
            return None
        else:
            stack.extend(zip(s.args, t.args))

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, Var) or not t.args:
            return t
        return Struct(t.functor, tuple(resolve(a) for a in t.args))

    return Substitution({v: resolve(v) for v in binding})


def robinson_eqs(eqs: Sequence[Equation]) -> Substitution | None:
    return robinson((e.lhs, e.rhs) for e in eqs)


def is_unifier(theta: Substitution, eqs: Sequence[Equation]) -> bool:
    return all(apply(theta, e.lhs) == apply(theta, e.rhs) for e in eqs)


def more_general(theta: Substitution, sigma: Substitution, over: Iterable[Var]) -> bool:
    """``sigma`` is an instance of ``theta`` on ``over``: some ``eta`` has ``theta eta = sigma`` there."""
    over = list(over)
    eta = robinson_match([(apply(theta, v), apply(sigma, v)) for v in over])
    return eta is not None


def robinson_match(pairs: Sequence[tuple[Term, Term]]) -> dict | None:
    """One-sided matching: a substitution mapping each left term onto its right term."""
    out: dict[Var, Term] = {}
    stack = list(pairs)
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            if p in out and out[p] != t:
                return None
            out[p] = t
        elif isinstance(t, Var) or p.functor != t.functor or len(p.args) != len(t.args):
            return None
        else:
            stack.extend(zip(p.args, t.args))
    return out


def rational_unifiable(eqs: Sequence[Equation]) -> bool:
    """Solvability over possibly infinite (rational) trees: union-find without occur check."""
    parent: dict = {}

    def find(x):
        while parent.get(x, x) is not x:
            x = parent[x]
        return x

    stack = [(e.lhs, e.rhs) for e in eqs]
    while stack:
        s, t = stack.pop()
        s, t = find(s), find(t)
        if s is t or s == t:
            continue
        if isinstance(s, Var):
            parent[s] = t
        elif isinstance(t, Var):
            parent[t] = s
        elif s.functor != t.functor or len(s.args) != len(t.args):
            return False
        else:
            parent[s] = t
            stack.extend(zip(s.args, t.args))
    return True
