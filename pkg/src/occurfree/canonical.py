"""Renaming-invariant keys for equation sets and queries.

Keys are exact encodings of the object with variables renumbered, so two
objects with equal keys are always variants of each other.  The converse
holds for queries; for equation sets it holds in the common case and
otherwise only costs duplicate work in searches.
"""

from __future__ import annotations

from typing import Sequence

from .terms import Equation, Struct, Var


def _encode(t, numbering: dict[Var, int] | None):
    if isinstance(t, Var):
        if numbering is None:
            return ("v",)
        n = numbering.get(t)
        if n is None:
            n = numbering[t] = len(numbering)
        return ("v", n)
    return ("s", t.functor, len(t.args), *(_encode(a, numbering) for a in t.args))


def _encode_eq(eq: Equation, numbering):
    return (_encode(eq.lhs, numbering), _encode(eq.rhs, numbering))


def equation_key(eqs: Sequence[Equation]) -> tuple:
    order = sorted(range(len(eqs)), key=lambda i: _encode_eq(eqs[i], None))
    for _ in range(2):
        numbering: dict[Var, int] = {}
        encoded = [_encode_eq(eqs[i], numbering) for i in order]
        order = [order[i] for i in sorted(range(len(order)), key=lambda i: encoded[i])]
    numbering = {}
    return tuple(_encode_eq(eqs[i], numbering) for i in order)


def query_key(atoms: Sequence[Struct]) -> tuple:
    numbering: dict[Var, int] = {}
    return tuple(_encode(a, numbering) for a in atoms)
