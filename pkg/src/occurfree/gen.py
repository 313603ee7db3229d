"""Seeded random generators for terms, equation sets and moded clauses.

The tidy and well-3-moded generators are constructive, so every sample
has the property by construction rather than by rejection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .modes import MINUS, PLUS, Moding
from .terms import Atom, Clause, Equation, Struct, Term, Var, VarSupply, term_size, var_list

Signature = tuple[tuple[str, int], ...]

DEFAULT_FUNCTIONS: Signature = (("a", 0), ("b", 0), ("f", 1), ("g", 2), ("h", 3))
DEFAULT_PREDICATES: Signature = (("p", 1), ("q", 2), ("r", 3))


@dataclass(frozen=True)
class TermConfig:
    functions: Signature = DEFAULT_FUNCTIONS
    max_size: int = 12
    max_depth: int = 4
    var_prob: float = 0.4


@dataclass(frozen=True)
class EquationConfig:
    terms: TermConfig = field(default_factory=TermConfig)
    max_vars: int = 6
    min_equations: int = 1
    max_equations: int = 3


def random_term(rng: random.Random, pool: Sequence[Var], cfg: TermConfig = TermConfig(), depth: int = 0) -> Term:
    """A term over ``pool`` and the configured functions, of size at most ``cfg.max_size``."""
    while True:
        t = _grow(rng, pool, cfg, depth)
        if term_size(t) <= cfg.max_size:
            return t


def _grow(rng, pool, cfg: TermConfig, depth: int) -> Term:
    if pool and (depth >= cfg.max_depth or rng.random() < cfg.var_prob):
        return rng.choice(pool)
    fs = cfg.functions if depth < cfg.max_depth else [f for f in cfg.functions if f[1] == 0]
    name, arity = rng.choice(fs)
    return Struct(name, tuple(_grow(rng, pool, cfg, depth + 1) for _ in range(arity)))


def random_equations(rng: random.Random, cfg: EquationConfig = EquationConfig()) -> list[Equation]:
    pool = [Var(i, f"X{i}") for i in range(rng.randint(1, cfg.max_vars))]
    n = rng.randint(cfg.min_equations, cfg.max_equations)
    return [Equation(random_term(rng, pool, cfg.terms), random_term(rng, pool, cfg.terms)) for _ in range(n)]


def random_moding(rng: random.Random, predicates: Signature = DEFAULT_PREDICATES, values: str = PLUS + MINUS) -> Moding:
    return Moding({(p, n): tuple(rng.choice(values) for _ in range(n)) for p, n in predicates})


# ---------------------------------------------------------------------------
# moded queries and clauses


@dataclass(frozen=True)
class ModedConfig:
    predicates: Signature = DEFAULT_PREDICATES
    functions: Signature = DEFAULT_FUNCTIONS
    max_atoms: int = 3
    max_depth: int = 2
    shared_vars: int = 2  # variables never in an output, free to repeat


class _Builder:
    def __init__(self, rng: random.Random, m: Moding, cfg: ModedConfig, supply: VarSupply):
        self.rng, self.m, self.cfg, self.supply = rng, m, cfg, supply
        self.tcfg = TermConfig(cfg.functions, max_size=8, max_depth=cfg.max_depth, var_prob=0.5)

    def over(self, pool: Sequence[Var]) -> Term:
        return random_term(self.rng, list(pool), self.tcfg) if pool else self.ground()

    def ground(self) -> Term:
        return random_term(self.rng, [], self.tcfg)

    def linear(self) -> Term:
        """A term whose variables are all fresh and distinct."""
        t = _grow(self.rng, [Var(-1)], self.tcfg, 0)
        return _freshen(t, self.supply)

    def atom(self, pred, make) -> Atom:
        name, n = pred
        return Struct(name, tuple(make(md) for md in self.m.mode((name, n))))


def _freshen(t: Term, supply: VarSupply) -> Term:
    if isinstance(t, Var):
        return supply.fresh()
    return Struct(t.functor, tuple(_freshen(a, supply) for a in t.args))


def tidy_query(rng: random.Random, m: Moding, cfg: ModedConfig = ModedConfig(), supply: VarSupply | None = None,
               inputs_from: Sequence[Var] = (), n_atoms: int | None = None) -> tuple[Atom, ...]:
    """Output linear query with acyclic dependency relation.

    Outputs hold fresh distinct variables; inputs draw on outputs of atoms
    built earlier, on ``inputs_from`` and on a few shared variables.  The
    atoms are shuffled afterwards.
    """
    supply = supply or VarSupply()
    b = _Builder(rng, m, cfg, supply)
    shared = [supply.fresh() for _ in range(cfg.shared_vars)] + list(inputs_from)
    produced: list[Var] = []
    atoms = []
    for _ in range(n_atoms if n_atoms is not None else rng.randint(1, cfg.max_atoms)):
        pool = shared + produced
        outs: list[Var] = []

        def make(md):
            if md == MINUS:
                t = b.linear()
                outs.extend(_vars(t))
                return t
            return b.over(pool)

        atoms.append(b.atom(rng.choice(cfg.predicates), make))
        produced.extend(outs)
    rng.shuffle(atoms)
    return tuple(atoms)


def tidy_clause(rng: random.Random, m: Moding, cfg: ModedConfig = ModedConfig(), supply: VarSupply | None = None,
                head_pred=None) -> Clause:
    """Clause with input-linear head, tidy body and no head input variable in a body output."""
    supply = supply or VarSupply()
    b = _Builder(rng, m, cfg, supply)
    head_in: list[Var] = []

    def head_input(md):
        if md == PLUS:
            t = b.linear()
            head_in.extend(_vars(t))
            return t
        return None

    pred = head_pred or rng.choice(cfg.predicates)
    ins = [head_input(md) for md in m.mode(pred)]
    body = tidy_query(rng, m, cfg, supply, inputs_from=head_in, n_atoms=rng.randint(0, cfg.max_atoms))
    everything = head_in + sorted({v for a in body for v in _vars(a)}, key=lambda v: v.id) + [supply.fresh()]
    head = Struct(pred[0], tuple(t if t is not None else b.over(everything) for t in ins))
    return Clause(head, body)


def well_moded_query(rng: random.Random, m: Moding, cfg: ModedConfig = ModedConfig(), supply: VarSupply | None = None,
                     defined: Sequence[Var] = (), n_atoms: int | None = None) -> tuple[Atom, ...]:
    """Query whose input positions only use variables defined by earlier outputs (or ``defined``)."""
    supply = supply or VarSupply()
    b = _Builder(rng, m, cfg, supply)
    known = list(defined)
    atoms = []
    for _ in range(n_atoms if n_atoms is not None else rng.randint(1, cfg.max_atoms)):
        extra = [supply.fresh() for _ in range(2)]

        def make(md):
            if md == PLUS:
                return b.over(known)
            return b.over(known + extra)

        a = b.atom(rng.choice(cfg.predicates), make)
        atoms.append(a)
        for t, md in zip(a.args, m.mode(a.indicator)):
            if md == MINUS:
                known.extend(v for v in _vars(t) if v not in known)
    return tuple(atoms)


def well_moded_clause(rng: random.Random, m: Moding, cfg: ModedConfig = ModedConfig(), supply: VarSupply | None = None,
                      head_pred=None) -> Clause:
    supply = supply or VarSupply()
    b = _Builder(rng, m, cfg, supply)
    pred = head_pred or rng.choice(cfg.predicates)
    mode = m.mode(pred)
    pool = [supply.fresh() for _ in range(3)]
    ins = [b.over(pool) if md == PLUS else None for md in mode]
    defined = sorted({v for t in ins if t is not None for v in _vars(t)}, key=lambda v: v.id)
    body = well_moded_query(rng, m, cfg, supply, defined, n_atoms=rng.randint(0, cfg.max_atoms))
    known = defined + sorted({v for a in body for v in _vars(a)} - set(defined), key=lambda v: v.id)
    body_out = set(defined)
    for a in body:
        for t, md in zip(a.args, m.mode(a.indicator)):
            if md == MINUS:
                body_out.update(_vars(t))
    args = []
    for t, md in zip(ins, mode):
        if md == PLUS:
            args.append(t)
        elif md == MINUS:
            args.append(b.over(sorted(body_out, key=lambda v: v.id)))
        else:
            args.append(b.over(known + [supply.fresh()]))
    return Clause(Struct(pred[0], tuple(args)), body)


def _vars(t) -> list[Var]:
    return var_list(t)
