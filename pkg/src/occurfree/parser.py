"""Reader and printer for the definite-clause subset used by the analyses.

Syntax: lowercase names are functors/constants, uppercase or ``_``-initial
names are variables, ``[H|T]`` lists, ``:-`` neck, ``.`` terminator and
``%`` comments.  Infix ``^`` (also ``↑``), ``*`` and ``+`` are
left-associative, tightest first; ``=`` and ``\\==`` may appear between two
terms at goal level.  Mode declarations read ``:- mode p(+,-,?).`` and the
secondary moding ``:- mode2 p(+,-).``
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

from .modes import BUILTINS, Moding
from .terms import Clause, Equation, Struct, Substitution, Term, Var, VarSupply, iter_vars

NIL = Struct("[]")
CONS = "."

# binding strength: smaller binds tighter
INFIX = {"^": 200, "*": 400, "+": 500}
GOAL_OPS = {"=": 700, "\\==": 700}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})" if line else message)
        self.line = line
        self.column = column


class ModeArityError(ParseError):
    pass


@dataclass
class Program:
    clauses: tuple[Clause, ...]
    moding: Moding = field(default_factory=Moding)
    moding2: Moding | None = None
    builtins: frozenset = BUILTINS
    source: str = ""

    def clauses_for(self, indicator) -> list[tuple[int, Clause]]:
        return [(i, c) for i, c in enumerate(self.clauses) if c.indicator == indicator]

    def predicates(self) -> set[tuple[str, int]]:
        return {c.indicator for c in self.clauses}


# ---------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*|[0-9]+)
  | (?P<punct>:-|\\==|\[\]|[()\[\]|,.=^*+\-?↑])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if tok == "↑":
                tok = "^"
            out.append(Token(kind, tok, line, pos - line_start + 1))
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Reader:
    def __init__(self, text: str, supply: VarSupply | None, scope: dict[str, Var] | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.scope: dict[str, Var] = scope if scope is not None else {}
        if supply is None:
            supply = VarSupply(1 + max((v.id for v in self.scope.values()), default=-1))
        self.supply = supply

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "punct" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not (self.tok.kind == "punct" and self.tok.text == text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def at_eof(self) -> bool:
        return self.tok.kind == "eof"

    # terms

    def variable(self, name: str) -> Var:
        if name == "_":
            v = self.supply.fresh()
            # recorded under an unreadable key so later parses sharing the scope stay disjoint
            self.scope[f"_#{v.id}"] = v
            return v
        v = self.scope.get(name)
        if v is None:
            v = self.scope[name] = self.supply.fresh(name)
        return v

    def term(self, limit: int = 999) -> Term:
        left = self.primary()
        while self.tok.kind == "punct" and self.tok.text in INFIX:
            prec = INFIX[self.tok.text]
            if prec > limit:
                break
            op = self.next().text
            right = self.term(prec - 1)
            left = Struct(op, (left, right))
        return left

    def primary(self) -> Term:
        t = self.tok
        if t.kind == "var":
            self.next()
            return self.variable(t.text)
        if t.kind == "name":
            self.next()
            if self.accept("("):
                args = [self.term()]
                while self.accept(","):
                    args.append(self.term())
                self.expect(")")
                return Struct(t.text, tuple(args))
            return Struct(t.text)
        if self.accept("[]"):
            return NIL
        if self.accept("["):
            return self.list_tail()
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        raise self.error(f"unexpected {t.text or 'end of input'!r}")

    def list_tail(self) -> Term:
        if self.accept("]"):
            return NIL
        items = [self.term()]
        while self.accept(","):
            items.append(self.term())
        tail = self.term() if self.accept("|") else NIL
        self.expect("]")
        for item in reversed(items):
            tail = Struct(CONS, (item, tail))
        return tail

    def goal(self) -> Struct:
        start = self.tok
        left = self.term()
        if self.tok.kind == "punct" and self.tok.text in GOAL_OPS:
            op = self.next().text
            right = self.term()
            return Struct(op, (left, right))
        if not isinstance(left, Struct):
            raise self.error("a variable cannot be used as a goal", start)
        return left

    def goals(self) -> list[Struct]:
        out = [self.goal()]
        while self.accept(","):
            out.append(self.goal())
        return out

    # directives

    def mode_decl(self) -> tuple[Token, str, tuple[str, ...]]:
        t = self.next()
        if t.kind != "name":
            raise self.error("expected a predicate name in mode declaration", t)
        modes: list[str] = []
        if self.accept("("):
            while True:
                m = self.next()
                if m.kind != "punct" or m.text not in ("+", "-", "?"):
                    raise self.error(f"invalid mode symbol {m.text!r}", m)
                modes.append(m.text)
                if not self.accept(","):
                    break
            self.expect(")")
        return t, t.text, tuple(modes)


def parse_program(text: str, supply: VarSupply | None = None) -> Program:
    r = _Reader(text, supply)
    clauses: list[Clause] = []
    modes: dict = {}
    modes2: dict = {}
    decl_tokens: dict = {}
    while not r.at_eof():
        r.scope = {}
        if r.accept(":-"):
            kw = r.next()
            if kw.kind != "name" or kw.text not in ("mode", "mode2"):
                raise r.error("only ':- mode' and ':- mode2' directives are supported", kw)
            table = modes if kw.text == "mode" else modes2
            while True:
                tok, name, mode = r.mode_decl()
                ind = (name, len(mode))
                table[ind] = mode
                decl_tokens[(kw.text, ind)] = tok
                if not r.accept(","):
                    break
            r.expect(".")
            continue
        head = r.goal()
        body: list[Struct] = []
        if r.accept(":-"):
            body = r.goals()
        r.expect(".")
        clauses.append(Clause(head, tuple(body)))

    used = {c.indicator for c in clauses} | {a.indicator for c in clauses for a in c.body}
    used_names: dict[str, set[int]] = {}
    for name, arity in used:
        used_names.setdefault(name, set()).add(arity)
    for (kind, (name, arity)), tok in decl_tokens.items():
        if name in used_names and arity not in used_names[name]:
            arities = "/".join(str(a) for a in sorted(used_names[name]))
            raise ModeArityError(
                f"mode declaration for {name} has arity {arity} but {name} is used with arity {arities}",
                tok.line,
                tok.col,
            )
    return Program(
        tuple(clauses),
        Moding(modes),
        Moding(modes2) if modes2 else None,
        BUILTINS,
        text,
    )


def parse_query(text: str, supply: VarSupply | None = None, scope: dict | None = None) -> tuple[Struct, ...]:
    r = _Reader(text, supply, scope)
    if r.at_eof():
        raise ParseError("empty query")
    atoms = r.goals()
    r.accept(".")
    if not r.at_eof():
        raise r.error(f"unexpected {r.tok.text!r} after query")
    return tuple(atoms)


def parse_term(text: str, supply: VarSupply | None = None, scope: dict | None = None) -> Term:
    r = _Reader(text, supply, scope)
    if r.at_eof():
        raise ParseError("empty term")
    t = r.term()
    if not r.at_eof():
        raise r.error(f"unexpected {r.tok.text!r} after term")
    return t


def parse_equations(text: str, supply: VarSupply | None = None, scope: dict | None = None) -> list[Equation]:
    """Parse ``s1 = t1, s2 = t2, ...`` (optionally ending with ``.``)."""
    goals = parse_query(text, supply, scope)
    out = []
    for g in goals:
        if g.functor != "=" or len(g.args) != 2:
            raise ParseError(f"expected an equation 's = t', got {render(g)}")
        out.append(Equation(*g.args))
    return out


def parse_moding(text: str) -> Moding:
    """Parse ``p(+,-), q(?)`` into a :class:`Moding`."""
    r = _Reader(text, None)
    modes = {}
    while True:
        _, name, mode = r.mode_decl()
        modes[(name, len(mode))] = mode
        if not r.accept(","):
            break
    if not r.at_eof():
        raise r.error(f"unexpected {r.tok.text!r} in moding")
    return Moding(modes)


# ---------------------------------------------------------------------------
# printing

_PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*|[0-9]+|\[\]")


class _Namer:
    def __init__(self, exprs):
        self.names: dict[Var, str] = {}
        taken: set[str] = set()
        for v in dict.fromkeys(iter_vars(tuple(exprs))):
            base = v.name or f"_G{v.id}"
            name = base if base not in taken else f"{base}_{v.id}"
            taken.add(name)
            self.names[v] = name

    def __call__(self, v: Var) -> str:
        return self.names.get(v) or v.name or f"_G{v.id}"


def _functor_text(f: str) -> str:
    if _PLAIN_NAME.fullmatch(f):
        return f
    return "'" + f.replace("'", "\\'") + "'"


def _prec(t: Term) -> int:
    if isinstance(t, Struct) and len(t.args) == 2:
        if t.functor in INFIX:
            return INFIX[t.functor]
        if t.functor in GOAL_OPS:
            return GOAL_OPS[t.functor]
    return 0


def _term(t: Term, name) -> str:
    if isinstance(t, Var):
        return name(t)
    if t.functor == CONS and len(t.args) == 2:
        items = []
        while isinstance(t, Struct) and t.functor == CONS and len(t.args) == 2:
            items.append(_term(t.args[0], name))
            t = t.args[1]
        inner = ",".join(items)
        if t == NIL:
            return f"[{inner}]"
        return f"[{inner}|{_term(t, name)}]"
    p = _prec(t)
    if p:
        l, r = t.args
        ls = _term(l, name)
        rs = _term(r, name)
        if _prec(l) > p or (t.functor in GOAL_OPS and _prec(l) >= p):
            ls = f"({ls})"
        if _prec(r) >= p:
            rs = f"({rs})"
        op = f" {t.functor} " if t.functor in GOAL_OPS else t.functor
        return f"{ls}{op}{rs}"
    if not t.args:
        return _functor_text(t.functor)
    return f"{_functor_text(t.functor)}({','.join(_term(a, name) for a in t.args)})"


def render(x, namer=None) -> str:
    """Text form of a term, atom, query, clause, substitution or equation set."""
    from .unify import EquationSet, RunTrace

    if isinstance(x, RunTrace):
        return x.render()
    if isinstance(x, EquationSet):
        x = x.equations
        if not x:
            return "true"
    if namer is None:
        namer = _Namer(_exprs(x))
    if isinstance(x, (Var, Struct)):
        return _term(x, namer)
    if isinstance(x, Substitution):
        return "{" + ", ".join(f"{namer(v)}/{_term(t, namer)}" for v, t in x.items()) + "}"
    if isinstance(x, Equation):
        return f"{_term(x.lhs, namer)} = {_term(x.rhs, namer)}"
    if isinstance(x, Clause):
        head = _term(x.head, namer)
        if not x.body:
            return head + "."
        return head + " :- " + ", ".join(_term(a, namer) for a in x.body) + "."
    if isinstance(x, (tuple, list)):
        if x and all(isinstance(e, Equation) for e in x):
            return ", ".join(render(e, namer) for e in x)
        return ", ".join(_term(a, namer) for a in x)
    raise TypeError(f"cannot render {type(x).__name__}")


def _exprs(x) -> Iterator:
    if isinstance(x, (Var, Struct)):
        yield x
    elif isinstance(x, Substitution):
        for v, t in x.items():
            yield v
            yield t
    elif isinstance(x, (Equation, Clause)):
        yield from x.terms()
    elif isinstance(x, (tuple, list)):
        for e in x:
            yield from _exprs(e)


def render_program(p: Program) -> str:
    lines = []
    if len(p.moding):
        lines.append(f":- mode {p.moding.render()}.")
    if p.moding2 is not None and len(p.moding2):
        lines.append(f":- mode2 {p.moding2.render()}.")
    lines.extend(render(c) for c in p.clauses)
    return "\n".join(lines) + "\n"
