"""Command-line front end: ``occurfree {unify,nsto,modes,derive,scenario}``.

Exit status: 0 when every requested check passes, 1 when one is refuted,
2 on usage or parse errors, 3 when a search budget runs out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import __version__
from .modes import (
    Moding,
    SearchCapExceeded,
    UndeclaredPredicate,
    grounding_transform,
    is_nicely_moded_query,
    is_tidy_query,
    is_well_3_moded,
    nicely_moded_clause_problems,
    search_modings,
    tidy_clause_problems,
    weakly_linear,
    well_3_moded_problems,
)
from .nsto import DEFAULT_BUDGET, classify_equations
from .parser import ParseError, Program, parse_equations, parse_moding, parse_program, parse_query, parse_term, render
from .sld import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_NODES,
    SOUND,
    UNSOUND,
    AllRules,
    Leftmost,
    ModeCompatible,
    SldTree,
    build_tree,
    syntactic_certificates,
    verify_occur_check_free,
)
from .unify import MMA, MMA_MINUS, EquationSet, FirstApplicable, SeededRandom, extract_mgu, is_solved, run

SCHEMA = 1
PASS, REFUTED, USAGE, BUDGET = 0, 1, 2, 3
ANSWER_LINES = 20


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    digest: str
    scenario: str | None = None
    checks: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)

    def check(self, check_id: str, verdict: str, certificate: str | None = None, witness=None) -> None:
        self.checks.append({"id": check_id, "verdict": verdict, "certificate": certificate, "witness": witness})

    @property
    def exit_status(self) -> int:
        verdicts = [c["verdict"] for c in self.checks]
        if any(v in ("false", "refuted", "fail") for v in verdicts):
            return REFUTED
        if "budget_exceeded" in verdicts:
            return BUDGET
        return PASS

    def to_json(self) -> dict:
        return {
            "tool": "occurfree",
            "version": __version__,
            "schema": SCHEMA,
            "command": self.command,
            "input_digest": self.digest,
            "scenario": self.scenario,
            "checks": self.checks,
            "details": self.details,
            "exit_status": self.exit_status,
        }


def _digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return "sha256:" + h.hexdigest()


# ---------------------------------------------------------------------------
# corpus lookup


def corpus_dir():
    return resources.files("occurfree") / "corpus"


def scenario_dir():
    return resources.files("occurfree") / "scenarios"


def load_program_text(name: str) -> str:
    """Read a program file, falling back to the bundled corpus for bare names."""
    path = Path(name)
    if path.is_file():
        return path.read_text()
    bundled = corpus_dir() / path.name
    if bundled.is_file():
        return bundled.read_text()
    raise UsageError(f"no such program: {name}")


# ---------------------------------------------------------------------------
# unify


def cmd_unify(args) -> Report:
    scope: dict = {}
    s = parse_term(args.lhs, scope=scope)
    t = parse_term(args.rhs, scope=scope)
    rep = Report("unify", _digest("unify", args.lhs, args.rhs, args.algo, str(args.seed)))
    strategy = FirstApplicable() if args.seed is None else SeededRandom(args.seed)
    trace = run(EquationSet.unify(s, t), strategy, args.algo)
    if trace.failure is not None:
        text = f"failure ({trace.failure.describe()})"
    elif is_solved(trace.final):
        text = f"mgu: {render(extract_mgu(trace.final))}"
    else:
        text = f"semi-solved: {render(trace.final)}"
    rep.lines.append(text)
    if args.trace:
        rep.lines.append(trace.render())
    rep.details = {"algorithm": args.algo, "result": text, "trace": trace.to_json()}
    return rep


# ---------------------------------------------------------------------------
# nsto


def cmd_nsto(args) -> Report:
    eqs = parse_equations(args.equations)
    rep = Report("nsto", _digest("nsto", args.equations, args.property, str(args.budget)))
    cl = classify_equations(eqs, args.budget)
    wanted = {"nsto": [cl.nsto], "wnsto": [cl.wnsto], "both": [cl.nsto, cl.wnsto]}[args.property]
    for v in wanted:
        witness = None
        if v.witness is not None:
            witness = [f"{c.action.label}:{','.join(map(str, c.indices))}" for c in v.witness.choices()]
        rep.check(v.property.lower(), v.value_text(), v.certificate, witness)
        line = f"{v.property}={v.value_text()}"
        if v.certificate:
            line += f" certificate={v.certificate}"
        if v.witness is not None:
            line += f" witness: {' '.join(witness)} -> {v.witness.outcome}"
        rep.lines.append(line)
    rep.details = {"equations": render(eqs)}
    return rep


# ---------------------------------------------------------------------------
# modes

CHECKS = ("tidy", "nicely", "well", "well3", "weakly-tidy", "weakly-linear-heads")
SEARCHABLE = {"tidy": "tidy", "nicely": "nicely_moded", "well": "well_moded"}


def _clause_problems(check: str, c, m: Moding, m2: Moding | None) -> list[str]:
    if check == "tidy":
        return tidy_clause_problems(c, m)
    if check == "nicely":
        return nicely_moded_clause_problems(c, m)
    if check in ("well", "well3"):
        return well_3_moded_problems(c, m)
    if check == "weakly-linear-heads":
        return [] if weakly_linear(c.head, m) else ["head is not weakly linear"]
    return tidy_clause_problems(grounding_transform(c, m), m2)


def _query_ok(check: str, q, m: Moding) -> bool:
    if check == "tidy":
        return is_tidy_query(q, m)
    if check == "nicely":
        return is_nicely_moded_query(q, m)
    if check in ("well", "well3"):
        return is_well_3_moded(q, m)
    if check == "weakly-linear-heads":
        return all(weakly_linear(a, m) for a in q)
    raise UsageError(f"--query is not supported with --check {check}")


def _program(args_program: str, mode_override: str | None, mode2_override: str | None = None) -> tuple[Program, str]:
    text = load_program_text(args_program)
    p = parse_program(text)
    if mode_override:
        p.moding = p.moding.updated(parse_moding(mode_override))
    if mode2_override:
        base = p.moding2 if p.moding2 is not None else Moding()
        p.moding2 = base.updated(parse_moding(mode2_override))
    return p, text


def cmd_modes(args) -> Report:
    p, text = _program(args.program, args.mode, args.mode2)
    rep = Report("modes", _digest("modes", text, args.check, str(args.search), args.mode or "", args.mode2 or "",
                                  args.query or ""))
    if args.search:
        if args.check not in SEARCHABLE:
            raise UsageError(f"--search supports {', '.join(SEARCHABLE)}")
        found, searched = search_modings(p, SEARCHABLE[args.check], limit=args.limit, cap=args.cap)
        rendered = [m.render() for m in found]
        rep.details = {"searched": searched, "found": rendered}
        if not found:
            rep.lines.append(f"no moding found ({searched} searched)")
            rep.check(f"search-{args.check}", "false", "exhaustive")
        else:
            rep.lines.append(f"{len(found)} moding(s) found ({searched} searched)")
            rep.lines.extend(f"  {r}" for r in rendered)
            rep.check(f"search-{args.check}", "true", "exhaustive")
        return rep

    m = p.moding
    m2 = p.moding2
    if args.check == "weakly-tidy" and m2 is None:
        raise UsageError("weakly-tidy needs a second moding (:- mode2 ...)")
    if args.check == "well" and not m.is_two_valued():
        raise UsageError("well-moded needs a two-valued moding; use well3")
    rows = []
    for idx, c in enumerate(p.clauses, 1):
        problems = _clause_problems(args.check, c, m, m2)
        rows.append(
            {
                "clause": idx,
                "predicate": "/".join(map(str, c.head.indicator)),
                "verdict": "pass" if not problems else "fail",
                "reasons": problems,
            }
        )
    ok = all(r["verdict"] == "pass" for r in rows)
    moding_text = m.render() + (f" ; {m2.render()}" if args.check == "weakly-tidy" else "")
    rep.lines.append(f"{args.check}: {'pass' if ok else 'fail'} under {moding_text}")
    for r in rows:
        if r["reasons"]:
            rep.lines.append(f"  clause ({r['clause']}) {r['predicate']}: {'; '.join(r['reasons'])}")
    rep.check(args.check, "pass" if ok else "fail")
    if args.query:
        q = parse_query(args.query)
        qok = _query_ok(args.check, q, m)
        rep.lines.append(f"query {render(q)}: {'pass' if qok else 'fail'}")
        rep.check(f"{args.check}-query", "pass" if qok else "fail")
    rep.details = {"moding": m.render(), "moding2": m2.render() if m2 else None, "rows": rows}
    return rep


# ---------------------------------------------------------------------------
# derive


def _rule(name: str, m: Moding):
    return {"leftmost": Leftmost(), "mode-compatible": ModeCompatible(m), "all": AllRules()}[name]


def _tree_summary(tree: SldTree) -> dict:
    counts: dict[str, int] = {}
    for n in tree.nodes:
        counts[n.status] = counts.get(n.status, 0) + 1
    return {
        "engine": tree.engine,
        "nodes": len(tree.nodes),
        "statuses": dict(sorted(counts.items())),
        "truncated": tree.truncated,
        "answers": [render(a) for a in tree.answers()],
    }


def render_tree(tree: SldTree, limit: int = 200) -> list[str]:
    out = []

    def walk(i: int, indent: int) -> None:
        if len(out) >= limit:
            return
        n = tree.nodes[i]
        via = "" if n.parent is None else f"[{'builtin' if n.clause is None else f'clause ({n.clause + 1})'}] "
        body = render(n.query) if n.query else "[]"
        out.append(f"{'  ' * indent}{via}{body}  <{n.status}>")
        for c in n.children:
            walk(c, indent + 1)

    walk(0, 0)
    return out


def cmd_derive(args) -> Report:
    p, text = _program(args.program, args.mode)
    q = parse_query(args.query)
    rep = Report(
        "derive",
        _digest("derive", text, args.query, args.rule, args.verify, args.engine,
                str(args.max_depth), str(args.max_nodes), str(args.budget), args.mode or ""),
    )
    rule = _rule(args.rule, p.moding)
    bounds = dict(max_depth=args.max_depth, max_nodes=args.max_nodes)
    classify = args.verify != "none"
    tree = build_tree(p, q, rule, classify_unifications=classify, engine=args.engine, budget=args.budget, **bounds)
    summary = _tree_summary(tree)
    bound_text = f"depth {args.max_depth}, nodes {args.max_nodes}"
    rep.lines.append(f"{args.engine} tree: {summary['nodes']} nodes, "
                     + ", ".join(f"{k} {v}" for k, v in summary["statuses"].items()))
    if tree.truncated:
        rep.lines.append(f"tree cut at bounds ({bound_text})")
    for a in summary["answers"][:ANSWER_LINES]:
        rep.lines.append(f"answer: {a}")
    if len(summary["answers"]) > ANSWER_LINES:
        rep.lines.append(f"... {len(summary['answers']) - ANSWER_LINES} more answers (see --json)")
    if args.tree:
        rep.lines.extend(render_tree(tree))
    rep.details = {"rule": args.rule, "bounds": bounds, "tree": summary}

    if args.engine == UNSOUND:
        ref = build_tree(p, q, rule, classify_unifications=False, engine=SOUND, **bounds)
        same = ref.answer_keys() == tree.answer_keys()
        same_shape = ref.signature() == tree.signature()
        rep.lines.append(f"answers {'identical to' if same else 'differ from'} sound engine")
        rep.check("agrees-with-sound", "pass" if same else "fail")
        rep.details["sound"] = _tree_summary(ref)
        rep.details["same_tree"] = same_shape

    if classify:
        mode = "strict" if args.verify == "nsto" else "weak"
        v = verify_occur_check_free(tree, mode)
        scope = "complete tree" if not tree.truncated else f"up to bounds: {bound_text}"
        witness = None
        if v.status == "refuted":
            au = v.witness
            verdict = au.nsto if mode == "strict" else au.wnsto
            witness = {
                "clause": au.clause_index + 1,
                "node": au.node,
                "unification": f"{render((au.atom, au.head))}",
                "run": [f"{c.action.label}:{','.join(map(str, c.indices))}" for c in verdict.witness.choices()]
                if verdict.witness is not None
                else None,
            }
            rep.lines.append(f"{args.verify}: refuted at clause ({witness['clause']}): "
                             f"{render(au.atom)} with head {render(au.head)}")
            rep.check(args.verify, "refuted", verdict.certificate, witness)
        elif v.status == "budget_exceeded":
            rep.lines.append(f"{args.verify}: budget exceeded ({args.budget} states)")
            rep.check(args.verify, "budget_exceeded")
        else:
            rep.lines.append(f"{args.verify}: verified ({scope}; {v.checked} available unifications)")
            rep.check(args.verify, "verified", "bounded" if tree.truncated else "complete-tree")
        certs = [c for c in syntactic_certificates(p, q)
                 if (c.property == "strict" or mode == "weak")
                 and (c.rules == "any" or args.rule == "mode-compatible")]
        for c in certs:
            rep.lines.append(f"unconditional: {c.name} ({c.property}, {c.rules} selection)")
        rep.details["unconditional"] = [c.name for c in certs]
        rep.details["available_unifications"] = len(tree.unifications)
    return rep


# ---------------------------------------------------------------------------
# scenarios


def list_scenarios() -> list[str]:
    return sorted(f.name[:-5] for f in scenario_dir().iterdir() if f.name.endswith(".json"))


def load_scenario(name: str) -> dict:
    f = scenario_dir() / f"{name}.json"
    if not f.is_file():
        raise UsageError(f"unknown scenario {name!r}; try --list")
    return json.loads(f.read_text())


def run_scenario(name: str) -> tuple[Report, dict]:
    sc = load_scenario(name)
    rep = execute(sc["argv"])
    rep.scenario = name
    return rep, sc


def cmd_scenario(args):
    if args.list or not args.name:
        return [f"{n}: {load_scenario(n)['description']}" for n in list_scenarios()]
    rep, sc = run_scenario(args.name)
    ok = rep.exit_status == sc["expect_exit"]
    rep.lines.append(f"scenario {args.name}: {'as expected' if ok else 'UNEXPECTED'} "
                     f"(exit {rep.exit_status}, expected {sc['expect_exit']})")
    return rep


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="occurfree", description="Occur-check freeness analysis for definite programs.")
    ap.add_argument("--version", action="version", version=f"occurfree {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="print the machine-readable report")

    u = sub.add_parser("unify", help="run MMA or MMA- on two terms")
    u.add_argument("lhs")
    u.add_argument("rhs")
    u.add_argument("--algo", choices=(MMA, MMA_MINUS), default=MMA)
    u.add_argument("--seed", type=int, default=None, help="random equation choice (default: first applicable)")
    u.add_argument("--trace", action="store_true")
    common(u)

    n = sub.add_parser("nsto", help="decide NSTO / WNSTO for equations 's = t, ...'")
    n.add_argument("equations")
    n.add_argument("--property", choices=("nsto", "wnsto", "both"), default="both")
    n.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    common(n)

    m = sub.add_parser("modes", help="check or search modings of a program")
    m.add_argument("program")
    m.add_argument("--check", choices=CHECKS, default="tidy")
    m.add_argument("--search", action="store_true", help="enumerate all two-valued modings")
    m.add_argument("--mode", help="override declared modes, e.g. 'd(-,+,-)'")
    m.add_argument("--mode2", help="override the second moding used by weakly-tidy")
    m.add_argument("--query", help="also check this query")
    m.add_argument("--limit", type=int, default=None)
    m.add_argument("--cap", type=int, default=16, help="maximum argument positions for --search")
    common(m)

    d = sub.add_parser("derive", help="build a bounded SLD tree and verify occur-check freeness")
    d.add_argument("program")
    d.add_argument("query")
    d.add_argument("--rule", choices=("leftmost", "mode-compatible", "all"), default="leftmost")
    d.add_argument("--verify", choices=("nsto", "wnsto", "none"), default="wnsto")
    d.add_argument("--engine", choices=(SOUND, UNSOUND), default=SOUND)
    d.add_argument("--mode", help="override declared modes")
    d.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    d.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    d.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    d.add_argument("--tree", action="store_true", help="print the tree")
    common(d)

    s = sub.add_parser("scenario", help="run a bundled scenario")
    s.add_argument("name", nargs="?")
    s.add_argument("--list", action="store_true")
    common(s)
    return ap


COMMANDS = {"unify": cmd_unify, "nsto": cmd_nsto, "modes": cmd_modes, "derive": cmd_derive, "scenario": cmd_scenario}


def execute(argv: Sequence[str]) -> Report:
    args = build_parser().parse_args(list(argv))
    return COMMANDS[args.cmd](args)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        rep = COMMANDS[args.cmd](args)
        if isinstance(rep, list):
            print("\n".join(rep))
            return PASS
    except (ParseError, UsageError, UndeclaredPredicate, SearchCapExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    if args.json:
        print(json.dumps(rep.to_json(), indent=2, sort_keys=True))
    else:
        print("\n".join(rep.lines))
    if args.cmd == "scenario":
        return PASS if rep.exit_status == load_scenario(args.name)["expect_exit"] else REFUTED
    return rep.exit_status
