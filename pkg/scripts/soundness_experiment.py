"""How often are random equation sets NSTO or WNSTO, and is MMA- sound on them?

For each sampled set: decide NSTO and WNSTO exactly, then enumerate every
MMA- run and compare its outcome with a Robinson unifier.  Sets that are
not WNSTO are tallied separately: there MMA- may wrongly succeed.
"""

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from occurfree.gen import random_equations
from occurfree.nsto import BudgetExceeded, decide_nsto, decide_wnsto, enumerate_terminals
from occurfree.oracles import is_unifier, robinson_eqs
from occurfree.unify import MMA_MINUS, EquationSet, finish_semi_solved


@dataclass(frozen=True)
class Config:
    sets: int = 2000
    seed: int = 1
    budget: int = 20_000


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    classes = Counter()
    wrong = Counter()
    for _ in range(cfg.sets):
        eqs = random_equations(rng)
        E = EquationSet.of(eqs)
        n, w = decide_nsto(E, cfg.budget), decide_wnsto(E, cfg.budget)
        if n.value is None or w.value is None:
            classes["budget"] += 1
            continue
        cls = "nsto" if n.value else ("wnsto-only" if w.value else "not-wnsto")
        classes[cls] += 1
        sigma = robinson_eqs(eqs)
        try:
            terms = enumerate_terminals(E, MMA_MINUS, cfg.budget)
        except BudgetExceeded:
            continue
        for t in terms:
            ok = (t.failure is not None) if sigma is None else (
                t.failure is None and (theta := finish_semi_solved(t.state)) is not None and is_unifier(theta, eqs)
            )
            if not ok:
                wrong[cls] += t.runs
    for cls in ("nsto", "wnsto-only", "not-wnsto", "budget"):
        print(f"{cls:11s} sets={classes[cls]:5d} incorrect MMA- runs={wrong[cls]}")
    return 1 if wrong["nsto"] or wrong["wnsto-only"] else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, d in Config.__dataclass_fields__.items():
        ap.add_argument(f"--{f}", type=int, default=d.default)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
