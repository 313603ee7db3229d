"""Check the MMA- termination measure on random equation sets.

Every step of several random runs per set must strictly decrease the
lexicographic triple (norm, orient/var-var count, non-variable bindings).
Prints run-length statistics and the number of violations (expected: 0).
"""

import argparse
import random
import statistics
from dataclasses import dataclass

from occurfree.gen import EquationConfig, TermConfig, random_equations
from occurfree.unify import MMA_MINUS, EquationSet, MeasureViolation, SeededRandom, run


@dataclass(frozen=True)
class Config:
    sets: int = 1000
    runs_per_set: int = 5
    seed: int = 0
    max_size: int = 12
    max_vars: int = 6


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    ecfg = EquationConfig(TermConfig(max_size=cfg.max_size), max_vars=cfg.max_vars)
    lengths, violations = [], 0
    outcomes = {"success": 0, "failure(clash)": 0}
    for _ in range(cfg.sets):
        E = EquationSet.of(random_equations(rng, ecfg))
        for _ in range(cfg.runs_per_set):
            try:
                t = run(E, SeededRandom(rng.randrange(1 << 30)), MMA_MINUS, check_measure=True, max_steps=100_000)
            except MeasureViolation as e:
                violations += 1
                print("violation:", E, e)
                continue
            lengths.append(len(t.steps))
            outcomes[t.outcome] += 1
    print(f"sets={cfg.sets} runs={len(lengths)} violations={violations}")
    print(f"steps: mean={statistics.mean(lengths):.1f} median={statistics.median(lengths)} max={max(lengths)}")
    for k, v in outcomes.items():
        print(f"{k}: {v}")
    return 1 if violations else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, d in Config.__dataclass_fields__.items():
        ap.add_argument(f"--{f.replace('_', '-')}", type=int, default=d.default)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
