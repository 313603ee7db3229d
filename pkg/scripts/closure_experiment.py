"""Resolvents of tidy (well-3-moded) queries and clauses stay tidy (well-3-moded).

Samples constructive query/clause pairs, resolves at a random atom, and
counts property violations (expected: 0).  Selection is arbitrary, not
only leftmost.
"""

import argparse
import random
from dataclasses import dataclass

from occurfree.gen import ModedConfig, random_moding, tidy_clause, tidy_query, well_moded_clause, well_moded_query
from occurfree.modes import is_tidy_query, is_well_3_moded
from occurfree.sld import NotUnifiable, resolve
from occurfree.terms import VarSupply


@dataclass(frozen=True)
class Config:
    pairs: int = 5000
    seed: int = 2


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    mcfg = ModedConfig()
    stats = {"tidy": [0, 0, 0], "well3": [0, 0, 0]}  # sampled, resolved, violations
    for _ in range(cfg.pairs):
        for kind, values, mk_q, mk_c, check in (
            ("tidy", "+-", tidy_query, tidy_clause, is_tidy_query),
            ("well3", "+-?", well_moded_query, well_moded_clause, is_well_3_moded),
        ):
            m = random_moding(rng, values=values)
            supply = VarSupply()
            q = mk_q(rng, m, mcfg, supply)
            i = rng.randrange(len(q))
            c = mk_c(rng, m, mcfg, supply, head_pred=q[i].indicator)
            stats[kind][0] += 1
            try:
                r, _ = resolve(q, i, c)
            except NotUnifiable:
                continue
            stats[kind][1] += 1
            if not check(r, m):
                stats[kind][2] += 1
    for kind, (n, r, v) in stats.items():
        print(f"{kind:6s} pairs={n} resolvents={r} violations={v}")
    return 1 if any(v for _, _, v in stats.values()) else 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=Config.pairs)
    ap.add_argument("--seed", type=int, default=Config.seed)
    raise SystemExit(main(Config(**vars(ap.parse_args()))))
