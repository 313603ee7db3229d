"""Run every bundled scenario and print a one-line summary for each."""

import sys
import time

from occurfree.cli import list_scenarios, run_scenario


def main() -> int:
    bad = 0
    for name in list_scenarios():
        t0 = time.perf_counter()
        rep, sc = run_scenario(name)
        ok = rep.exit_status == sc["expect_exit"]
        bad += not ok
        verdicts = ", ".join(f"{c['id']}={c['verdict']}" for c in rep.checks)
        print(f"{'ok ' if ok else 'BAD'} {name:36s} exit={rep.exit_status} {time.perf_counter() - t0:5.2f}s  {verdicts}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
