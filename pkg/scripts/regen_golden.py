"""Rewrite the golden JSON reports of the bundled scenarios.

Run after an intended change to report contents, then review the diff.
"""

import json
import sys
from pathlib import Path

from occurfree.cli import list_scenarios, run_scenario

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "occurfree" / "scenarios" / "golden"


def main() -> int:
    GOLDEN.mkdir(exist_ok=True)
    bad = 0
    for name in list_scenarios():
        rep, sc = run_scenario(name)
        if rep.exit_status != sc["expect_exit"]:
            print(f"{name}: exit {rep.exit_status}, expected {sc['expect_exit']}", file=sys.stderr)
            bad += 1
        (GOLDEN / f"{name}.json").write_text(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
        print(f"{name}: {rep.exit_status}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
