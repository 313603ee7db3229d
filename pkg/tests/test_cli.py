import json
import subprocess
import sys

import pytest

from occurfree.cli import execute, list_scenarios, load_scenario, main, run_scenario, scenario_dir

SCENARIOS = list_scenarios()


def run_main(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", SCENARIOS)
def test_scenario_matches_golden(name):
    rep, sc = run_scenario(name)
    assert rep.exit_status == sc["expect_exit"]
    golden = json.loads((scenario_dir() / "golden" / f"{name}.json").read_text())
    assert rep.to_json() == golden


def test_scenarios_cover_every_command():
    used = {load_scenario(n)["argv"][0] for n in SCENARIOS}
    assert used == {"unify", "nsto", "modes", "derive"}


def test_unify_examples(capsys):
    code, out, _ = run_main(capsys, "unify", "g(X,X)", "g(Y,f(Y))", "--algo", "mma-minus")
    assert code == 0 and out.strip() == "semi-solved: X = Y, Y = f(Y)"
    code, out, _ = run_main(capsys, "unify", "p(a,f(X),X)", "p(b,Y,Y)", "--algo", "mma-minus")
    assert out.strip() == "failure (clash a/b)"
    code, out, _ = run_main(capsys, "unify", "f(X)", "f(X)")
    assert out.strip() == "mgu: {}"
    code, out, _ = run_main(capsys, "unify", "f(X,a)", "f(b,Y)", "--trace")
    assert out.splitlines()[1:] == ["0 start - | f(X,a) = f(b,Y)", "1 decompose 0 | X = b, a = Y", "2 orient 1 | X = b, Y = a"]


def test_nsto_examples(capsys):
    code, out, _ = run_main(capsys, "nsto", "p(a,f(X),X) = p(b,Y,Y)", "--json")
    data = json.loads(out)
    assert code == 1
    verdicts = {c["id"]: c for c in data["checks"]}
    assert verdicts["nsto"]["verdict"] == "false" and verdicts["wnsto"]["verdict"] == "true"
    assert verdicts["wnsto"]["witness"]
    code, out, _ = run_main(capsys, "nsto", "X = f(X)", "--property", "wnsto", "--json")
    assert code == 1 and json.loads(out)["checks"][0]["verdict"] == "false"
    code, out, _ = run_main(capsys, "nsto", "f(X,Y) = f(a,b)", "--json")
    checks = json.loads(out)["checks"]
    assert code == 0 and checks[0]["verdict"] == "true" and checks[0]["certificate"] == "linearity"


def test_budget_exit_code(capsys):
    code, _, _ = run_main(capsys, "nsto", "f(X1,X2,X3,X4) = f(g(X2,X2),g(X3,X3),g(X4,X4),a)", "--budget", "2")
    assert code == 3


def test_modes_examples(capsys):
    code, out, _ = run_main(capsys, "modes", "flatten.pl", "--check", "tidy")
    assert code == 0
    code, out, _ = run_main(capsys, "modes", "nqueens.pl", "--check", "tidy", "--search")
    assert code == 1 and "no moding found (256 searched)" in out
    code, out, _ = run_main(capsys, "modes", "derivative.pl", "--check", "well3")
    assert code == 0


def test_derive_examples(capsys):
    code, out, _ = run_main(capsys, "derive", "nqueens.pl", "pqs(s(s(0)),[A,B],_,_)", "--rule", "all",
                            "--verify", "wnsto", "--max-depth", "60", "--json")
    data = json.loads(out)
    assert code == 0 and data["checks"][0]["verdict"] == "verified"
    code, out, _ = run_main(capsys, "derive", "nqueens.pl", "pq(a,L,[L|_],_)", "--verify", "nsto",
                            "--max-depth", "60")
    assert code == 1 and "clause (3)" in out
    code, out, _ = run_main(capsys, "derive", "flatten.pl", "flatten([[a],[b]],Ys)", "--engine", "unsound", "--json")
    data = json.loads(out)
    assert code == 0
    assert {c["id"]: c["verdict"] for c in data["checks"]}["agrees-with-sound"] == "pass"


def test_usage_errors(capsys):
    assert run_main(capsys, "unify", "f(X", "a")[0] == 2
    assert run_main(capsys, "modes", "no-such-file.pl")[0] == 2
    assert run_main(capsys, "derive", "flatten.pl", "")[0] == 2
    assert run_main(capsys, "bogus")[0] == 2
    assert run_main(capsys, "modes", "flatten.pl", "--search", "--cap", "2")[0] == 2


def test_scenario_command(capsys):
    code, out, _ = run_main(capsys, "scenario", "--list")
    assert code == 0 and len(out.splitlines()) == len(SCENARIOS)
    code, out, _ = run_main(capsys, "scenario", "motivating-pair-nsto")
    assert code == 0 and "as expected" in out
    assert run_main(capsys, "scenario", "nope")[0] == 2


def test_reports_are_deterministic():
    argv = ["derive", "use2.pl", "p([a,b],X,Y)", "--rule", "all", "--engine", "unsound"]
    a = json.dumps(execute(argv).to_json(), sort_keys=True)
    b = json.dumps(execute(argv).to_json(), sort_keys=True)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "occurfree", "unify", "f(X)", "f(a)"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "mgu: {X/a}"
    again = subprocess.run([sys.executable, "-m", "occurfree", "unify", "f(X)", "f(a)"], capture_output=True, text=True)
    assert again.stdout == proc.stdout
