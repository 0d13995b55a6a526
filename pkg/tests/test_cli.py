from __future__ import annotations

import subprocess
import sys

import pytest

from agentcalc.cli import main
from agentcalc.scenario import load_scenario

from conftest import FIXTURES


def fx(name):
    return str(FIXTURES / f"{name}.scn")


def run(*argv):
    proc = subprocess.run([sys.executable, "-m", "agentcalc", *argv], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_eval_k1():
    code, out, err = run("eval", fx("k1_chain"))
    assert code == 0 and err == ""
    assert out.splitlines()[1].split(",")[:3] == ["k1_chain", "exact", "0.820000000000"]


def test_eval_prefixes(capsys):
    assert main(["eval", fx("k1_chain2"), "--prefixes"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert [r.split(",")[:3] for r in rows] == [
        ["k1_chain2", "exact", "0.672400000000"],
        ["k1_chain2[1]", "prefix", "0.820000000000"],
        ["k1_chain2[2]", "prefix", "0.672400000000"],
    ]


def test_missing_file_exit_2():
    code, out, err = run("eval", "missing.scn")
    assert code == 2 and out == "" and "missing.scn" in err


def test_budget_exit_3(capsys):
    assert main(["eval", fx("budget")]) == 3
    captured = capsys.readouterr()
    assert captured.out == "" and "16 leaf terms" in captured.err
    assert main(["eval", fx("k1_chain"), "--enum-budget", "1"]) == 3


def test_dof_violation_exit_4(capsys):
    assert main(["optimize", fx("react"), "--strategy", "FineTuning", "--budget", "10"]) == 4
    captured = capsys.readouterr()
    assert captured.out == "" and "DOF violation" in captured.err


def test_optimize_writes_best_scenario(tmp_path, capsys):
    out = tmp_path / "best.scn"
    assert main(["optimize", fx("react"), "--strategy", "ReAct", "--budget", "10", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    best = load_scenario(out)
    assert best.agents["main"].bindings == {"style": "verbose"}
    assert best.agents["main"].update.name == "sum"


def test_sample_row(capsys):
    assert main(["sample", fx("k1_chain"), "--n", "2000", "--seed", "3"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[1] == "sample" and row[3] != ""


def test_sample_seed_defaults_to_zero(capsys):
    main(["sample", fx("k1_chain"), "--n", "500"])
    a = capsys.readouterr().out
    main(["sample", fx("k1_chain"), "--n", "500", "--seed", "0"])
    assert capsys.readouterr().out == a


def test_compare(capsys):
    assert main(["compare", fx("k1_chain"), fx("k1_identity")]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["k1_chain", "k1_identity"]
    assert main(["compare", fx("k1_chain"), fx("k1_chain2")]) == 2


def test_report_merge(tmp_path, capsys):
    main(["eval", fx("k1_chain")])
    (tmp_path / "a.csv").write_text(capsys.readouterr().out)
    main(["eval", fx("parallel")])
    (tmp_path / "b.csv").write_text(capsys.readouterr().out)
    assert main(["report-merge", str(tmp_path / "a.csv"), str(tmp_path / "b.csv")]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_bad_usage_exit_2(capsys):
    assert main([]) == 2
    assert main(["sample", fx("k1_chain")]) == 2
    assert main(["sample", fx("k1_chain"), "--n", "0"]) == 2
    assert capsys.readouterr().out == ""


def test_timing_only_when_asked(capsys):
    main(["eval", fx("k1_chain"), "--timing"])
    assert capsys.readouterr().out.splitlines()[1].split(",")[-1] != ""


def test_eval_output_is_byte_stable():
    first = run("eval", fx("f2_hierarchical"), "--prefixes")
    second = run("eval", fx("f2_hierarchical"), "--prefixes")
    assert first == second and first[0] == 0


@pytest.mark.parametrize("name", ["k1_chain", "f2_nested"])
def test_console_script_entry(name):
    proc = subprocess.run(["agentcalc", "eval", fx(name)], capture_output=True, text=True)
    assert proc.returncode == 0
