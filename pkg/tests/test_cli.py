import json
from pathlib import Path

import pytest

from agentmc.cli import main

CORPUS = Path(__file__).resolve().parents[1] / "src" / "agentmc" / "corpus"
CRUISE = CORPUS / "cruise"


def run_cli(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_text()


def test_check_holds_json(tmp_path):
    code, text = run_cli(
        [
            "check",
            "--env", str(CRUISE / "env_single.env"),
            "--props", str(CRUISE / "props.psl"),
            "--property", "safe_accelerate",
            "--format", "json",
        ],
        tmp_path,
    )
    assert code == 0
    doc = json.loads(text)
    (res,) = doc["results"]
    assert res["property"] == "safe_accelerate"
    assert res["verdict"] == "holds"
    assert res["states"] > 0


def test_check_failure_reports_lasso_and_exit_1(tmp_path):
    code, text = run_cli(
        [
            "check",
            "--env", str(CRUISE / "mutants" / "env_single.env"),
            "--props", str(CRUISE / "props.psl"),
            "--property", "safe_accelerate",
            "--format", "json",
        ],
        tmp_path,
    )
    assert code == 1
    (res,) = json.loads(text)["results"]
    assert res["verdict"] == "fails"
    cx = res["counterexample"]
    assert cx["cycle"]  # a lasso, not just a finite prefix
    assert cx["replayed"] is True


def test_prove_command(tmp_path):
    psl = tmp_path / "p.psl"
    psl.write_text(
        "property valid = [] (P(x)) -> <> (P(x));\n"
        "property invalid = <> (P(x));\n"
    )
    code, text = run_cli(
        ["prove", "--props", str(psl), "--property", "valid", "--format", "json"],
        tmp_path,
    )
    assert code == 0
    (res,) = json.loads(text)["results"]
    assert res["result"] == "provable"

    code, text = run_cli(
        ["prove", "--props", str(psl), "--property", "invalid", "--format", "json"],
        tmp_path,
        name="out2.json",
    )
    assert code == 1
    (res,) = json.loads(text)["results"]
    assert res["result"] == "not_provable"
    assert res["countermodel"]


def test_compose_command(tmp_path):
    psl = tmp_path / "c.psl"
    psl.write_text(
        "hypothesis live = [] <> (P(p));\n"
        "property step = [] ((P(p)) -> <> (P(q)));\n"
        "property goal = [] <> (P(q));\n"
    )
    code, text = run_cli(
        [
            "compose",
            "--props", str(psl),
            "--goal", "goal",
            "--premise", "step:verified",
            "--premise", "live:assumed",
            "--format", "json",
        ],
        tmp_path,
    )
    assert code == 0
    doc = json.loads(text)
    assert doc["result"] == "provable"
    assert {p["name"]: p["status"] for p in doc["premises"]} == {
        "step": "verified",
        "live": "assumed",
    }


def test_lint_command(tmp_path):
    good = tmp_path / "good.agent"
    good.write_text(":name: g\n:Plans:\n+x : {True} <- perf(y);\n")
    bad = tmp_path / "bad.agent"
    bad.write_text(":name: b\n:Plans:\n+x : {True} <- perf(move(Z));\n")
    assert main(["lint", str(good)]) == 0
    assert main(["lint", str(bad)]) == 1


def test_run_rescue_seeded(tmp_path):
    code, text = run_cli(
        ["run", "--case", "rescue", "--seed", "3", "--format", "json"],
        tmp_path,
    )
    assert code == 0
    doc = json.loads(text)
    assert doc["case"] == "rescue"


def test_missing_file_exits_2(tmp_path):
    assert main(["lint", str(tmp_path / "nope.agent")]) == 2
    assert (
        main(
            [
                "check",
                "--env", str(tmp_path / "nope.env"),
                "--props", str(CRUISE / "props.psl"),
            ]
        )
        == 2
    )


def test_unknown_property_exits_2(tmp_path):
    code = main(
        [
            "check",
            "--env", str(CRUISE / "env_single.env"),
            "--props", str(CRUISE / "props.psl"),
            "--property", "no_such_property",
        ]
    )
    assert code == 2
