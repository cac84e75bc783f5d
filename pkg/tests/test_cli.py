"""End-to-end CLI behavior: exit codes, text output, machine output."""

import json

import pytest
from click.testing import CliRunner

from safsec.cli import main

from conftest import load_bundled


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    for name in ("airbag.ssm", "servertheft.ssm", "building.ssm", "building_revised.ssm"):
        (tmp_path / name).write_text(load_bundled(name), encoding="utf-8")
    return tmp_path


def run(runner, workdir, *args, env=None):
    env = {"SAFSEC_COLOR": "0", **(env or {})}
    return runner.invoke(main, [str(a) for a in args], env=env)


class TestValidate:
    def test_clean_file_exits_zero(self, runner, workdir):
        result = run(runner, workdir, "validate", workdir / "airbag.ssm")
        assert result.exit_code == 0, result.output
        assert "ok" in result.output

    def test_invariant_violation_exits_one(self, runner, workdir, tmp_path):
        bad = tmp_path / "bad.ssm"
        bad.write_text(
            'gsn "m" {\n  goal G1 "a"\n  goal G1 "b" under G1\n}\n',
            encoding="utf-8",
        )
        result = run(runner, workdir, "validate", bad)
        assert result.exit_code == 1
        assert "G1" in result.output

    def test_parse_error_exits_two(self, runner, workdir, tmp_path):
        broken = tmp_path / "broken.ssm"
        broken.write_text("gsn {", encoding="utf-8")
        result = run(runner, workdir, "validate", broken)
        assert result.exit_code == 2

    def test_missing_file_exits_two(self, runner, workdir):
        result = run(runner, workdir, "validate", workdir / "nope.ssm")
        assert result.exit_code == 2


class TestFtaCutsets:
    def test_minimal_cut_sets_text(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "fta",
            "cutsets",
            workdir / "servertheft.ssm",
            "--tree",
            "ServerTheft",
            "--minimal",
        )
        assert result.exit_code == 0, result.output
        assert result.output.splitlines() == ["{A}", "{B, C}", "{E, F}"]

    def test_machine_output(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "--format",
            "machine",
            "fta",
            "cutsets",
            workdir / "servertheft.ssm",
            "--tree",
            "ServerTheft",
            "--minimal",
        )
        payload = json.loads(result.output)
        assert payload["cut_sets"] == [["A"], ["B", "C"], ["E", "F"]]
        assert payload["minimal"] is True

    def test_unknown_tree_exits_two(self, runner, workdir):
        result = run(
            runner, workdir, "fta", "cutsets", workdir / "servertheft.ssm", "--tree", "nope"
        )
        assert result.exit_code == 2


class TestFmeaRpn:
    def test_ranked_output(self, runner, workdir, tmp_path):
        f = tmp_path / "t.ssm"
        f.write_text(
            'fmea "Valves" {\n'
            '  row V1 function = "open valve" mode = loss_of_function '
            "severity = 7 occurrence = 3 detection = 4\n"
            '  row V2 function = "close valve" mode = erroneous '
            "severity = 9 occurrence = 2 detection = 8\n"
            "}\n",
            encoding="utf-8",
        )
        result = run(runner, workdir, "fmea", "rpn", f, "--table", "Valves")
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert "V2" in lines[1] and "144" in lines[1]
        assert "V1" in lines[2] and "84" in lines[2]
        assert "not security-relevant" in result.output


class TestGsnConfidence:
    def test_triples_without_verdicts(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "gsn",
            "confidence",
            workdir / "airbag.ssm",
            "--model",
            "Airbag",
        )
        assert result.exit_code == 0, result.output
        assert "G1: 14/18 defeaters -> B=0.23 D=0.07 U=0.70" in result.output

    def test_triples_with_verdict_file(self, runner, workdir, tmp_path):
        verdicts = tmp_path / "verdicts.txt"
        verdicts.write_text("Airbag Attack = acceptable_risk\n", encoding="utf-8")
        result = run(
            runner,
            workdir,
            "gsn",
            "confidence",
            workdir / "airbag.ssm",
            "--model",
            "Airbag",
            "--verdicts",
            verdicts,
        )
        assert result.exit_code == 0, result.output
        assert "G1: 14/18 defeaters -> B=0.90 D=0.07 U=0.03" in result.output
        assert "acceptable_risk" in result.output

    def test_bad_verdict_value_exits_two(self, runner, workdir, tmp_path):
        verdicts = tmp_path / "verdicts.txt"
        verdicts.write_text("Airbag Attack = fine\n", encoding="utf-8")
        result = run(
            runner,
            workdir,
            "gsn",
            "confidence",
            workdir / "airbag.ssm",
            "--model",
            "Airbag",
            "--verdicts",
            verdicts,
        )
        assert result.exit_code == 2


class TestDerive:
    def test_prints_parseable_adt(self, runner, workdir):
        result = run(
            runner, workdir, "derive", "adt", workdir / "airbag.ssm", "--gsn", "Airbag"
        )
        assert result.exit_code == 0, result.output
        assert 'adt "Attack Airbag"' in result.output
        assert "tamper voter Airbag" in result.output

    def test_writes_ssm_and_dot_files(self, runner, workdir, tmp_path):
        out = tmp_path / "derived.ssm"
        dot_file = tmp_path / "derived.dot"
        result = run(
            runner,
            workdir,
            "derive",
            "adt",
            workdir / "airbag.ssm",
            "--gsn",
            "Airbag",
            "--out",
            out,
            "--dot",
            dot_file,
        )
        assert result.exit_code == 0, result.output
        assert "attack" in out.read_text(encoding="utf-8")
        assert dot_file.read_text(encoding="utf-8").startswith("digraph")


class TestAdtEval:
    def test_probability_values(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "adt",
            "eval",
            workdir / "airbag.ssm",
            "--adt",
            "Airbag Attack",
            "--attribute",
            "probability",
        )
        assert result.exit_code == 0, result.output
        assert "root: Attack Airbag = 0.3" in result.output

    def test_policy_adds_verdict(self, runner, workdir, tmp_path):
        policy = tmp_path / "policy.txt"
        policy.write_text(
            "attribute = probability\nop = <=\nthreshold = 0.1\n", encoding="utf-8"
        )
        result = run(
            runner,
            workdir,
            "adt",
            "eval",
            workdir / "airbag.ssm",
            "--adt",
            "Airbag Attack",
            "--attribute",
            "probability",
            "--policy",
            policy,
        )
        assert result.exit_code == 0, result.output
        assert "verdict: unacceptable_risk" in result.output

    def test_unknown_attribute_exits_two(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "adt",
            "eval",
            workdir / "airbag.ssm",
            "--adt",
            "Airbag Attack",
            "--attribute",
            "entropy",
        )
        assert result.exit_code == 2


class TestConflicts:
    def test_contradiction_exits_one(self, runner, workdir):
        result = run(runner, workdir, "conflicts", workdir / "building.ssm")
        assert result.exit_code == 1
        assert "CONTRADICTION on DoorLock" in result.output
        assert "Auth=false" in result.output and "SigFire=true" in result.output

    def test_revised_model_is_consistent(self, runner, workdir):
        result = run(runner, workdir, "conflicts", workdir / "building_revised.ssm")
        assert result.exit_code == 0, result.output
        assert "consistent" in result.output

    def test_machine_output_contains_witness(self, runner, workdir):
        result = run(
            runner, workdir, "--format", "machine", "conflicts", workdir / "building.ssm"
        )
        payload = json.loads(result.output)
        assert payload["contradictions"]
        witness = payload["contradictions"][0]
        assert witness["conflicted_signal"] == "DoorLock"
        assert witness["assignment"] == {"Auth": False, "SigFire": True}


class TestProcessRun:
    def test_accepted_scenario(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "process",
            "run",
            workdir / "airbag.ssm",
            "--scenario",
            "Airbag Hardening",
        )
        assert result.exit_code == 0, result.output
        assert "status: accepted" in result.output
        assert "round 3" in result.output

    def test_machine_transcript(self, runner, workdir):
        result = run(
            runner,
            workdir,
            "--format",
            "machine",
            "process",
            "run",
            workdir / "airbag.ssm",
            "--scenario",
            "Airbag Hardening",
        )
        payload = json.loads(result.output)
        assert payload["status"] == "accepted"
        assert [r["verdict"] for r in payload["rounds"]] == [
            "no_assessment",
            "unacceptable_risk",
            "acceptable_risk",
        ]
        assert payload["final"]["belief"] == pytest.approx(0.9)

    def test_unmet_thresholds_exit_one(self, runner, workdir, tmp_path):
        text = load_bundled("airbag.ssm").replace("min_belief = 0.8", "min_belief = 0.99")
        f = tmp_path / "strict.ssm"
        f.write_text(text, encoding="utf-8")
        result = run(
            runner, workdir, "process", "run", f, "--scenario", "Airbag Hardening"
        )
        assert result.exit_code == 1
        assert "status: exhausted" in result.output


class TestExportDot:
    @pytest.mark.parametrize("name", ["Airbag", "Airbag Attack"])
    def test_renders_digraph(self, runner, workdir, name):
        result = run(
            runner, workdir, "export", "dot", workdir / "airbag.ssm", "--model", name
        )
        assert result.exit_code == 0, result.output
        assert result.output.startswith("digraph")

    def test_unknown_model_lists_available(self, runner, workdir):
        result = run(
            runner, workdir, "export", "dot", workdir / "airbag.ssm", "--model", "nope"
        )
        assert result.exit_code == 2


class TestMachineFormatStability:
    def test_output_is_sorted_and_stable(self, runner, workdir):
        args = [
            "--format",
            "machine",
            "gsn",
            "confidence",
            str(workdir / "airbag.ssm"),
            "--model",
            "Airbag",
        ]
        first = run(runner, workdir, *args).output
        second = run(runner, workdir, *args).output
        assert first == second
        payload = json.loads(first)
        assert list(payload) == sorted(payload)
