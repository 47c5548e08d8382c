import io
import json

import pytest

from app import cli
from app.core.exceptions import SoundnessError
from app.services.icgs_service import load_model


@pytest.fixture
def model_path(samples_dir):
    return str(samples_dir / "confused.json")


@pytest.fixture
def trace_path(samples_dir):
    return str(samples_dir / "confused.trace")


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


def test_validate(capsys, model_path):
    code, out = run(capsys, "validate", "--model", model_path)
    assert code == 0
    doc = json.loads(out.out)
    assert doc["valid"] is True
    assert doc["imperfect_information_degree"] == pytest.approx(2 / 3)


def test_validate_reports_violations(capsys, confused_doc, tmp_path):
    confused_doc["transitions"] = confused_doc["transitions"][1:]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(confused_doc))
    code, out = run(capsys, "validate", "--model", str(path))
    assert code == 3
    assert [v["kind"] for v in json.loads(out.out)["violations"]] == ["totality"]


class TestCheck:
    def test_verdict_and_exit_code(self, capsys, model_path):
        code, out = run(capsys, "check", "--model", model_path, "--formula", "<<1>> F p")
        assert code == 0
        assert json.loads(out.out)["verdict"] == "top"

    def test_refuted(self, capsys, model_path):
        code, _ = run(capsys, "check", "--model", model_path, "--formula", "<<2>> F p")
        assert code == 1

    def test_emit_result_then_replay(self, capsys, model_path, trace_path, tmp_path):
        results = tmp_path / "results.json"
        run(capsys, "check", "--model", model_path, "--formula", "<<1>> F p", "--emit-result", str(results))
        assert results.exists()
        code, out = run(
            capsys, "verify", "--model", model_path, "--formula", "<<1>> F p", "--trace", trace_path,
            "--replay", str(results),
        )
        assert code == 0
        assert json.loads(out.out)["candidate_count"] == 2

    def test_replay_rejects_other_formula(self, capsys, model_path, trace_path, tmp_path):
        results = tmp_path / "results.json"
        run(capsys, "check", "--model", model_path, "--formula", "<<1>> F p", "--emit-result", str(results))
        code, out = run(
            capsys, "verify", "--model", model_path, "--formula", "<<1>> G p", "--trace", trace_path,
            "--replay", str(results),
        )
        assert code == 3
        assert "Saved results" in out.err

    def test_export_ispl_of_first_candidate(self, capsys, model_path, tmp_path):
        target = tmp_path / "model.ispl"
        run(capsys, "check", "--model", model_path, "--formula", "<<1>> F p", "--export-ispl", str(target))
        text = target.read_text()
        assert "state : { s0, s1, s_bot };" in text
        assert "<g1>F(p);" in text

    def test_syntax_error(self, capsys, model_path):
        code, out = run(capsys, "check", "--model", model_path, "--formula", "<<1>> F")
        assert code == 3
        assert out.err.startswith("error:")


class TestMonitor:
    def test_trace_file(self, capsys, trace_path):
        code, out = run(capsys, "monitor", "--formula", "F p", "--trace", trace_path)
        assert code == 0
        doc = json.loads(out.out)
        assert doc["verdicts"] == ["unknown", "top"]
        assert doc["monitor_states"] == 2

    def test_online(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("q\n\n"))
        code, out = run(capsys, "monitor", "--formula", "G !p", "--online")
        assert code == 2
        assert out.out.split() == ["unknown", "unknown"]

    def test_model_restricts_atoms(self, capsys, model_path, tmp_path):
        trace = tmp_path / "odd.trace"
        trace.write_text("z\n")
        code, out = run(capsys, "monitor", "--formula", "F p", "--trace", str(trace), "--model", model_path)
        assert code == 3
        assert "unknown atom" in out.err

    def test_exports(self, capsys, trace_path, tmp_path):
        dot, doc = tmp_path / "m.dot", tmp_path / "m.json"
        run(capsys, "monitor", "--formula", "G p", "--trace", trace_path, "--emit-dot", str(dot), "--emit-json", str(doc))
        assert dot.read_text().startswith("digraph")
        assert json.loads(doc.read_text())["formula"] == "G p"

    def test_strategic_formula(self, capsys, trace_path):
        code, _ = run(capsys, "monitor", "--formula", "<<1>> F p", "--trace", trace_path)
        assert code == 3


class TestVerify:
    def test_report_without_timing(self, capsys, model_path, trace_path, tmp_path):
        report = tmp_path / "report.json"
        code, out = run(
            capsys, "verify", "--model", model_path, "--formula", "<<1>> F p", "--trace", trace_path,
            "--no-timing", "--report", str(report),
        )
        assert code == 0
        doc = json.loads(out.out)
        assert doc["verdict"] == "top"
        assert doc["timing"] is None
        assert [c["outcome"]["verdict"] for c in doc["candidates"]] == ["top", "unknown"]
        assert json.loads(report.read_text()) == doc

    def test_export_candidates(self, capsys, model_path, trace_path, tmp_path):
        out_dir = tmp_path / "candidates"
        run(
            capsys, "verify", "--model", model_path, "--formula", "<<1>> F p", "--trace", trace_path,
            "--export-candidates", str(out_dir),
        )
        sidecar = json.loads((out_dir / "candidate_1.core.json").read_text())
        assert sidecar["core_states"] == ["s0", "s2"]
        negative = load_model(str(out_dir / "candidate_0_negative.json"))
        assert negative.states == ("s0", "s1", "s_bot")
        assert (out_dir / "candidate_1_positive.json").exists()

    def test_soundness_violation_exit_code(self, capsys, model_path, trace_path, monkeypatch):
        def fail(*args, **kwargs):
            raise SoundnessError("opposite verdicts")

        monkeypatch.setattr(cli, "model_checking_procedure", fail)
        code, out = run(capsys, "verify", "--model", model_path, "--formula", "<<1>> F p", "--trace", trace_path)
        assert code == 4
        assert "internal error" in out.err


class TestGeneration:
    def test_simulate(self, capsys, model_path):
        code, out = run(capsys, "simulate", "--model", model_path, "--steps", "5", "--seed", "2")
        assert code == 0
        doc = json.loads(out.out)
        assert len(doc["events"]) == len(doc["states"]) == 5
        assert doc["states"][0] == "s0"

    def test_simulate_text(self, capsys, model_path):
        _, out = run(capsys, "simulate", "--model", model_path, "--steps", "3", "--format", "text")
        assert out.out.count("\n") == 3

    def test_gen(self, capsys, tmp_path):
        target = tmp_path / "random.json"
        code, _ = run(capsys, "gen", "--states", "6", "--info-ratio", "0.5", "--seed", "4", "-o", str(target))
        assert code == 0
        m = load_model(str(target))
        assert len(m.states) == 6
        assert not m.is_perfect_information

    @pytest.mark.parametrize("ratio", ["0.2", "1.5"])
    def test_gen_bad_ratio(self, capsys, ratio):
        code, _ = run(capsys, "gen", "--states", "5", "--info-ratio", ratio)
        assert code == 3

    def test_sweep(self, capsys):
        code, out = run(
            capsys, "sweep", "--ratios", "0,0.4", "--models-per-ratio", "2", "--states", "5", "--steps", "5",
            "--no-timing",
        )
        assert code == 0
        lines = out.out.splitlines()
        assert lines[0].startswith("ratio,models,conclusive_rate")
        assert [line.split(",")[0] for line in lines[1:]] == ["0.00", "0.40"]
        assert "mean_conclusive_rate" in out.err


@pytest.mark.parametrize("name, argv, exit_code", [
    ("validate", ["validate", "--model", "{model}"], 0),
    ("check", ["check", "--model", "{model}", "--formula", "<<1>> F p"], 0),
    ("monitor", ["monitor", "--formula", "F p", "--trace", "{trace}"], 0),
    ("verify", ["verify", "--model", "{model}", "--formula", "<<1>> F p", "--trace", "{trace}", "--no-timing"], 0),
])
def test_worked_example_output(capsys, samples_dir, model_path, trace_path, name, argv, exit_code):
    code, out = run(capsys, *(a.format(model=model_path, trace=trace_path) for a in argv))
    assert code == exit_code
    assert out.out == (samples_dir / f"confused.{name}.expected").read_text(encoding="utf-8")


@pytest.mark.parametrize("argv", [
    ["check"],
    ["check", "--model"],
    ["bogus"],
    [],
    ["gen", "--states", "five"],
])
def test_usage_errors_are_input_errors(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 3
    assert "usage:" in out.err


def test_help_exits_cleanly(capsys):
    code, out = run(capsys, "--help")
    assert code == 0
    assert "usage:" in out.out
