"""Scenario/trace round-trips and the command-line contract."""

import io
import json
import re
from pathlib import Path

import pytest

from chordcheck import Schedule, ideal_ring, run_fig3, simulate
from chordcheck.cli import (
    EXIT_CAP_HIT,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_SCHEMA,
    EXIT_USAGE,
    EXIT_VIOLATION,
    main,
)
from chordcheck.errors import ScenarioFormatError, TraceFormatError
from chordcheck.files import (
    load_scenario,
    load_trace,
    read_trace,
    scenario_from_doc,
    scenario_to_doc,
    write_trace,
)

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


IDEAL3 = {
    "version": "1",
    "m": 3,
    "r": 2,
    "init": [
        {"id": 0, "prdc": 5, "succ_list": [2, 5]},
        {"id": 2, "prdc": 0, "succ_list": [5, 0]},
        {"id": 5, "prdc": 2, "succ_list": [0, 2]},
    ],
}


class TestScenarioFormat:
    def test_roundtrip(self):
        scenario = scenario_from_doc(IDEAL3)
        assert scenario_from_doc(scenario_to_doc(scenario)).initial == scenario.initial

    def test_shipped_scenarios_load(self):
        for path in SCENARIOS.glob("*.json"):
            load_scenario(str(path))

    @pytest.mark.parametrize(
        "mutate, message",
        [
            (lambda d: d.update(m="three"), "'m'"),
            (lambda d: d["init"][0].update(succ_list=[2]), "exactly r=2"),
            (lambda d: d["init"][0].update(id=8), "outside"),
            (lambda d: d["init"].append(dict(d["init"][0])), "duplicates"),
            (lambda d: d.update(version="9"), "version"),
            (lambda d: d.update(events=[{"kind": "warp", "actor": 0}]), "kind"),
            (lambda d: d.update(events=[{"kind": "join", "actor": 1}]), "require an 'arg'"),
            (lambda d: d.update(events=[{"kind": "fail", "actor": 0, "arg": 2}]), "no 'arg'"),
        ],
    )
    def test_schema_violations(self, mutate, message):
        doc = json.loads(json.dumps(IDEAL3))
        mutate(doc)
        with pytest.raises(ScenarioFormatError, match=re.escape(message)):
            scenario_from_doc(doc)

    def test_forced_fail_requires_flag(self):
        doc = json.loads(json.dumps(IDEAL3))
        doc["init"].append({"id": 7, "prdc": 5, "succ_list": [0, 2]})
        doc["events"] = [{"kind": "fail", "actor": 7, "forced": True}]
        with pytest.raises(ScenarioFormatError, match="allow_forced_fail"):
            scenario_from_doc(doc)
        doc["allow_forced_fail"] = True
        scenario = scenario_from_doc(doc)
        assert not scenario.starting_state().is_member(7)

    def test_parse_error_carries_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  \"version\": \"1\",,\n}")
        with pytest.raises(ScenarioFormatError, match=r"bad\.json:2:"):
            load_scenario(str(path))


class TestTraceFormat:
    def test_roundtrip(self, space3):
        s = ideal_ring(space3, 2, [0, 2, 5])
        trace = simulate(s, Schedule(seed=8), steps=25, churn="full")
        buf = io.StringIO()
        write_trace(trace, buf, scenario_digest="abc123")
        buf.seek(0)
        loaded = read_trace(buf)
        assert loaded.initial == trace.initial
        assert loaded.records == trace.records
        assert loaded.verdict == trace.verdict
        assert loaded.meta == json.loads(json.dumps(trace.meta))

    def test_prelude_roundtrip(self):
        trace = run_fig3()
        buf = io.StringIO()
        write_trace(trace, buf)
        buf.seek(0)
        assert read_trace(buf).records == trace.records

    def test_byte_identical_modulo_timestamp(self, space3):
        s = ideal_ring(space3, 2, [0, 2, 5])

        def render():
            buf = io.StringIO()
            write_trace(simulate(s, Schedule(seed=8), steps=25), buf)
            lines = buf.getvalue().splitlines()
            header = json.loads(lines[0])
            header.pop("created_at")
            return [json.dumps(header, sort_keys=True)] + lines[1:]

        assert render() == render()

    def test_malformed_trace_rejected(self):
        with pytest.raises(TraceFormatError):
            read_trace(io.StringIO(""))
        with pytest.raises(TraceFormatError):
            read_trace(io.StringIO('{"type": "record"}\n'))


class TestCli:
    def test_check_ideal_scenario(self, tmp_path, capsys):
        path = write_scenario(tmp_path, IDEAL3)
        assert main(["check", path]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["valid_initial"] is True
        assert all(out["flags"].values())

    def test_check_size_one_rejected(self, capsys):
        code = main(["check", str(SCENARIOS / "size_one_m6.json")])
        assert code == EXIT_VIOLATION
        out = json.loads(capsys.readouterr().out)
        assert out["flags"]["sufficient_principals"] is False

    def test_check_schema_error(self, tmp_path):
        doc = json.loads(json.dumps(IDEAL3))
        doc["init"][0]["succ_list"] = [2]
        path = write_scenario(tmp_path, doc)
        assert main(["check", path]) == EXIT_SCHEMA

    def test_explore_ideal_ring(self, tmp_path, capsys):
        path = write_scenario(tmp_path, IDEAL3)
        assert main(["explore", path, "--depth", "3"]) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["verdict"] == "ok"

    def test_explore_depth_zero(self, tmp_path, capsys):
        path = write_scenario(tmp_path, IDEAL3)
        assert main(["explore", path, "--depth", "0"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["states_visited"] == 1

    def test_explore_cap_hit_distinct_status(self, tmp_path):
        path = write_scenario(tmp_path, IDEAL3)
        assert main(["explore", path, "--depth", "6", "--max-states", "40"]) == EXIT_CAP_HIT

    def test_explore_violation_writes_trace(self, tmp_path, capsys):
        out_path = tmp_path / "cx.trace"
        code = main([
            "explore", str(SCENARIOS / "stranded_appendages_m6.json"),
            "--out", str(out_path),
        ])
        assert code == EXIT_VIOLATION
        summary = json.loads(capsys.readouterr().out)
        assert summary["verdict"] == "invariant-violated"
        trace = load_trace(str(out_path))
        assert len(trace.records) == 1

    def test_simulate_deterministic_files(self, tmp_path):
        path = write_scenario(tmp_path, IDEAL3)
        a, b = tmp_path / "a.trace", tmp_path / "b.trace"
        assert main(["simulate", path, "--steps", "30", "--seed", "7", "--out", str(a)]) == EXIT_OK
        assert main(["simulate", path, "--steps", "30", "--seed", "7", "--out", str(b)]) == EXIT_OK

        def strip(p):
            lines = p.read_text().splitlines()
            header = json.loads(lines[0])
            header.pop("created_at")
            return [json.dumps(header, sort_keys=True)] + lines[1:]

        assert strip(a) == strip(b)

    def test_converge_join_scenario(self, tmp_path, capsys):
        code = main(["converge", str(SCENARIOS / "join_lifecycle_m6.json"), "--seed", "5"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        verdict = json.loads(lines[-1])
        assert verdict["verdict"] == "converged"

    def test_converge_rejects_invalid_network(self, capsys):
        code = main(["converge", str(SCENARIOS / "size_one_m6.json")])
        assert code == EXIT_VIOLATION

    def test_repro_fig3(self, tmp_path, capsys):
        out = tmp_path / "fig3.trace"
        assert main(["repro", "fig3", "--out", str(out)]) == EXIT_OK
        trace = load_trace(str(out))
        assert trace.records[-1].flags["one_live_successor"] is False

    def test_repro_fig4(self, tmp_path):
        out = tmp_path / "fig4.trace"
        assert main(["repro", "fig4", "--out", str(out)]) == EXIT_OK
        trace = load_trace(str(out))
        assert trace.records[-1].flags["ordered_ring"] is False

    def test_repro_unknown_is_usage_error(self):
        assert main(["repro", "fig9"]) == EXIT_USAGE

    def test_replay_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "fig3.trace"
        main(["repro", "fig3", "--out", str(out)])
        capsys.readouterr()
        assert main(["replay", str(out)]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["verdict"] == "replay-ok"

    def test_replay_detects_tampering(self, tmp_path, capsys):
        out = tmp_path / "fig3.trace"
        main(["repro", "fig3", "--out", str(out)])
        lines = out.read_text().splitlines()
        rec = json.loads(lines[1])
        rec["state_digest"] = "0" * 64
        lines[1] = json.dumps(rec, sort_keys=True, separators=(",", ":"))
        out.write_text("\n".join(lines) + "\n")
        assert main(["replay", str(out)]) == EXIT_VIOLATION

    def test_usage_error_on_missing_command(self):
        assert main([]) == EXIT_USAGE

    def test_m_override_revalidates(self, tmp_path):
        path = write_scenario(tmp_path, IDEAL3)
        # shrinking the space below the member identifiers must fail loudly
        assert main(["check", path, "--m", "2"]) == EXIT_SCHEMA

    def test_stdout_trace_when_no_out(self, tmp_path, capsys):
        assert main(["repro", "fig3"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert json.loads(lines[0])["type"] == "header"
        assert json.loads(lines[-1])["type"] == "verdict"
