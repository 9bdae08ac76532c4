"""Scenario and trace file formats.

Both formats are text, line-oriented, and human-diffable. A scenario is a
single JSON document describing an initial network (plus optional
scripted events and per-command configuration blocks). A trace is
line-delimited JSON: a header, one self-describing record per step, and a
closing verdict line, so files can be appended while a run progresses.

Digests are computed over canonical serializations that exclude volatile
header fields (the creation timestamp), so identical runs produce
byte-identical files modulo that field.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Any

from . import __version__
from .errors import ScenarioFormatError, TraceFormatError
from .explorer import Trace, TraceRecord
from .idspace import IdSpace
from .protocol import Step, StepKind
from .state import GlobalState, NodeState

TRACE_FORMAT = "chordcheck-trace/1"
SCENARIO_VERSION = "1"

_KIND_NAMES = {
    StepKind.JOIN: "join",
    StepKind.FAIL: "fail",
    StepKind.STABILIZE_FROM_SUCCESSOR: "stabilize_from_successor",
    StepKind.STABILIZE_FROM_PREDECESSOR: "stabilize_from_predecessor",
    StepKind.RECTIFY: "rectify",
}
_KINDS_BY_NAME = {name: kind for kind, name in _KIND_NAMES.items()}


def _dump(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# -- steps and states --------------------------------------------------------


def step_to_doc(step: Step) -> dict:
    doc: dict[str, Any] = {"kind": _KIND_NAMES[step.kind], "actor": step.actor}
    if step.arg is not None:
        doc["arg"] = step.arg
    if step.kind == StepKind.FAIL and step.forced:
        doc["forced"] = True
    return doc


def step_from_doc(doc: dict) -> Step:
    try:
        kind = _KINDS_BY_NAME[doc["kind"]]
    except KeyError:
        raise ScenarioFormatError(f"unknown step kind {doc.get('kind')!r}") from None
    actor = doc.get("actor")
    if not isinstance(actor, int):
        raise ScenarioFormatError(f"step actor must be an integer, got {actor!r}")
    arg = doc.get("arg")
    if arg is not None and not isinstance(arg, int):
        raise ScenarioFormatError(f"step arg must be an integer or absent, got {arg!r}")
    if kind in (StepKind.JOIN, StepKind.RECTIFY) and arg is None:
        raise ScenarioFormatError(f"{doc['kind']} steps require an 'arg' identifier")
    if kind in (StepKind.FAIL, StepKind.STABILIZE_FROM_SUCCESSOR) and arg is not None:
        raise ScenarioFormatError(f"{doc['kind']} steps take no 'arg'")
    return Step(kind, actor, arg, forced=bool(doc.get("forced", False)))


def state_to_doc(state: GlobalState) -> dict:
    return {
        "members": [
            {"id": n.ident, "prdc": n.prdc, "succ_list": list(n.succ_list)}
            for n in state.members
        ],
        "pending_stabilize": [list(e) for e in state.pending_stabilize],
        "pending_notify": [list(e) for e in state.pending_notify],
    }


def state_from_doc(doc: dict, space: IdSpace, r: int) -> GlobalState:
    members = tuple(
        NodeState(m["id"], m["prdc"], tuple(m["succ_list"])) for m in doc["members"]
    )
    return GlobalState(
        space,
        r,
        members,
        tuple(tuple(e) for e in doc.get("pending_stabilize", ())),
        tuple(tuple(e) for e in doc.get("pending_notify", ())),
    )


# -- scenarios ----------------------------------------------------------------


@dataclass
class Scenario:
    space: IdSpace
    r: int
    initial: GlobalState
    events: list[Step] = field(default_factory=list)
    allow_forced_fail: bool = False
    explore_config: dict = field(default_factory=dict)
    simulate_config: dict = field(default_factory=dict)
    converge_config: dict = field(default_factory=dict)
    digest: str = ""

    def starting_state(self) -> GlobalState:
        """The initial network with any scripted events applied."""
        from .protocol import apply_step

        state = self.initial
        for step in self.events:
            state = apply_step(state, step)
        return state


def scenario_digest(doc: dict) -> str:
    return hashlib.sha256(_dump(doc).encode("ascii")).hexdigest()


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ScenarioFormatError(message)


def scenario_from_doc(doc: dict, m_override: int | None = None, r_override: int | None = None) -> Scenario:
    _expect(isinstance(doc, dict), "scenario must be a JSON object")
    _expect(str(doc.get("version")) == SCENARIO_VERSION,
            f"unsupported scenario version {doc.get('version')!r}")
    m = m_override if m_override is not None else doc.get("m")
    r = r_override if r_override is not None else doc.get("r")
    _expect(isinstance(m, int), f"field 'm' must be an integer, got {doc.get('m')!r}")
    _expect(isinstance(r, int) and r >= 1, f"field 'r' must be a positive integer, got {doc.get('r')!r}")
    try:
        space = IdSpace(m)
    except ValueError as exc:
        raise ScenarioFormatError(str(exc)) from None

    init = doc.get("init")
    _expect(isinstance(init, list) and init, "field 'init' must be a non-empty list of member records")
    seen: set[int] = set()
    nodes = []
    for i, rec in enumerate(init):
        _expect(isinstance(rec, dict), f"init[{i}] must be an object")
        for key in ("id", "prdc", "succ_list"):
            _expect(key in rec, f"init[{i}] is missing field {key!r}")
        ident, prdc, succ = rec["id"], rec["prdc"], rec["succ_list"]
        _expect(isinstance(ident, int) and space.contains(ident),
                f"init[{i}].id {ident!r} outside [0, {space.size})")
        _expect(ident not in seen, f"init[{i}].id {ident} duplicates an earlier member")
        seen.add(ident)
        _expect(isinstance(prdc, int) and space.contains(prdc),
                f"init[{i}].prdc {prdc!r} outside [0, {space.size})")
        _expect(isinstance(succ, list) and len(succ) == r,
                f"init[{i}].succ_list must have exactly r={r} entries, got {succ!r}")
        for e in succ:
            _expect(isinstance(e, int) and space.contains(e),
                    f"init[{i}].succ_list entry {e!r} outside [0, {space.size})")
        nodes.append(NodeState(ident, prdc, tuple(succ)))

    allow_forced = bool(doc.get("allow_forced_fail", False))
    events = []
    for i, ev in enumerate(doc.get("events", []) or []):
        try:
            step = step_from_doc(ev)
        except ScenarioFormatError as exc:
            raise ScenarioFormatError(f"events[{i}]: {exc}") from None
        _expect(space.contains(step.actor), f"events[{i}].actor outside the identifier space")
        _expect(step.arg is None or space.contains(step.arg),
                f"events[{i}].arg outside the identifier space")
        _expect(not step.forced or allow_forced,
                f"events[{i}] is a forced fail but the scenario does not set allow_forced_fail")
        events.append(step)

    return Scenario(
        space=space,
        r=r,
        initial=GlobalState(space, r, tuple(nodes)),
        events=events,
        allow_forced_fail=allow_forced,
        explore_config=dict(doc.get("explore", {}) or {}),
        simulate_config=dict(doc.get("simulate", {}) or {}),
        converge_config=dict(doc.get("converge", {}) or {}),
        digest=scenario_digest(doc),
    )


def scenario_to_doc(scenario: Scenario) -> dict:
    doc: dict[str, Any] = {
        "version": SCENARIO_VERSION,
        "m": scenario.space.m,
        "r": scenario.r,
        "init": [
            {"id": n.ident, "prdc": n.prdc, "succ_list": list(n.succ_list)}
            for n in scenario.initial.members
        ],
    }
    if scenario.events:
        doc["events"] = [step_to_doc(s) for s in scenario.events]
    if scenario.allow_forced_fail:
        doc["allow_forced_fail"] = True
    if scenario.explore_config:
        doc["explore"] = scenario.explore_config
    if scenario.simulate_config:
        doc["simulate"] = scenario.simulate_config
    if scenario.converge_config:
        doc["converge"] = scenario.converge_config
    return doc


def load_scenario(path: str, m_override: int | None = None, r_override: int | None = None) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: not valid JSON ({exc.msg})"
        ) from None
    return scenario_from_doc(doc, m_override, r_override)


# -- traces -------------------------------------------------------------------


def _record_to_doc(rec: TraceRecord) -> dict:
    return {
        "type": "record",
        "index": rec.index,
        "step": step_to_doc(rec.step),
        "state_digest": rec.digest,
        "flags": dict(rec.flags),
        "cumulative_error": rec.cumulative_error,
    }


def _record_from_doc(doc: dict) -> TraceRecord:
    return TraceRecord(
        index=int(doc["index"]),
        step=step_from_doc(doc["step"]),
        digest=str(doc["state_digest"]),
        flags={str(k): bool(v) for k, v in doc["flags"].items()},
        cumulative_error=int(doc["cumulative_error"]),
    )


def write_trace(trace: Trace, fh: IO[str], scenario_digest: str | None = None) -> None:
    header: dict[str, Any] = {
        "type": "header",
        "format": TRACE_FORMAT,
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": __version__,
        "kind": trace.kind,
        "m": trace.initial.space.m,
        "r": trace.initial.r,
        "initial": state_to_doc(trace.initial),
    }
    if scenario_digest:
        header["scenario_digest"] = scenario_digest
    if trace.seed_state is not None:
        header["seed_state"] = state_to_doc(trace.seed_state)
        header["prelude"] = [_record_to_doc(rec) for rec in trace.prelude]
    fh.write(_dump(header) + "\n")
    for rec in trace.records:
        fh.write(_dump(_record_to_doc(rec)) + "\n")
    fh.write(_dump({"type": "verdict", "verdict": trace.verdict, "meta": trace.meta}) + "\n")


def save_trace(trace: Trace, path: str, scenario_digest: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_trace(trace, fh, scenario_digest)


def read_trace(fh: IO[str]) -> Trace:
    lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise TraceFormatError("trace file is empty")
    docs = []
    for i, line in enumerate(lines, start=1):
        try:
            docs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {i}: not valid JSON ({exc.msg})") from None
    header = docs[0]
    if header.get("type") != "header" or header.get("format") != TRACE_FORMAT:
        raise TraceFormatError("first line must be a trace header")
    try:
        space = IdSpace(int(header["m"]))
        r = int(header["r"])
        initial = state_from_doc(header["initial"], space, r)
        seed_state = None
        prelude = []
        if "seed_state" in header:
            seed_state = state_from_doc(header["seed_state"], space, r)
            prelude = [_record_from_doc(d) for d in header.get("prelude", [])]
        records = []
        verdict = "unknown"
        meta: dict = {}
        for doc in docs[1:]:
            if doc.get("type") == "record":
                records.append(_record_from_doc(doc))
            elif doc.get("type") == "verdict":
                verdict = str(doc.get("verdict"))
                meta = dict(doc.get("meta", {}))
            else:
                raise TraceFormatError(f"unknown line type {doc.get('type')!r}")
    except TraceFormatError:
        raise
    except (KeyError, TypeError, ValueError, ScenarioFormatError) as exc:
        raise TraceFormatError(f"malformed trace: {exc}") from None
    return Trace(
        initial=initial,
        records=records,
        verdict=verdict,
        kind=str(header.get("kind", "run")),
        meta=meta,
        seed_state=seed_state,
        prelude=prelude,
    )


def load_trace(path: str) -> Trace:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return read_trace(fh)
    except OSError as exc:
        raise TraceFormatError(f"cannot read trace {path}: {exc}") from None
