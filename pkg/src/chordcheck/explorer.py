"""Bounded exhaustive exploration, fair randomized simulation, convergence
checking, and trace replay.

Exploration is breadth-first so the first violating trace found is also a
minimal-length counterexample; no shrinking pass is needed. States are
deduplicated by value (snapshots are canonical: members and pending
entries are kept sorted), and every visited state can be traced back to
the initial state through recorded parent links.

The simulator is deterministic for a given seed. Fairness is a hard
window constraint, not a probabilistic property: the scheduler forces the
most-overdue member to stabilize before its idle time can exceed the
window, and force-delivers notifications older than one window, so a
non-convergence verdict is always a real finding.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, NamedTuple

from .errors import InvalidInitialStateError, ReplayMismatchError
from .properties import (
    ErrorMetric,
    check_all,
    error_metric,
    invariant_holds,
    is_ideal,
    valid_initial,
)
from .protocol import Step, StepKind, apply_step, enabled_steps
from .state import GlobalState, principals


def state_digest(state: GlobalState) -> str:
    """Stable content digest of a snapshot (canonical form, sha256)."""
    doc = (
        state.space.m,
        state.r,
        state.members,
        state.pending_stabilize,
        state.pending_notify,
    )
    return hashlib.sha256(repr(doc).encode("ascii")).hexdigest()


class TraceRecord(NamedTuple):
    index: int
    step: Step
    digest: str
    flags: dict[str, bool]
    cumulative_error: int


@dataclass
class Trace:
    """Replayable record of one run: the initial snapshot and, per step,
    the resulting state digest, property flags, and cumulative pointer
    error. ``seed_state``/``prelude`` are present when the run normalized
    in-flight messages before measuring (see ``converge``)."""

    initial: GlobalState
    records: list[TraceRecord]
    verdict: str
    kind: str = "run"
    meta: dict = field(default_factory=dict)
    seed_state: GlobalState | None = None
    prelude: list[TraceRecord] = field(default_factory=list)
    metrics: list[ErrorMetric] | None = None  # transient; not serialized

    def final_state(self) -> GlobalState:
        state = self.initial
        for rec in self.records:
            state = apply_step(state, rec.step)
        return state


def _record(index: int, step: Step, state: GlobalState) -> TraceRecord:
    report = check_all(state)
    return TraceRecord(
        index=index,
        step=step,
        digest=state_digest(state),
        flags=dict(report.flags),
        cumulative_error=error_metric(state).cumulative,
    )


def run_script(
    initial: GlobalState,
    steps: Iterable[Step],
    kind: str = "script",
    meta: dict | None = None,
) -> Trace:
    """Apply a fixed step sequence, recording each resulting state."""
    records = []
    state = initial
    for i, step in enumerate(steps):
        state = apply_step(state, step)
        records.append(_record(i, step, state))
    return Trace(initial=initial, records=records, verdict="ok", kind=kind, meta=meta or {})


# -- bounded breadth-first exploration ---------------------------------------


@dataclass(frozen=True)
class ExploreConfig:
    max_depth: int = 6
    max_states: int = 1_000_000
    churn: str = "full"
    join_candidate_cap: int | None = None
    dedup: bool = True
    require_valid_initial: bool = True
    collect_states: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.max_depth < 0 or self.max_states < 1 or self.workers < 1:
            raise ValueError("max_depth must be >= 0 and caps positive")


@dataclass
class ExploreResult:
    verdict: str  # ok | invariant-violated | cap-hit
    states_visited: int
    transitions: int
    depth_reached: int
    frontier_size: int
    trace: Trace | None = None
    states: list[GlobalState] | None = None  # BFS order, when collect_states
    parents: dict | None = None  # state -> (parent, step) | None, when collect_states

    @property
    def ok(self) -> bool:
        return self.verdict == "ok"

    def path_to(self, state: GlobalState) -> list[Step]:
        """Reconstruct a concrete step sequence from the initial state to
        any visited state (requires ``collect_states``)."""
        if self.parents is None:
            raise ValueError("exploration did not keep parent links")
        steps: list[Step] = []
        cur = state
        while self.parents[cur] is not None:
            parent, step = self.parents[cur]
            steps.append(step)
            cur = parent
        steps.reverse()
        return steps


TransitionHook = Callable[[GlobalState, Step, GlobalState, frozenset, frozenset], None]


def _expand_chunk(args):
    states, churn, cap = args
    out = []
    for i, state in enumerate(states):
        row = []
        for step in enabled_steps(state, churn=churn, join_candidate_cap=cap):
            post = apply_step(state, step)
            post_prins = principals(post)
            live_ok = all(
                any(e in post._by_ident for e in node.succ_list) for node in post.members
            )
            inv_ok = live_ok and len(post_prins) >= post.r + 1
            row.append((step, post, post_prins, inv_ok))
        out.append(row)
    return out


def _violation_trace(
    parents: dict[GlobalState, tuple[GlobalState, Step] | None],
    pre: GlobalState,
    step: Step,
    post: GlobalState,
) -> Trace:
    path: list[tuple[Step, GlobalState]] = [(step, post)]
    cur = pre
    while parents[cur] is not None:
        parent, via = parents[cur]
        path.append((via, cur))
        cur = parent
    path.reverse()
    records = [_record(i, s, st) for i, (s, st) in enumerate(path)]
    return Trace(
        initial=cur,
        records=records,
        verdict="invariant-violated",
        kind="explore",
    )


def explore(
    initial: GlobalState,
    cfg: ExploreConfig | None = None,
    on_transition: TransitionHook | None = None,
) -> ExploreResult:
    """Breadth-first search over atomic-step interleavings.

    Checks the invariant on every post-state and returns the first (hence
    minimal) violating trace, else a summary. Hitting the visited-state
    cap yields an inconclusive ``cap-hit`` verdict, never success.
    """
    cfg = cfg or ExploreConfig()
    if cfg.require_valid_initial and not valid_initial(initial):
        raise InvalidInitialStateError(
            "initial state is not a valid initial network "
            "(invariant must hold and no repair traffic may be in flight)"
        )
    pool = None
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        pool = ProcessPoolExecutor(max_workers=cfg.workers)
    try:
        return _explore_loop(initial, cfg, on_transition, pool)
    finally:
        if pool is not None:
            pool.shutdown()


def _explore_loop(initial, cfg, on_transition, pool) -> ExploreResult:
    parents: dict[GlobalState, tuple[GlobalState, Step] | None] = {initial: None}
    collected = [initial] if cfg.collect_states else None
    frontier: list[tuple[GlobalState, frozenset]] = [(initial, principals(initial))]
    transitions = 0
    depth = 0
    capped = False
    while frontier and depth < cfg.max_depth and not capped:
        next_frontier: list[tuple[GlobalState, frozenset]] = []
        if pool is None:
            chunk_rows = (
                (
                    (state, prins),
                    _expand_chunk(([state], cfg.churn, cfg.join_candidate_cap))[0],
                )
                for state, prins in frontier
            )
        else:
            chunk_size = max(1, len(frontier) // (cfg.workers * 4))
            chunks = [frontier[i : i + chunk_size] for i in range(0, len(frontier), chunk_size)]
            futures = [
                pool.submit(_expand_chunk, ([s for s, _ in chunk], cfg.churn, cfg.join_candidate_cap))
                for chunk in chunks
            ]
            chunk_rows = (
                (entry, row)
                for chunk, fut in zip(chunks, futures)
                for entry, row in zip(chunk, fut.result())
            )
        for (state, prins), row in chunk_rows:
            for step, post, post_prins, inv_ok in row:
                transitions += 1
                if on_transition is not None:
                    on_transition(state, step, post, prins, post_prins)
                if not inv_ok:
                    trace = _violation_trace(parents, state, step, post)
                    return ExploreResult(
                        verdict="invariant-violated",
                        states_visited=len(parents),
                        transitions=transitions,
                        depth_reached=depth + 1,
                        frontier_size=len(next_frontier),
                        trace=trace,
                        states=collected,
                        parents=parents if cfg.collect_states else None,
                    )
                known = post in parents
                if not known:
                    parents[post] = (state, step)
                    if collected is not None:
                        collected.append(post)
                if cfg.dedup and known:
                    continue
                next_frontier.append((post, post_prins))
                if len(parents) >= cfg.max_states:
                    capped = True
                    break
            if capped:
                break
        depth += 1
        frontier = next_frontier
    verdict = "cap-hit" if capped else "ok"
    return ExploreResult(
        verdict=verdict,
        states_visited=len(parents),
        transitions=transitions,
        depth_reached=depth,
        frontier_size=len(frontier),
        states=collected,
        parents=parents if cfg.collect_states else None,
    )


# -- fair randomized simulation ----------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Seeded, fairness-window-respecting scheduling policy.

    Every member performs a stabilize step within every
    ``fairness_window`` scheduler rounds, and undelivered notifications
    are force-delivered once they are a window old. The window defaults to
    twice the live member count at the start of the run and must be at
    least the live member count; windows below twice the member count
    leave little or no round capacity for message delivery and churn.
    """

    seed: int
    fairness_window: int | None = None

    def window_for(self, state: GlobalState) -> int:
        window = self.fairness_window
        if window is None:
            window = 2 * max(1, state.live_count)
        if window < state.live_count:
            raise ValueError(
                f"fairness window {window} is smaller than the live member count "
                f"{state.live_count}"
            )
        return window


class _FairScheduler:
    """Picks one enabled step per round, forcing overdue repair work.

    Members are scheduled deadline-first: a member whose idle time reaches
    window - 1 stabilizes this round. Initial idle times are staggered and
    at most one member resets per round, so deadlines never collide and no
    member's gap between stabilizes can exceed the window. Rounds without
    a deadline deliver over-age notifications first, then fall back to a
    seeded random choice over everything enabled.
    """

    def __init__(self, state: GlobalState, schedule: Schedule, churn: str,
                 join_candidate_cap: int | None = None):
        self.rng = random.Random(schedule.seed)
        self.window = schedule.window_for(state)
        self.churn = churn
        self.cap = join_candidate_cap
        self.idle = {ident: i for i, ident in enumerate(state.idents())}
        self.notify_age = {entry: 0 for entry in state.pending_notify}

    def _stabilize_step(self, state: GlobalState, member: int) -> Step:
        candidate = state.pending_stabilize_for(member)
        if candidate is not None:
            return Step(StepKind.STABILIZE_FROM_PREDECESSOR, member, candidate)
        return Step(StepKind.STABILIZE_FROM_SUCCESSOR, member)

    def pick(self, state: GlobalState) -> Step | None:
        enabled = enabled_steps(state, churn=self.churn, join_candidate_cap=self.cap)
        if not enabled:
            return None
        at_deadline = [m for m, idle in self.idle.items() if idle >= self.window - 1]
        if at_deadline:
            member = max(at_deadline, key=lambda m: (self.idle[m], -m))
            return self._stabilize_step(state, member)
        stale = [e for e, age in self.notify_age.items() if age >= self.window
                 and state.is_member(e[0])]
        if stale:
            target, new_prdc = min(stale)
            return Step(StepKind.RECTIFY, target, new_prdc)
        return self.rng.choice(enabled)

    def account(self, step: Step, post: GlobalState) -> None:
        self.idle = {ident: self.idle.get(ident, -1) + 1 for ident in post.idents()}
        if step.kind in (StepKind.STABILIZE_FROM_SUCCESSOR, StepKind.STABILIZE_FROM_PREDECESSOR):
            self.idle[step.actor] = 0
        ages = {}
        for entry in post.pending_notify:
            ages[entry] = self.notify_age.get(entry, -1) + 1
        self.notify_age = ages


def simulate(
    initial: GlobalState,
    schedule: Schedule,
    steps: int,
    churn: str = "full",
    join_candidate_cap: int | None = None,
    require_valid_initial: bool = True,
) -> Trace:
    """Run a pseudorandom, fairness-window-respecting interleaving.

    Deterministic for a given seed. The churn policy decides whether joins
    and unforced fails are offered to the scheduler.
    """
    if require_valid_initial and not valid_initial(initial):
        raise InvalidInitialStateError("initial state is not a valid initial network")
    sched = _FairScheduler(initial, schedule, churn, join_candidate_cap)
    state = initial
    records = []
    for i in range(steps):
        step = sched.pick(state)
        if step is None:
            break
        state = apply_step(state, step)
        sched.account(step, state)
        records.append(_record(i, step, state))
    return Trace(
        initial=initial,
        records=records,
        verdict="ok",
        kind="simulate",
        meta={
            "seed": schedule.seed,
            "fairness_window": sched.window,
            "churn": churn,
            "steps_requested": steps,
        },
    )


def _drain_prelude(state: GlobalState) -> tuple[GlobalState, list[TraceRecord]]:
    """Deliver the seed state's in-flight continuations and notifications.

    Messages queued before a churn-free run began may reference nodes that
    have since died; delivering them mid-measurement could legally install
    a dead predecessor. Draining them first makes the monotonicity and
    remains-ideal claims hold over the measured records.
    """
    records = []
    index = 0
    for member, candidate in state.pending_stabilize:
        if not state.is_member(member):
            continue
        step = Step(StepKind.STABILIZE_FROM_PREDECESSOR, member, candidate)
        state = apply_step(state, step)
        records.append(_record(index, step, state))
        index += 1
    for target, new_prdc in sorted(state.pending_notify):
        if not state.is_member(target):
            continue
        step = Step(StepKind.RECTIFY, target, new_prdc)
        state = apply_step(state, step)
        records.append(_record(index, step, state))
        index += 1
    return state, records


def converge(
    initial: GlobalState,
    schedule: Schedule,
    step_cap: int = 200,
) -> Trace:
    """Churn-free fair run until the network is ideal, plus a retention
    window verifying it stays ideal.

    The seed state must satisfy the invariant (mid-operation states with
    repair traffic in flight are accepted; the traffic is drained first
    and recorded as the trace prelude). Records carry the full property
    flags and the cumulative pointer error; per-step error metrics are
    kept on the returned trace for analysis.
    """
    if not invariant_holds(initial):
        raise InvalidInitialStateError("convergence requires the invariant to hold")
    seed_state = initial
    state, prelude = _drain_prelude(initial)
    post_drain = state
    sched = _FairScheduler(state, schedule, churn="none")
    records: list[TraceRecord] = []
    metrics: list[ErrorMetric] = [error_metric(state)]
    steps_to_ideal: int | None = 0 if is_ideal(state) else None
    index = 0
    while steps_to_ideal is None and index < step_cap:
        step = sched.pick(state)
        if step is None:
            break
        state = apply_step(state, step)
        sched.account(step, state)
        records.append(_record(index, step, state))
        metrics.append(error_metric(state))
        index += 1
        if is_ideal(state):
            steps_to_ideal = index
    verdict = "not-converged"
    retained = True
    if steps_to_ideal is not None:
        for _ in range(sched.window):
            step = sched.pick(state)
            if step is None:
                break
            state = apply_step(state, step)
            sched.account(step, state)
            records.append(_record(index, step, state))
            metrics.append(error_metric(state))
            index += 1
            if not is_ideal(state):
                retained = False
                break
        if retained:
            verdict = "converged"
    return Trace(
        initial=post_drain,
        records=records,
        verdict=verdict,
        kind="converge",
        meta={
            "seed": schedule.seed,
            "fairness_window": sched.window,
            "step_cap": step_cap,
            "steps_to_ideal": steps_to_ideal,
        },
        seed_state=seed_state if prelude else None,
        prelude=prelude,
        metrics=metrics,
    )


def replay(trace: Trace) -> list:
    """Re-execute a trace and re-check every digest and flag set.

    A mismatch is a hard error: it means the trace does not describe the
    run it claims to (serialization drift, version skew, or tampering).
    Returns the per-step property reports.
    """
    reports = []
    if trace.prelude:
        if trace.seed_state is None:
            raise ReplayMismatchError("trace has a prelude but no seed state")
        state = trace.seed_state
        for rec in trace.prelude:
            state = apply_step(state, rec.step)
            _check_record(state, rec, where="prelude")
        if state != trace.initial:
            raise ReplayMismatchError("prelude does not reproduce the initial state")
    state = trace.initial
    for rec in trace.records:
        state = apply_step(state, rec.step)
        reports.append(_check_record(state, rec, where="records"))
    return reports


def _check_record(state: GlobalState, rec: TraceRecord, where: str):
    digest = state_digest(state)
    if digest != rec.digest:
        raise ReplayMismatchError(
            f"{where}[{rec.index}]: state digest {digest[:12]}... does not match "
            f"recorded {rec.digest[:12]}..."
        )
    report = check_all(state)
    if dict(report.flags) != dict(rec.flags):
        raise ReplayMismatchError(f"{where}[{rec.index}]: property flags diverge")
    cumulative = error_metric(state).cumulative
    if cumulative != rec.cumulative_error:
        raise ReplayMismatchError(
            f"{where}[{rec.index}]: cumulative error {cumulative} != recorded "
            f"{rec.cumulative_error}"
        )
    return report
