"""The five atomic steps of the ring-maintenance protocol.

Steps are pure state transformers: ``apply_step(state, step)`` returns a
new snapshot and never mutates its input. A stabilize operation spans two
steps; the intermediate state (a captured candidate successor in
``pending_stabilize``) is observable by every other member's steps, which
is exactly the interleaving the shared-state abstraction guarantees.

Joins use an omniscient lookup oracle over the snapshot; the routed
lookup protocol is out of scope here.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterator, NamedTuple

from .errors import (
    AlreadyMemberError,
    FailUnsafeError,
    NoCandidateError,
    NoPendingNotifyError,
    NoPendingStabilizeError,
    StabilizeInProgressError,
    UnknownMemberError,
)
from .state import GlobalState, NodeState, principals


class StepKind(IntEnum):
    JOIN = 0
    FAIL = 1
    STABILIZE_FROM_SUCCESSOR = 2
    STABILIZE_FROM_PREDECESSOR = 3
    RECTIFY = 4


class Step(NamedTuple):
    """One atomic protocol event.

    ``arg`` is the joining member's chosen predecessor for JOIN, the
    notifying identifier for RECTIFY, and the captured candidate successor
    for STABILIZE_FROM_PREDECESSOR; it is None otherwise. ``forced`` is
    meaningful only for FAIL and exists solely for scripted flaw
    reproduction.
    """

    kind: StepKind
    actor: int
    arg: int | None = None
    forced: bool = False

    def sort_key(self) -> tuple[int, int, int]:
        return (int(self.kind), self.actor, -1 if self.arg is None else self.arg)


CHURN_POLICIES = ("none", "joins_only", "fails_only", "full")


def lookup_predecessor(state: GlobalState, joiner: int) -> int:
    """Find a member p with ``between(p, joiner, head(p.succ_list))``.

    Omniscient oracle: scans members in ascending identifier order and
    returns the first match, so results are deterministic. Raises
    NoCandidateError when no member covers the joiner (possible in
    corrupted states; surfaced, never silently patched).
    """
    if state.is_member(joiner):
        raise AlreadyMemberError(f"identifier {joiner} is already a member")
    between = state.space.between
    for node in state.members:
        if between(node.ident, joiner, node.succ_list[0]):
            return node.ident
    raise NoCandidateError(f"no member covers identifier {joiner}")


def step_join(state: GlobalState, joiner: int, new_prdc: int) -> GlobalState:
    """Join: copy the chosen predecessor's successor list and adopt it as
    predecessor. If the chosen predecessor has died, the join aborts and
    the state is unchanged (the node must retry later)."""
    if state.is_member(joiner):
        raise AlreadyMemberError(f"identifier {joiner} is already a member")
    target = state.get(new_prdc)
    if target is None:
        return state  # abort: chosen predecessor died before the step
    return state.with_node(NodeState(joiner, new_prdc, target.succ_list))


def _fail_strands_someone(state: GlobalState, member: int) -> bool:
    for node in state.members:
        if node.ident == member:
            continue
        if not any(e != member and state.is_member(e) for e in node.succ_list):
            return True
    return False


def step_fail(state: GlobalState, member: int, forced: bool = False) -> GlobalState:
    """Fail: the member deletes its state and ceases to respond.

    Unforced fails respect the operating assumption that no other member
    may be left without a live successor; ``forced`` exists solely to
    script flaw reproductions that violate it deliberately.
    """
    if not state.is_member(member):
        raise UnknownMemberError(f"identifier {member} is not a member")
    if not forced and _fail_strands_someone(state, member):
        raise FailUnsafeError(
            f"fail of {member} would leave another member with no live successor"
        )
    return state.without_member(member)


def step_stabilize_from_successor(state: GlobalState, member: int) -> GlobalState:
    """First step of a stabilize operation.

    Dead head: drop it, pad the tail with one past the last real entry,
    and stay due for another stabilize (the operation is not complete, so
    no notification is sent). Live head: adopt its list (all but the last
    entry) behind it, then test its predecessor; a strictly better
    candidate is captured for the follow-up step, otherwise the operation
    completes and the successor is notified.
    """
    node = state.node(member)
    if state.pending_stabilize_for(member) is not None:
        raise StabilizeInProgressError(
            f"member {member} has a stabilize in flight and cannot start another"
        )
    head = node.succ_list[0]
    head_node = state.get(head)
    if head_node is None:
        padded = node.succ_list[1:] + (state.space.next_ident(node.succ_list[-1]),)
        return state.with_node(node._replace(succ_list=padded))
    new_list = (head,) + head_node.succ_list[:-1]
    new_state = state.with_node(node._replace(succ_list=new_list))
    candidate = head_node.prdc
    if state.space.between(member, candidate, head):
        return new_state.with_pending_stabilize(member, candidate)
    return new_state.with_notify(head, member)


def step_stabilize_from_predecessor(state: GlobalState, member: int) -> GlobalState:
    """Second step of a stabilize operation: adopt the captured candidate
    if it is live, then notify the (possibly new) successor either way."""
    candidate = state.pending_stabilize_for(member)
    if candidate is None:
        raise NoPendingStabilizeError(f"member {member} has no stabilize in flight")
    node = state.node(member)
    new_state = state.without_pending_stabilize(member)
    cand_node = state.get(candidate)
    if cand_node is not None:
        node = node._replace(succ_list=(candidate,) + cand_node.succ_list[:-1])
        new_state = new_state.with_node(node)
    return new_state.with_notify(node.succ_list[0], member)


def step_rectify(state: GlobalState, member: int, new_prdc: int) -> GlobalState:
    """Deliver a notification: the member adopts the notifier as its
    predecessor if the notifier is closer in identifier order, or if the
    current predecessor is dead. The closer-notifier branch presumes the
    notifier live, so a stale notification can install a dead predecessor.
    Notifications to dead members are dropped without effect."""
    if (member, new_prdc) not in state.pending_notify:
        raise NoPendingNotifyError(f"no pending notification ({member}, {new_prdc})")
    new_state = state.without_notify(member, new_prdc)
    node = new_state.get(member)
    if node is None:
        return new_state  # target died; the notification is silently dropped
    if new_state.space.between(node.prdc, new_prdc, member):
        return new_state.with_node(node._replace(prdc=new_prdc))
    if not new_state.is_member(node.prdc):
        return new_state.with_node(node._replace(prdc=new_prdc))
    return new_state


def apply_step(state: GlobalState, step: Step) -> GlobalState:
    """Dispatch one atomic step."""
    if step.kind == StepKind.JOIN:
        return step_join(state, step.actor, step.arg)
    if step.kind == StepKind.FAIL:
        return step_fail(state, step.actor, step.forced)
    if step.kind == StepKind.STABILIZE_FROM_SUCCESSOR:
        return step_stabilize_from_successor(state, step.actor)
    if step.kind == StepKind.STABILIZE_FROM_PREDECESSOR:
        expected = state.pending_stabilize_for(step.actor)
        if step.arg is not None and expected is not None and step.arg != expected:
            raise NoPendingStabilizeError(
                f"member {step.actor} captured {expected}, not {step.arg}"
            )
        return step_stabilize_from_predecessor(state, step.actor)
    if step.kind == StepKind.RECTIFY:
        return step_rectify(state, step.actor, step.arg)
    raise ValueError(f"unknown step kind {step.kind!r}")


def safely_failable(state: GlobalState, member: int, pre_principals: frozenset[int] | None = None) -> bool:
    """Whether an unforced fail of ``member`` respects both operating
    assumptions: nobody is stranded without a live successor, and at least
    r + 1 principal members remain afterwards."""
    if _fail_strands_someone(state, member):
        return False
    required = state.r + 1
    if pre_principals is not None and len(pre_principals - {member}) >= required:
        # removing an ESL never makes another node skipped, so surviving
        # principals stay principal; no recount needed
        return True
    return len(principals(state.without_member(member))) >= required


def enabled_steps(
    state: GlobalState,
    churn: str = "full",
    join_candidate_cap: int | None = None,
) -> list[Step]:
    """Every step whose preconditions hold, in canonical order.

    Join candidates are drawn from the non-member identifiers, lowest
    first, up to ``join_candidate_cap`` (None means all). Unforced fails
    are offered only for safely-failable members. The list is
    deterministic for a given state and configuration.
    """
    if churn not in CHURN_POLICIES:
        raise ValueError(f"unknown churn policy {churn!r}")
    steps: list[Step] = []

    if churn in ("joins_only", "full") and state.live_count:
        count = 0
        member_set = state._by_ident
        for ident in state.space.idents():
            if ident in member_set:
                continue
            if join_candidate_cap is not None and count >= join_candidate_cap:
                break
            count += 1
            try:
                target = lookup_predecessor(state, ident)
            except NoCandidateError:
                continue
            steps.append(Step(StepKind.JOIN, ident, target))

    if churn in ("fails_only", "full"):
        pre = principals(state)
        for node in state.members:
            if safely_failable(state, node.ident, pre):
                steps.append(Step(StepKind.FAIL, node.ident))

    blocked = {member for member, _ in state.pending_stabilize}
    for node in state.members:
        if node.ident not in blocked:
            steps.append(Step(StepKind.STABILIZE_FROM_SUCCESSOR, node.ident))
    for member, candidate in state.pending_stabilize:
        if state.is_member(member):
            steps.append(Step(StepKind.STABILIZE_FROM_PREDECESSOR, member, candidate))
    for target, new_prdc in state.pending_notify:
        if state.is_member(target):
            steps.append(Step(StepKind.RECTIFY, target, new_prdc))

    steps.sort(key=Step.sort_key)
    return steps
