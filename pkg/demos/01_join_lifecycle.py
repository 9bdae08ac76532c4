#!/usr/bin/env python3
"""A node joins a ring and is stitched in, one atomic step at a time.

The ring starts ideal over {7, 19, 34, 50} (m=6, r=2). Node 10 joins
between 7 and 19, and the walkthrough shows how stabilize and rectify
steps move the pointers until 10 is fully incorporated.
"""

from chordcheck import (
    IdSpace,
    Schedule,
    converge,
    ideal_ring,
    is_ideal,
    lookup_predecessor,
    step_join,
    step_rectify,
    step_stabilize_from_predecessor,
    step_stabilize_from_successor,
)


def show(state, label):
    print(f"\n--- {label}")
    for node in state.members:
        print(f"  node {node.ident:>2}: successors {list(node.succ_list)}, predecessor {node.prdc}")
    if state.pending_stabilize:
        print(f"  captured successor candidates: {dict(state.pending_stabilize)}")
    if state.pending_notify:
        print(f"  notifications in flight: {list(state.pending_notify)}")


space = IdSpace(6)
state = ideal_ring(space, 2, [7, 19, 34, 50])
show(state, "ideal ring over {7, 19, 34, 50}")

target = lookup_predecessor(state, 10)
print(f"\nlookup: the member covering 10 is {target}")

state = step_join(state, 10, target)
show(state, "stage 1: 10 joined, copying 7's successor list")
print("  note: 10 points into the ring, but nobody points at 10 yet")

state = step_stabilize_from_successor(state, 10)
show(state, "stage 2: 10 stabilizes")
print("  19's predecessor (7) is no better successor for 10, so 10 keeps 19")
print("  and notifies 19 of its presence")

state = step_rectify(state, 19, 10)
show(state, "stage 3: 19 rectifies, adopting 10 as its predecessor")

state = step_stabilize_from_successor(state, 7)
show(state, "stage 4a: 7 stabilizes and captures 19's predecessor 10")
print("  10 sits between 7 and 19, so a follow-up step is due")

state = step_stabilize_from_predecessor(state, 7)
show(state, "stage 4b: 7 adopts 10 as its successor and notifies it")

state = step_rectify(state, 10, 7)
show(state, "stage 5: 10 rectifies; its predecessor is (still) 7")

print("\nthe section around 10 is fully repaired; list tails elsewhere still")
print(f"reference the pre-join layout, so ideal={is_ideal(state)} for the moment")

trace = converge(state, Schedule(seed=1))
show(trace.final_state(), f"after {trace.meta['steps_to_ideal']} more fair rounds")
print(f"\nideal={is_ideal(trace.final_state())}: every pointer is now globally correct")
