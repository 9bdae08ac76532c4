import random

import pytest
from hypothesis import strategies as st

from chordcheck import GlobalState, IdSpace, NodeState


@pytest.fixture
def space3():
    return IdSpace(3)


@pytest.fixture
def space6():
    return IdSpace(6)


def random_global_state(rng: random.Random, m: int = 4, r: int = 2,
                        min_members: int = 3, max_members: int = 8,
                        member_bias: float = 0.7) -> GlobalState:
    """A random snapshot whose list entries are biased toward live members,
    so states satisfying the invariant actually occur."""
    space = IdSpace(m)
    n = rng.randint(min_members, min(max_members, space.size))
    idents = rng.sample(range(space.size), n)

    def entry() -> int:
        if rng.random() < member_bias:
            return rng.choice(idents)
        return rng.randrange(space.size)

    nodes = tuple(
        NodeState(i, entry(), tuple(entry() for _ in range(r))) for i in idents
    )
    return GlobalState(space, r, nodes)


@st.composite
def global_states(draw, m: int = 3, r: int = 2, max_members: int = 5,
                  with_pending: bool = False):
    space = IdSpace(m)
    idents = draw(
        st.lists(st.integers(0, space.size - 1), min_size=1, max_size=max_members, unique=True)
    )
    members = frozenset(idents)
    anywhere = st.integers(0, space.size - 1)
    biased = st.one_of(st.sampled_from(sorted(members)), anywhere)
    nodes = tuple(
        NodeState(i, draw(biased), tuple(draw(biased) for _ in range(r)))
        for i in idents
    )
    pending_stabilize = ()
    pending_notify = ()
    if with_pending and len(idents) > 1:
        if draw(st.booleans()):
            # a continuation only ever holds a candidate the owner saw
            # strictly between itself and its head, and the owner's list
            # cannot change while the continuation is in flight
            owner = draw(st.sampled_from(nodes))
            head = owner.succ_list[0]
            candidates = [c for c in range(space.size)
                          if space.between(owner.ident, c, head)]
            if candidates:
                pending_stabilize = ((owner.ident, draw(st.sampled_from(candidates))),)
        if draw(st.booleans()):
            target = draw(st.sampled_from(idents))
            pending_notify = ((target, draw(anywhere)),)
    return GlobalState(space, r, nodes, pending_stabilize, pending_notify)
