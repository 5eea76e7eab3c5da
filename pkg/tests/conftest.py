"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import pytest
from hypothesis import strategies as st

from ifslab.instances import (
    discrete_topology,
    parity_ground,
    parity_lab,
    parity_system,
    parity_topology,
    solo_a_system,
)
from ifslab.maps import ConstRule, IdentityRule, PiecewiseMap
from ifslab.setalg import Atom, BlockElem, BlockPart, SymbolicSet

G = parity_ground()

# Index literals stay at or below half the truncation window, so the
# bitmask oracle at n=64 is exact for everything the strategies produce.
MAX_LITERAL = 32


@pytest.fixture(scope="session")
def ground():
    return G


@pytest.fixture(scope="session")
def topo():
    return parity_topology(G)


@pytest.fixture(scope="session")
def discrete():
    return discrete_topology(G)


@pytest.fixture(scope="session")
def lab():
    return parity_lab()


@pytest.fixture(scope="session")
def system():
    return parity_system(G)


@pytest.fixture(scope="session")
def solo():
    return solo_a_system(G)


# --- strategies ---


def atom_points(ground=G):
    return st.builds(Atom, st.sampled_from(list(ground.atoms)))


def block_points(ground=G, max_index=MAX_LITERAL):
    return st.builds(
        BlockElem, st.sampled_from(list(ground.blocks)), st.integers(1, max_index)
    )


def points(ground=G, max_index=MAX_LITERAL):
    return st.one_of(atom_points(ground), block_points(ground, max_index))


def block_parts(max_index=MAX_LITERAL, max_size=4):
    return st.builds(
        BlockPart,
        st.booleans(),
        st.frozensets(st.integers(1, max_index), max_size=max_size),
    )


def symbolic_sets(ground=G, max_index=MAX_LITERAL, max_size=4):
    return st.builds(
        SymbolicSet,
        st.just(ground),
        st.frozensets(st.sampled_from(list(ground.atoms))),
        st.tuples(*[block_parts(max_index, max_size) for _ in ground.blocks]),
    )


def block_rules(ground=G, max_index=8):
    return st.one_of(
        st.builds(ConstRule, points(ground, max_index)),
        st.builds(IdentityRule, st.sampled_from(list(ground.blocks))),
    )


def piecewise_maps(ground=G, max_index=8):
    def assemble(atom_targets, rules, overrides):
        return PiecewiseMap.build(
            ground,
            dict(zip(ground.atoms, atom_targets)),
            dict(zip(ground.blocks, rules)),
            overrides,
        )

    return st.builds(
        assemble,
        st.tuples(*[points(ground, max_index) for _ in ground.atoms]),
        st.tuples(*[block_rules(ground, max_index) for _ in ground.blocks]),
        st.dictionaries(
            st.tuples(st.sampled_from(list(ground.blocks)), st.integers(1, max_index)),
            points(ground, max_index),
            max_size=3,
        ),
    )
