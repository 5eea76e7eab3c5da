"""Topology decisions: axioms on samples, exact closures, separation."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

from ifslab.errors import ContractViolation, ValidationError
from ifslab.setalg import Atom, BlockElem
from ifslab.topology import (
    Avoids,
    CofiniteWithin,
    Meets,
    OpennessClause,
    SubsetOf,
    TopologySpec,
)

from conftest import G, points, symbolic_sets

SMALL = symbolic_sets(max_index=6, max_size=2)


# --- openness on the parity-style instance, decided by hand ---


def test_hand_checked_open_sets(ground, topo):
    odd = ground.block_all("ODD")
    even = ground.block_all("EVEN")
    naturals = odd.union(even)
    a = ground.singleton(Atom("a"))
    assert topo.is_open(ground.empty())
    assert topo.is_open(ground.whole())
    assert topo.is_open(odd)
    assert topo.is_open(odd.difference(ground.finite([BlockElem("ODD", 3)])))
    assert topo.is_open(naturals)
    assert topo.is_open(ground.whole().difference(a))
    assert not topo.is_open(even)
    assert not topo.is_open(a)
    assert not topo.is_open(even.union(ground.finite([Atom("a"), Atom("b")])))


def test_hand_checked_closures(ground, topo):
    odd = ground.block_all("ODD")
    even = ground.block_all("EVEN")
    atoms = ground.finite([Atom("a"), Atom("b")])
    assert topo.closure(ground.singleton(Atom("a"))) == ground.singleton(Atom("a"))
    assert topo.closure(even) == even.union(atoms)
    assert topo.closure(odd) == ground.whole()
    one = ground.singleton(BlockElem("EVEN", 1))
    assert topo.closure(one) == one
    assert topo.closure(ground.empty()) == ground.empty()


def test_hand_checked_interiors(ground, topo):
    even = ground.block_all("EVEN")
    odd = ground.block_all("ODD")
    atoms = ground.finite([Atom("a"), Atom("b")])
    assert topo.interior(even.union(atoms)) == ground.empty()
    assert topo.interior(odd.union(ground.singleton(Atom("a")))) == odd
    assert topo.interior(ground.whole()) == ground.whole()


@given(SMALL)
def test_finite_sets_are_closed_here(topo, a):
    if a.is_finite():
        assert topo.is_closed(a)


# --- Kuratowski closure laws on samples ---


@settings(max_examples=60, deadline=None)
@given(SMALL)
def test_closure_is_extensive_and_idempotent(topo, a):
    c = topo.closure(a)
    assert a.is_subset(c)
    assert topo.closure(c) == c
    assert topo.is_closed(c)


@settings(max_examples=40, deadline=None)
@given(SMALL, SMALL)
def test_closure_distributes_over_union(topo, a, b):
    assert topo.closure(a.union(b)) == topo.closure(a).union(topo.closure(b))


@settings(max_examples=60, deadline=None)
@given(SMALL)
def test_open_closed_equivalences(topo, a):
    assert topo.is_open(a) == (topo.interior(a) == a)
    assert topo.is_closed(a) == (topo.closure(a) == a)


@given(symbolic_sets())
def test_closedness_agrees_with_complement_openness(topo, discrete, a):
    for t in (topo, discrete):
        assert t.is_closed(a) == t.is_open(a.complement())


# --- separation ---


def test_t1_on_two_hundred_points(ground, topo):
    pts = [Atom("a"), Atom("b")]
    for i in range(1, 100):
        pts.append(BlockElem("ODD", i))
        pts.append(BlockElem("EVEN", i))
    assert len(pts) == 200
    assert topo.t1_sample(pts)


@settings(max_examples=60, deadline=None)
@given(points(max_index=12), SMALL)
def test_exists_open_avoiding_is_sound(topo, x, a):
    if a.contains(x):
        with pytest.raises(ContractViolation):
            topo.exists_open_avoiding(x, a)
        return
    u = topo.exists_open_avoiding(x, a)
    if u is not None:
        assert topo.is_open(u)
        assert u.contains(x)
        assert not u.meets(a)


def test_dense_set_defeats_separation(ground, topo):
    # Every nonempty open set meets the odd block, so nothing can be
    # separated from it.
    odd = ground.block_all("ODD")
    for p in (Atom("a"), Atom("b"), BlockElem("EVEN", 2)):
        assert topo.exists_open_avoiding(p, odd) is None


# --- covers ---


def test_cover_check(ground, topo):
    x = ground.whole()
    a = ground.singleton(Atom("a"))
    b = ground.singleton(Atom("b"))
    assert topo.cover_check((x,))
    assert topo.cover_check((x.difference(a), x.difference(b)))
    assert not topo.cover_check((x.difference(a),))  # misses the atom
    assert not topo.cover_check((a, x))  # member not open
    assert not topo.cover_check(())


# --- discrete control ---


@given(SMALL)
def test_discrete_control_makes_everything_clopen(discrete, a):
    assert discrete.is_open(a)
    assert discrete.is_closed(a)
    assert discrete.closure(a) == a
    assert discrete.interior(a) == a


# --- construction-time validation ---


def test_clause_validation(ground):
    from ifslab.setalg import GroundStructure

    with pytest.raises(ValidationError):
        Meets(ground.empty())
    with pytest.raises(ValidationError):
        OpennessClause(())
    g2 = GroundStructure(("z",), ("B",))
    with pytest.raises(ValidationError):
        TopologySpec(ground, (OpennessClause((SubsetOf(g2.whole()),)),))


def test_whole_space_must_satisfy_some_clause_or_warn(ground):
    odd = ground.block_all("ODD")
    with pytest.warns(UserWarning, match="whole space"):
        TopologySpec(ground, (OpennessClause((SubsetOf(odd),)),))


def test_primitive_holds_directly(ground):
    odd = ground.block_all("ODD")
    even = ground.block_all("EVEN")
    assert SubsetOf(odd).holds(odd)
    assert not SubsetOf(odd).holds(even)
    assert CofiniteWithin(odd).holds(odd.difference(ground.finite([BlockElem("ODD", 1)])))
    assert not CofiniteWithin(odd).holds(even)
    assert Meets(odd).holds(ground.whole())
    assert Avoids(odd).holds(even)
    assert not Avoids(odd).holds(ground.whole())
