"""Set algebra against the independent bitmask truncation oracle.

Every algebraic operation is cross-checked by truncating to a finite
window and recomputing on explicit bitmasks; the window (64) exceeds
every index literal the strategies can produce (32), so agreement on the
window plus tail flags is agreement outright.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifslab.errors import GroundMismatchError, ValidationError
from ifslab.setalg import (
    Atom,
    BlockElem,
    GroundStructure,
    INFINITE,
    enumerate_sets,
    point_sort_key,
    random_set,
    set_sort_key,
    truncate,
)

from conftest import G, MAX_LITERAL, points, symbolic_sets

N = 2 * MAX_LITERAL


def popcount_card(t):
    if any(t.tails):
        return INFINITE
    return bin(t.atom_mask).count("1") + sum(bin(m).count("1") for m in t.block_masks)


def window_points(ground, n):
    for name in ground.atoms:
        yield Atom(name)
    for name in ground.blocks:
        for i in range(1, n + 1):
            yield BlockElem(name, i)


# --- operations commute with truncation ---


@given(symbolic_sets(), symbolic_sets())
def test_union_matches_oracle(a, b):
    assert truncate(a.union(b), N) == truncate(a, N).union(truncate(b, N))


@given(symbolic_sets(), symbolic_sets())
def test_intersection_matches_oracle(a, b):
    assert truncate(a.intersect(b), N) == truncate(a, N).intersect(truncate(b, N))


@given(symbolic_sets(), symbolic_sets())
def test_difference_matches_oracle(a, b):
    assert truncate(a.difference(b), N) == truncate(a, N).difference(truncate(b, N))


@given(symbolic_sets())
def test_complement_matches_oracle(a):
    assert truncate(a.complement(), N) == truncate(a, N).complement()


@given(symbolic_sets(), points(max_index=N))
def test_membership_matches_oracle(a, p):
    assert a.contains(p) == truncate(a, N).contains(p)
    assert (p in a) == a.contains(p)


# --- canonicity: equal truncations on an exact window mean equal values ---


@given(symbolic_sets(), symbolic_sets())
def test_canonical_form_equality(a, b):
    assert (a == b) == (truncate(a, N) == truncate(b, N))


# --- cardinality-flavored queries against the oracle ---


@given(symbolic_sets())
def test_cardinality_queries_match_oracle(a):
    t = truncate(a, N)
    card = popcount_card(t)
    assert a.cardinality() == card
    assert a.is_empty() == (card == 0)
    assert a.is_singleton() == (card == 1)
    assert a.is_finite() == (card != INFINITE)


@given(symbolic_sets(), symbolic_sets())
def test_relations_match_oracle(a, b):
    ta, tb = truncate(a, N), truncate(b, N)
    assert a.is_subset(b) == (popcount_card(ta.difference(tb)) == 0)
    assert a.meets(b) == (popcount_card(ta.intersect(tb)) != 0)
    assert a.diff_is_finite(b) == (not any(ta.difference(tb).tails))
    assert a.intersection_is_finite(b) == (not any(ta.intersect(tb).tails))


# --- algebra laws (already implied by the oracle tests; kept as direct checks) ---


@given(symbolic_sets(), symbolic_sets())
def test_de_morgan_and_difference_laws(a, b):
    assert a.union(b).complement() == a.complement().intersect(b.complement())
    assert a.complement().complement() == a
    assert a.difference(b) == a.intersect(b.complement())
    assert (a | b) == a.union(b) and (a & b) == a.intersect(b)
    assert (a - b) == a.difference(b) and ~a == a.complement()


# --- ordered access ---


@given(symbolic_sets(), st.integers(0, 6))
def test_first_points(a, k):
    got = a.first_points(k)
    expected = sorted(
        (p for p in window_points(a.ground, N) if a.contains(p)),
        key=lambda p: point_sort_key(a.ground, p),
    )[:k]
    assert list(got) == expected
    first = a.first_point()
    assert first == (expected[0] if expected else None) or k == 0


@given(symbolic_sets())
def test_iter_points_finite_only(a):
    if a.is_finite():
        pts = list(a.iter_points())
        assert pts == list(a.first_points(len(pts) + 1))
        assert len(pts) == a.cardinality()
    else:
        with pytest.raises(ValidationError):
            list(a.iter_points())


# --- enumeration and sampling ---


def test_enumerate_sets_is_exhaustive_and_canonical(ground):
    max_index, max_exceptions = 3, 2
    out = list(enumerate_sets(ground, max_index, max_exceptions))
    per_part = 2 * sum(math.comb(max_index, s) for s in range(max_exceptions + 1))
    expected = 2 ** len(ground.atoms) * per_part ** len(ground.blocks)
    assert len(out) == expected
    assert len(set(out)) == expected
    for s in out:
        for cof, idx in s.parts:
            assert len(idx) <= max_exceptions
            assert all(1 <= i <= max_index for i in idx)
    assert out == list(enumerate_sets(ground, max_index, max_exceptions))


def test_enumeration_count_at_default_bounds(ground):
    out = list(enumerate_sets(ground, 8, 3))
    per_part = 2 * sum(math.comb(8, s) for s in range(4))
    assert len(out) == 2**2 * per_part**2 == 138384


def test_random_set_is_seeded_and_bounded(ground):
    import random

    a = random_set(random.Random(5), ground, max_index=9, max_size=3)
    b = random_set(random.Random(5), ground, max_index=9, max_size=3)
    assert a == b
    for cof, idx in a.parts:
        assert len(idx) <= 3 and all(1 <= i <= 9 for i in idx)


@given(st.lists(symbolic_sets(), max_size=12))
def test_set_sort_key_is_a_total_order_on_values(xs):
    ordered = sorted(xs, key=set_sort_key)
    assert sorted(ordered, key=set_sort_key) == ordered
    keys = [set_sort_key(s) for s in ordered]
    for s, t, ks, kt in zip(ordered, ordered[1:], keys, keys[1:]):
        assert (s == t) == (ks == kt)


# --- builders and validation ---


def test_builders_and_validation(ground):
    with pytest.raises(ValidationError):
        GroundStructure((), ())
    with pytest.raises(ValidationError):
        GroundStructure(("a", ""), ())
    with pytest.raises(ValidationError):
        GroundStructure(("a",), ("a",))
    with pytest.raises(ValidationError):
        ground.atom("nope")
    with pytest.raises(ValidationError):
        ground.elem("ODD", 0)
    with pytest.raises(ValidationError):
        ground.finite([Atom("nope")])
    with pytest.raises(ValidationError):
        ground.cofinite_block("nope", ())
    single = ground.singleton(Atom("a"))
    assert single.cardinality() == 1 and single.contains(Atom("a"))
    assert ground.block_all("EVEN").contains(BlockElem("EVEN", 10**9))
    assert not ground.block_all("EVEN").contains(BlockElem("ODD", 1))
    assert ground.whole().complement() == ground.empty()


def test_truncation_guards(ground):
    with pytest.raises(ValidationError):
        truncate(ground.whole(), 0)
    t64 = truncate(ground.whole(), 64)
    t32 = truncate(ground.whole(), 32)
    with pytest.raises(GroundMismatchError):
        t64.union(t32)


def test_ground_mismatch_is_rejected(ground):
    other = GroundStructure(("z",), ("B",))
    with pytest.raises(GroundMismatchError):
        ground.whole().union(other.whole())


@settings(max_examples=30)
@given(symbolic_sets())
def test_repr_is_stable(a):
    assert repr(a) == repr(a)
    assert repr(a).startswith("<set ")
