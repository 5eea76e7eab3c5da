"""Independent cross-checks of the set algebra and the piecewise maps.

Two oracles, both deliberately dumb: the truncation oracle replays set
operations on bitmask snapshots of the first N indices of every block
(with a separate tail flag per block), and the pointwise oracle replays
maps one point at a time straight off the rule table.  Truncation is
exact as long as N exceeds every index literal in the operands, which the
fuzz generators guarantee by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterable

from .bounds import DEFAULT_SEED
from .errors import ValidationError
from .maps import ConstRule, PiecewiseMap
from .setalg import (
    Atom,
    BlockElem,
    GroundStructure,
    Point,
    SymbolicSet,
    random_set,
    truncate,
)

__all__ = [
    "FuzzOutcome",
    "fuzz_set_algebra",
    "naive_apply",
    "check_map_pointwise",
]


@dataclass(frozen=True)
class FuzzOutcome:
    checked: int
    mismatches: int
    first_mismatch: str | None = None

    @property
    def clean(self) -> bool:
        return self.mismatches == 0


_OPS = ("union", "inter", "minus", "complement")


def fuzz_set_algebra(
    ground: GroundStructure,
    n_triples: int = 10_000,
    trunc_n: int = 64,
    seed: int = DEFAULT_SEED,
    max_literal: int = 16,
) -> FuzzOutcome:
    """Compare symbolic operations against the truncation oracle.

    Each trial draws two random sets and one operation, then checks that
    truncating the symbolic result equals applying the operation to the
    truncations.
    """
    if trunc_n <= max_literal:
        raise ValidationError(
            "the truncation size must exceed every index literal the "
            "generator can produce"
        )
    rng = Random(seed)
    mismatches = 0
    first: str | None = None
    for trial in range(n_triples):
        a = random_set(rng, ground, max_index=max_literal)
        b = random_set(rng, ground, max_index=max_literal)
        op = _OPS[rng.randrange(len(_OPS))]
        if op == "union":
            symbolic, expected = a.union(b), truncate(a, trunc_n).union(
                truncate(b, trunc_n)
            )
        elif op == "inter":
            symbolic, expected = a.intersect(b), truncate(a, trunc_n).intersect(
                truncate(b, trunc_n)
            )
        elif op == "minus":
            symbolic, expected = a.difference(b), truncate(a, trunc_n).difference(
                truncate(b, trunc_n)
            )
        else:
            symbolic, expected = a.complement(), truncate(a, trunc_n).complement()
        if truncate(symbolic, trunc_n) != expected:
            mismatches += 1
            if first is None:
                first = f"trial {trial}: {op} on {a!r} and {b!r}"
    return FuzzOutcome(n_triples, mismatches, first)


def naive_apply(m: PiecewiseMap, p: Point) -> Point:
    """Read the rule table directly, without the map's own fast path."""
    if isinstance(p, Atom):
        return m.atom_targets[m.ground.atom_pos[p.name]]
    for block, index, target in m.overrides:
        if block == p.block and index == p.index:
            return target
    rule = m.block_rules[m.ground.block_pos[p.block]]
    if isinstance(rule, ConstRule):
        return rule.target
    return BlockElem(rule.dst, p.index)


def _points_upto(ground: GroundStructure, n: int) -> list[Point]:
    pts: list[Point] = [Atom(name) for name in ground.atoms]
    pts.extend(
        BlockElem(name, i) for name in ground.blocks for i in range(1, n + 1)
    )
    return pts


def _member_points(a: SymbolicSet, limit: int) -> list[Point]:
    """All points of a with index at most limit, plus all finite literals."""
    pts: list[Point] = [Atom(name) for name in a.ground.atoms if name in a.atoms_in]
    for bi, name in enumerate(a.ground.blocks):
        cofinite, indices = a.parts[bi]
        if cofinite:
            pts.extend(
                BlockElem(name, i) for i in range(1, limit + 1) if i not in indices
            )
        else:
            pts.extend(BlockElem(name, i) for i in sorted(indices))
    return pts


def check_map_pointwise(
    m: PiecewiseMap, sets: Iterable[SymbolicSet], trunc_n: int = 64
) -> FuzzOutcome:
    """Replay apply, image membership and preimage membership pointwise.

    Sources with index beyond the probe range can only land inside it
    through an override, so extending the source range past the largest
    override key makes the expected image complete on probed points.
    """
    ground = m.ground
    probes = _points_upto(ground, trunc_n)
    source_limit = max([trunc_n, *(i for _, i, _ in m.overrides)])
    checked = 0
    mismatches = 0
    first: str | None = None

    def record(kind: str, note: str) -> None:
        nonlocal mismatches, first
        mismatches += 1
        if first is None:
            first = f"{kind}: {note}"

    for p in probes:
        checked += 1
        if m.apply(p) != naive_apply(m, p):
            record("apply", f"{p!r}")
    for a in sets:
        image = m.image(a)
        preimage = m.preimage(a)
        expected = {naive_apply(m, p) for p in _member_points(a, source_limit)}
        for p in probes:
            checked += 2
            if preimage.contains(p) != (naive_apply(m, p) in a):
                record("preimage", f"{p!r} against {a!r}")
            if image.contains(p) != (p in expected):
                record("image", f"{p!r} against {a!r}")
    return FuzzOutcome(checked, mismatches, first)
