"""Total piecewise self-maps of a ground space.

A map is described by one rule per atom, one base rule per block
(either collapse to a constant point, or carry indices unchanged into a
destination block), and finitely many per-index overrides.  This class of
maps is closed under composition, and images and preimages of symbolic
sets stay inside the finite/cofinite representation, so all of them are
computed exactly.

Index-transforming rules other than identity (shifts, doubling) are
deliberately out of scope; the identity-plus-overrides class is what keeps
composition closed with a short argument.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Union

from .bounds import DEFAULT_SEED, Bounds
from .errors import GroundMismatchError, IntegrityError, ValidationError
from .setalg import (
    Atom,
    BlockElem,
    BlockPart,
    GroundStructure,
    Point,
    SymbolicSet,
    enumerate_sets,
    random_set,
)
from .topology import TopologySpec

__all__ = [
    "ConstRule",
    "IdentityRule",
    "BlockRule",
    "PiecewiseMap",
    "identity_map",
    "SpaceChain",
    "ClosedMapVerified",
    "ClosedMapCounterexample",
    "ClosedMapVerdict",
    "ContractionCertified",
    "ContractionRefuted",
    "ContractionInconclusive",
    "ContractionVerdict",
    "is_topological_contraction",
]


@dataclass(frozen=True)
class ConstRule:
    """Send every element of the block to one fixed point."""

    target: Point


@dataclass(frozen=True)
class IdentityRule:
    """Send element i of the block to element i of the destination block."""

    dst: str


BlockRule = Union[ConstRule, IdentityRule]


@dataclass(frozen=True)
class PiecewiseMap:
    """A total self-map given by atom rules, block base rules and overrides.

    Fields are parallel to ``ground.atoms`` / ``ground.blocks``; overrides
    are (block, index, target) triples with distinct keys, sorted.  Use
    :meth:`build` for validated construction by name.
    """

    ground: GroundStructure
    atom_targets: tuple[Point, ...]
    block_rules: tuple[BlockRule, ...]
    overrides: tuple[tuple[str, int, Point], ...] = ()

    @classmethod
    def build(
        cls,
        ground: GroundStructure,
        atoms: dict[str, Point],
        blocks: dict[str, BlockRule],
        overrides: dict[tuple[str, int], Point] | None = None,
    ) -> PiecewiseMap:
        if set(atoms) != set(ground.atoms):
            raise ValidationError(
                f"atom rules must cover exactly {list(ground.atoms)}, got {sorted(atoms)}"
            )
        if set(blocks) != set(ground.blocks):
            raise ValidationError(
                f"block rules must cover exactly {list(ground.blocks)}, got {sorted(blocks)}"
            )
        for rule in blocks.values():
            if isinstance(rule, IdentityRule) and rule.dst not in ground.block_pos:
                raise ValidationError(f"unknown destination block {rule.dst!r}")
        targets = list(atoms.values()) + [
            r.target for r in blocks.values() if isinstance(r, ConstRule)
        ]
        ovr = overrides or {}
        for (bl, i), t in ovr.items():
            if bl not in ground.block_pos:
                raise ValidationError(f"override on unknown block {bl!r}")
            if i < 1:
                raise ValidationError("override index must be >= 1")
            targets.append(t)
        for t in targets:
            _check_point(ground, t)
        # Overrides that restate the base rule are dropped, so maps built
        # here are equal exactly when they are the same function.
        pruned = []
        for (bl, i), t in ovr.items():
            base = blocks[bl]
            default = base.target if isinstance(base, ConstRule) else BlockElem(base.dst, i)
            if t != default:
                pruned.append((bl, i, t))
        return cls(
            ground,
            tuple(atoms[a] for a in ground.atoms),
            tuple(blocks[b] for b in ground.blocks),
            tuple(sorted(pruned)),
        )

    @cached_property
    def _override_map(self) -> dict[tuple[str, int], Point]:
        return {(bl, i): t for bl, i, t in self.overrides}

    @cached_property
    def _block_overrides(self) -> dict[str, dict[int, Point]]:
        out: dict[str, dict[int, Point]] = {b: {} for b in self.ground.blocks}
        for bl, i, t in self.overrides:
            out[bl][i] = t
        return out

    @cached_property
    def _atom_image(self) -> dict[str, Point]:
        return dict(zip(self.ground.atoms, self.atom_targets))

    # --- pointwise application ---

    def apply(self, p: Point) -> Point:
        if isinstance(p, Atom):
            return self.atom_targets[self.ground.atom_pos[p.name]]
        t = self._override_map.get((p.block, p.index))
        if t is not None:
            return t
        rule = self.block_rules[self.ground.block_pos[p.block]]
        if isinstance(rule, ConstRule):
            return rule.target
        return BlockElem(rule.dst, p.index)

    __call__ = apply

    # --- exact images and preimages ---

    def image(self, a: SymbolicSet) -> SymbolicSet:
        self._check_ground(a)
        g = self.ground
        block_pos = g.block_pos
        atoms_out: set[str] = set()
        finite_out: list[set[int]] = [set() for _ in g.blocks]
        cofinite_excl: list[frozenset[int] | None] = [None] * len(g.blocks)

        def add(p: Point) -> None:
            if type(p) is Atom:
                atoms_out.add(p.name)
            else:
                finite_out[block_pos[p.block]].add(p.index)

        if a.atoms_in:
            atom_img = self._atom_image
            for name in a.atoms_in:
                add(atom_img[name])
        for bi, (cof, idx) in enumerate(a.parts):
            ovr = self._block_overrides[g.blocks[bi]]
            rule = self.block_rules[bi]
            if not cof:
                if not idx:
                    continue
                if not ovr:
                    # No overrides: a const rule sends every literal to one
                    # point, an identity rule carries the index set wholesale.
                    if isinstance(rule, ConstRule):
                        add(rule.target)
                    else:
                        finite_out[block_pos[rule.dst]] |= idx
                    continue
                for i in idx:
                    t = ovr.get(i)
                    if t is not None:
                        add(t)
                    elif isinstance(rule, ConstRule):
                        add(rule.target)
                    else:
                        finite_out[block_pos[rule.dst]].add(i)
                continue
            # Cofinite source part: overridden members individually, plus
            # the (still infinite) non-overridden remainder via the base rule.
            if ovr:
                for i, t in ovr.items():
                    if i not in idx:
                        add(t)
            if isinstance(rule, ConstRule):
                add(rule.target)
            else:
                di = block_pos[rule.dst]
                excl = idx | frozenset(ovr) if ovr else idx
                prev = cofinite_excl[di]
                cofinite_excl[di] = excl if prev is None else prev & excl
        parts = []
        for bi in range(len(g.blocks)):
            excl = cofinite_excl[bi]
            if excl is None:
                parts.append(BlockPart(False, frozenset(finite_out[bi])))
            else:
                parts.append(BlockPart(True, frozenset(excl - finite_out[bi])))
        return SymbolicSet(g, frozenset(atoms_out), tuple(parts))

    def preimage(self, a: SymbolicSet) -> SymbolicSet:
        self._check_ground(a)
        g = self.ground
        atoms_in = frozenset(
            name for name in g.atoms if a.contains(self.apply(Atom(name)))
        )
        parts = []
        for bi, bl in enumerate(g.blocks):
            rule = self.block_rules[bi]
            ovr = self._block_overrides[bl]
            # Membership of index i only deviates from the tail behavior at
            # overridden indices and, for identity rules, at indices
            # mentioned by a's destination part.
            if isinstance(rule, ConstRule):
                exceptional = frozenset(ovr)
                tail = a.contains(rule.target)
            else:
                dcof, didx = a.parts[g.block_pos[rule.dst]]
                exceptional = frozenset(ovr) | didx
                tail = dcof
            members = frozenset(
                i for i in exceptional if a.contains(self.apply(BlockElem(bl, i)))
            )
            if tail:
                parts.append(BlockPart(True, exceptional - members))
            else:
                parts.append(BlockPart(False, members))
        return SymbolicSet(g, atoms_in, tuple(parts))

    # --- composition ---

    def compose(self, inner: PiecewiseMap) -> PiecewiseMap:
        """The map sending p to self(inner(p))."""
        if self.ground != inner.ground:
            raise GroundMismatchError("cannot compose maps over different grounds")
        g = self.ground
        atom_targets = tuple(
            self.apply(inner.apply(Atom(name))) for name in g.atoms
        )
        block_rules: list[BlockRule] = []
        overrides: dict[tuple[str, int], Point] = {}
        for bi, bl in enumerate(g.blocks):
            irule = inner.block_rules[bi]
            if isinstance(irule, ConstRule):
                base: BlockRule = ConstRule(self.apply(irule.target))
            else:
                orule = self.block_rules[g.block_pos[irule.dst]]
                if isinstance(orule, ConstRule):
                    base = ConstRule(orule.target)
                else:
                    base = IdentityRule(orule.dst)
                for i, t in self._block_overrides[irule.dst].items():
                    overrides[(bl, i)] = t
            block_rules.append(base)
        for bl, i, t in inner.overrides:
            overrides[(bl, i)] = self.apply(t)
        # Drop overrides that coincide with the composite base rule.
        pruned = {}
        for (bl, i), t in overrides.items():
            base = block_rules[g.block_pos[bl]]
            default = base.target if isinstance(base, ConstRule) else BlockElem(base.dst, i)
            if t != default:
                pruned[(bl, i)] = t
        return PiecewiseMap(
            g,
            atom_targets,
            tuple(block_rules),
            tuple(sorted((bl, i, t) for (bl, i), t in pruned.items())),
        )

    def _check_ground(self, a: SymbolicSet) -> None:
        if a.ground != self.ground:
            raise GroundMismatchError("set belongs to a different ground structure")


def _check_point(ground: GroundStructure, p: Point) -> None:
    if isinstance(p, Atom):
        if p.name not in ground.atom_set:
            raise ValidationError(f"unknown atom {p.name!r} in map target")
    else:
        if p.block not in ground.block_pos:
            raise ValidationError(f"unknown block {p.block!r} in map target")
        if p.index < 1:
            raise ValidationError("map target index must be >= 1")


def identity_map(ground: GroundStructure) -> PiecewiseMap:
    return PiecewiseMap(
        ground,
        tuple(Atom(a) for a in ground.atoms),
        tuple(IdentityRule(b) for b in ground.blocks),
    )


# ---------------------------------------------------------------------------
# Iterated images of the whole space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceChain:
    """The decreasing chain of iterated images of the whole space."""

    entries: tuple[SymbolicSet, ...]
    stabilized: bool

    @property
    def stable_set(self) -> SymbolicSet | None:
        return self.entries[-1] if self.stabilized else None

    @property
    def stable_at(self) -> int | None:
        """First iteration count at which the stable value is attained."""
        return len(self.entries) - 1 if self.stabilized else None


def space_chain(m: PiecewiseMap, n_max: int = 64) -> SpaceChain:
    """Iterate the image of the whole space until it repeats or n_max is hit."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    prev = m.ground.whole()
    entries: list[SymbolicSet] = []
    for _ in range(n_max):
        cur = m.image(prev)
        if not cur.is_subset(prev):
            raise IntegrityError("iterated space images failed to decrease")
        entries.append(cur)
        if cur == prev:
            return SpaceChain(tuple(entries), True)
        prev = cur
    return SpaceChain(tuple(entries), False)


# ---------------------------------------------------------------------------
# Bounded closed-map verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedMapVerified:
    """No closed set within the bounds had a non-closed image."""

    bounds: Bounds
    checked: int


@dataclass(frozen=True)
class ClosedMapCounterexample:
    witness: SymbolicSet
    image: SymbolicSet


ClosedMapVerdict = Union[ClosedMapVerified, ClosedMapCounterexample]


@lru_cache(maxsize=8)
def _closed_grammar_sets(
    topology: TopologySpec, max_index: int, max_exceptions: int
) -> tuple[SymbolicSet, ...]:
    # The grammar sweep is the dominant cost of every bounded check, and
    # several checks over one topology share it, so the filtered list is
    # memoized.  All types involved are immutable.
    return tuple(
        a
        for a in enumerate_sets(topology.ground, max_index, max_exceptions)
        if topology.is_closed(a)
    )


def closed_sets_within(
    topology: TopologySpec, bounds: Bounds, rng: random.Random | None = None
):
    """Closed sets from the shape grammar, then sampled random closed sets.

    The exhaustive phase runs in canonical enumeration order, so the first
    counterexample any caller reports is deterministic; the sampled phase
    is deterministic given the rng seed.
    """
    yield from _closed_grammar_sets(topology, bounds.max_index, bounds.max_exceptions)
    if rng is not None:
        for _ in range(bounds.samples):
            a = random_set(
                rng,
                topology.ground,
                max_index=max(16, 2 * bounds.max_index),
                max_size=bounds.max_exceptions + 2,
            )
            if topology.is_closed(a):
                yield a


@lru_cache(maxsize=32)
def _closed_map_cached(
    m: PiecewiseMap, topology: TopologySpec, bounds: Bounds, seed: int
) -> ClosedMapVerdict:
    rng = random.Random(seed)
    checked = 0
    for a in closed_sets_within(topology, bounds, rng):
        checked += 1
        img = m.image(a)
        if not topology.is_closed(img):
            return ClosedMapCounterexample(a, img)
    return ClosedMapVerified(bounds, checked)


def is_closed_map_bounded(
    m: PiecewiseMap,
    topology: TopologySpec,
    bounds: Bounds = Bounds(),
    seed: int = DEFAULT_SEED,
) -> ClosedMapVerdict:
    """Check that images of closed sets are closed, up to the given bounds.

    The universal statement ranges over infinitely many closed sets, so
    a Verified verdict only ever means verified-up-to-bound; the bounds
    travel with the verdict.  Results are memoized on the full argument
    tuple; everything involved is immutable and the check is deterministic.
    """
    return _closed_map_cached(m, topology, bounds, seed)


# ---------------------------------------------------------------------------
# Topological contraction test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContractionCertified:
    """Closed up to bounds, and iterated space images collapse to one point."""

    stable_set: SymbolicSet
    stable_at: int
    closedness: ClosedMapVerified


@dataclass(frozen=True)
class ContractionRefuted:
    """Either two points survive every iterate, or closedness fails outright.

    When the space chain stabilizes at a set with two distinct points x, y,
    every iterated image of the space contains both (the chain decreases to
    its stable value, then stays there), so no iterate excludes either
    point and the separation property fails; `pair` carries (x, y).
    Otherwise `closedness` carries a closed set with a non-closed image.
    """

    pair: tuple[Point, Point] | None = None
    stable_set: SymbolicSet | None = None
    closedness: ClosedMapCounterexample | None = None


@dataclass(frozen=True)
class ContractionInconclusive:
    reason: str
    reached: int


ContractionVerdict = Union[
    ContractionCertified, ContractionRefuted, ContractionInconclusive
]


def is_topological_contraction(
    m: PiecewiseMap,
    topology: TopologySpec,
    n_max: int = 64,
    bounds: Bounds = Bounds(),
    seed: int = DEFAULT_SEED,
) -> ContractionVerdict:
    chain = space_chain(m, n_max)
    if chain.stabilized:
        stable = chain.stable_set
        assert stable is not None
        if stable.cardinality() > 1:
            pts = stable.first_points(2)
            return ContractionRefuted(pair=(pts[0], pts[1]), stable_set=stable)
    closed = is_closed_map_bounded(m, topology, bounds, seed)
    if isinstance(closed, ClosedMapCounterexample):
        return ContractionRefuted(closedness=closed)
    if chain.stabilized:
        step = chain.stable_at
        assert step is not None
        return ContractionCertified(chain.entries[-1], step, closed)
    return ContractionInconclusive(
        "space images did not stabilize within the iteration bound", n_max
    )
