"""Exact Boolean algebra of subsets of a countable ground space.

The ground space consists of finitely many named atoms plus finitely many
disjoint, countably infinite blocks of indexed elements.  Every subset
handled here is represented per block as either a finite index set or a
cofinite one (all indices except a finite exclusion list), which makes the
representation canonical: two values denote the same subset exactly when
they compare equal.

A bitmask-based truncation oracle (:class:`TruncatedSet`) provides an
independent brute-force route for cross-checking every operation on a
finite window of each block.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, NamedTuple, Union

from .errors import GroundMismatchError, ValidationError

__all__ = [
    "GroundStructure",
    "Atom",
    "BlockElem",
    "Point",
    "BlockPart",
    "SymbolicSet",
    "INFINITE",
    "TruncatedSet",
    "truncate",
    "enumerate_sets",
    "random_set",
    "point_sort_key",
    "set_sort_key",
]


@dataclass(frozen=True)
class GroundStructure:
    """Finitely many atoms plus finitely many countably infinite blocks.

    Atom and block names must be nonempty and pairwise distinct; at least
    one atom or block must exist.
    """

    atoms: tuple[str, ...]
    blocks: tuple[str, ...]

    def __post_init__(self) -> None:
        names = list(self.atoms) + list(self.blocks)
        if not names:
            raise ValidationError("ground structure needs at least one atom or block")
        if any(not n for n in names):
            raise ValidationError("atom and block names must be nonempty")
        if len(set(names)) != len(names):
            raise ValidationError("atom and block names must be pairwise distinct")

    @cached_property
    def atom_set(self) -> frozenset[str]:
        return frozenset(self.atoms)

    @cached_property
    def block_pos(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.blocks)}

    @cached_property
    def atom_pos(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    # --- convenience constructors for sets over this ground ---

    def empty(self) -> SymbolicSet:
        return SymbolicSet(self, frozenset(), tuple(_FIN_EMPTY for _ in self.blocks))

    def whole(self) -> SymbolicSet:
        """The full space: every atom plus every block, cofinitely."""
        return SymbolicSet(self, self.atom_set, tuple(_COF_EMPTY for _ in self.blocks))

    def atom(self, name: str) -> Atom:
        if name not in self.atom_set:
            raise ValidationError(f"unknown atom {name!r}")
        return Atom(name)

    def elem(self, block: str, index: int) -> BlockElem:
        if block not in self.block_pos:
            raise ValidationError(f"unknown block {block!r}")
        if index < 1:
            raise ValidationError(f"block index must be >= 1, got {index}")
        return BlockElem(block, index)

    def singleton(self, p: Point) -> SymbolicSet:
        return self.finite([p])

    def finite(self, points) -> SymbolicSet:
        """The finite set containing exactly the given points."""
        atoms: set[str] = set()
        per_block: dict[str, set[int]] = {b: set() for b in self.blocks}
        for p in points:
            if isinstance(p, Atom):
                if p.name not in self.atom_set:
                    raise ValidationError(f"unknown atom {p.name!r}")
                atoms.add(p.name)
            else:
                if p.block not in per_block:
                    raise ValidationError(f"unknown block {p.block!r}")
                if p.index < 1:
                    raise ValidationError(f"block index must be >= 1, got {p.index}")
                per_block[p.block].add(p.index)
        parts = tuple(BlockPart(False, frozenset(per_block[b])) for b in self.blocks)
        return SymbolicSet(self, frozenset(atoms), parts)

    def block_all(self, name: str) -> SymbolicSet:
        """The whole block `name` as a set (no atoms, other blocks empty)."""
        return self.cofinite_block(name, ())

    def cofinite_block(self, name: str, excluded) -> SymbolicSet:
        """All of block `name` except the given indices."""
        if name not in self.block_pos:
            raise ValidationError(f"unknown block {name!r}")
        excl = frozenset(excluded)
        if any(i < 1 for i in excl):
            raise ValidationError("block indices must be >= 1")
        parts = [_FIN_EMPTY] * len(self.blocks)
        parts[self.block_pos[name]] = BlockPart(True, excl)
        return SymbolicSet(self, frozenset(), tuple(parts))


class Atom(NamedTuple):
    name: str

    def __repr__(self) -> str:
        return f"atom:{self.name}"


class BlockElem(NamedTuple):
    block: str
    index: int

    def __repr__(self) -> str:
        return f"{self.block}[{self.index}]"


Point = Union[Atom, BlockElem]


def point_sort_key(ground: GroundStructure, p: Point) -> tuple:
    """Canonical order: atoms first (ground order), then blocks by ground order, then index."""
    if isinstance(p, Atom):
        return (0, ground.atom_pos[p.name], 0)
    return (1, ground.block_pos[p.block], p.index)


class BlockPart(NamedTuple):
    """One block's contribution: a finite index set, or a cofinite one.

    `indices` holds the members when `cofinite` is False and the excluded
    indices when it is True.  A cofinite part never denotes the same set as
    any finite part, so equality of parts is equality of denotations.
    """

    cofinite: bool
    indices: frozenset[int]


_FIN_EMPTY = BlockPart(False, frozenset())
_COF_EMPTY = BlockPart(True, frozenset())


class _Infinite:
    """Tagged infinite cardinality; compares above every integer."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITE"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Infinite)

    def __hash__(self) -> int:
        return hash("ifslab-INFINITE")

    def __gt__(self, other: object) -> bool:
        if isinstance(other, int):
            return True
        if isinstance(other, _Infinite):
            return False
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, (int, _Infinite)):
            return False
        return NotImplemented

    def __ge__(self, other: object) -> bool:
        if isinstance(other, (int, _Infinite)):
            return True
        return NotImplemented

    def __le__(self, other: object) -> bool:
        if isinstance(other, int):
            return False
        if isinstance(other, _Infinite):
            return True
        return NotImplemented


INFINITE = _Infinite()


@dataclass(frozen=True, slots=True)
class SymbolicSet:
    """A subset of the ground space in canonical finite/cofinite form.

    Values are immutable; all operations are pure functions, so instances
    may be shared freely across threads.  The constructor trusts its
    arguments to be canonical (frozensets of valid indices, parts parallel
    to ``ground.blocks``); use the builders on :class:`GroundStructure` for
    validated construction from user input.
    """

    ground: GroundStructure
    atoms_in: frozenset[str]
    parts: tuple[BlockPart, ...]

    # --- queries (allocation-free) ---

    def part(self, block: str) -> BlockPart:
        return self.parts[self.ground.block_pos[block]]

    def contains(self, p: Point) -> bool:
        if isinstance(p, Atom):
            return p.name in self.atoms_in
        cof, idx = self.parts[self.ground.block_pos[p.block]]
        return (p.index not in idx) if cof else (p.index in idx)

    __contains__ = contains

    def is_empty(self) -> bool:
        return not self.atoms_in and all(
            not cof and not idx for cof, idx in self.parts
        )

    def is_finite(self) -> bool:
        return all(not cof for cof, _ in self.parts)

    def cardinality(self) -> int | _Infinite:
        if not self.is_finite():
            return INFINITE
        return len(self.atoms_in) + sum(len(idx) for _, idx in self.parts)

    def is_singleton(self) -> bool:
        return self.cardinality() == 1

    def is_subset(self, other: SymbolicSet) -> bool:
        self._check_ground(other)
        if not self.atoms_in <= other.atoms_in:
            return False
        for (ca, ia), (cb, ib) in zip(self.parts, other.parts):
            if not ca and not cb:
                if not ia <= ib:
                    return False
            elif not ca and cb:
                if ia & ib:
                    return False
            elif ca and not cb:
                return False  # an infinite part never fits in a finite one
            else:
                if not ib <= ia:
                    return False
        return True

    def meets(self, other: SymbolicSet) -> bool:
        """True iff the intersection is nonempty."""
        self._check_ground(other)
        if self.atoms_in & other.atoms_in:
            return True
        for (ca, ia), (cb, ib) in zip(self.parts, other.parts):
            if not ca and not cb:
                if ia & ib:
                    return True
            elif not ca and cb:
                if ia - ib:
                    return True
            elif ca and not cb:
                if ib - ia:
                    return True
            else:
                return True  # two cofinite parts of an infinite block always meet
        return False

    def diff_is_finite(self, other: SymbolicSet) -> bool:
        """True iff self minus other is finite."""
        self._check_ground(other)
        # Only a cofinite part of self can leave an infinite remainder, and
        # it does exactly when other's matching part is finite.
        return all(cb or not ca for (ca, _), (cb, _) in zip(self.parts, other.parts))

    def intersection_is_finite(self, other: SymbolicSet) -> bool:
        """True iff self intersect other is finite, without building it."""
        self._check_ground(other)
        # An intersection is infinite exactly when some block contributes two
        # cofinite parts.
        for (ca, _), (cb, _) in zip(self.parts, other.parts):
            if ca and cb:
                return False
        return True

    def first_point(self) -> Point | None:
        """Canonically smallest member, or None for the empty set."""
        pts = self.first_points(1)
        return pts[0] if pts else None

    def first_points(self, k: int) -> tuple[Point, ...]:
        """The first k members in canonical order (fewer if the set is smaller)."""
        g = self.ground
        out: list[Point] = []
        for name in g.atoms:
            if len(out) == k:
                return tuple(out)
            if name in self.atoms_in:
                out.append(Atom(name))
        for bi, name in enumerate(g.blocks):
            cof, idx = self.parts[bi]
            if cof:
                i = 1
                while len(out) < k:
                    if i not in idx:
                        out.append(BlockElem(name, i))
                    i += 1
            else:
                for i in sorted(idx):
                    if len(out) == k:
                        break
                    out.append(BlockElem(name, i))
        return tuple(out)

    def iter_points(self) -> Iterator[Point]:
        """Members of a finite set, in canonical order."""
        if not self.is_finite():
            raise ValidationError("cannot list the points of an infinite set")
        g = self.ground
        for name in g.atoms:
            if name in self.atoms_in:
                yield Atom(name)
        for bi, name in enumerate(g.blocks):
            for i in sorted(self.parts[bi].indices):
                yield BlockElem(name, i)

    # --- algebra ---

    def union(self, other: SymbolicSet) -> SymbolicSet:
        self._check_ground(other)
        parts = tuple(
            _part_union(a, b) for a, b in zip(self.parts, other.parts)
        )
        return SymbolicSet(self.ground, self.atoms_in | other.atoms_in, parts)

    def intersect(self, other: SymbolicSet) -> SymbolicSet:
        self._check_ground(other)
        parts = tuple(
            _part_intersect(a, b) for a, b in zip(self.parts, other.parts)
        )
        return SymbolicSet(self.ground, self.atoms_in & other.atoms_in, parts)

    def complement(self) -> SymbolicSet:
        parts = tuple(BlockPart(not cof, idx) for cof, idx in self.parts)
        return SymbolicSet(self.ground, self.ground.atom_set - self.atoms_in, parts)

    def difference(self, other: SymbolicSet) -> SymbolicSet:
        self._check_ground(other)
        parts = tuple(
            _part_difference(a, b) for a, b in zip(self.parts, other.parts)
        )
        return SymbolicSet(self.ground, self.atoms_in - other.atoms_in, parts)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __invert__ = complement

    def literal_indices(self, block_index: int) -> frozenset[int]:
        """Indices mentioned by this set's part for the given block."""
        return self.parts[block_index].indices

    def _check_ground(self, other: SymbolicSet) -> None:
        if self.ground is not other.ground and self.ground != other.ground:
            raise GroundMismatchError(
                "operands belong to different ground structures"
            )

    def __repr__(self) -> str:
        from .render import format_set  # local import to avoid a cycle

        return f"<set {format_set(self)}>"


def _part_union(a: BlockPart, b: BlockPart) -> BlockPart:
    ca, ia = a
    cb, ib = b
    if not ca and not cb:
        return BlockPart(False, ia | ib)
    if ca and cb:
        return BlockPart(True, ia & ib)
    if ca:  # cofinite(ia) with finite(ib)
        return BlockPart(True, ia - ib)
    return BlockPart(True, ib - ia)


def _part_intersect(a: BlockPart, b: BlockPart) -> BlockPart:
    ca, ia = a
    cb, ib = b
    if not ca and not cb:
        return BlockPart(False, ia & ib)
    if ca and cb:
        return BlockPart(True, ia | ib)
    if ca:
        return BlockPart(False, ib - ia)
    return BlockPart(False, ia - ib)


def _part_difference(a: BlockPart, b: BlockPart) -> BlockPart:
    ca, ia = a
    cb, ib = b
    if not ca and not cb:
        return BlockPart(False, ia - ib)
    if not ca and cb:
        return BlockPart(False, ia & ib)
    if ca and not cb:
        return BlockPart(True, ia | ib)
    return BlockPart(False, ib - ia)


# ---------------------------------------------------------------------------
# Truncation oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TruncatedSet:
    """Explicit restriction of a set to atoms plus block indices 1..n.

    Per-block membership is stored as an integer bitmask (bit i-1 for index
    i) and a tail flag saying whether indices beyond n are members.  The
    Boolean operations below are computed purely on these bitmasks, with no
    reference to the symbolic representation, which makes this type an
    independent oracle for :class:`SymbolicSet`: as long as n exceeds every
    index literal in the operands, truncating then operating explicitly
    must agree with operating symbolically then truncating.
    """

    ground: GroundStructure
    n: int
    atom_mask: int
    block_masks: tuple[int, ...]
    tails: tuple[bool, ...]

    def union(self, other: TruncatedSet) -> TruncatedSet:
        self._check(other)
        return TruncatedSet(
            self.ground,
            self.n,
            self.atom_mask | other.atom_mask,
            tuple(a | b for a, b in zip(self.block_masks, other.block_masks)),
            tuple(a or b for a, b in zip(self.tails, other.tails)),
        )

    def intersect(self, other: TruncatedSet) -> TruncatedSet:
        self._check(other)
        return TruncatedSet(
            self.ground,
            self.n,
            self.atom_mask & other.atom_mask,
            tuple(a & b for a, b in zip(self.block_masks, other.block_masks)),
            tuple(a and b for a, b in zip(self.tails, other.tails)),
        )

    def complement(self) -> TruncatedSet:
        full = (1 << self.n) - 1
        return TruncatedSet(
            self.ground,
            self.n,
            ~self.atom_mask & ((1 << len(self.ground.atoms)) - 1),
            tuple(~m & full for m in self.block_masks),
            tuple(not t for t in self.tails),
        )

    def difference(self, other: TruncatedSet) -> TruncatedSet:
        self._check(other)
        return TruncatedSet(
            self.ground,
            self.n,
            self.atom_mask & ~other.atom_mask,
            tuple(a & ~b for a, b in zip(self.block_masks, other.block_masks)),
            tuple(a and not b for a, b in zip(self.tails, other.tails)),
        )

    def contains(self, p: Point) -> bool:
        if isinstance(p, Atom):
            return bool(self.atom_mask >> self.ground.atom_pos[p.name] & 1)
        if p.index > self.n:
            return self.tails[self.ground.block_pos[p.block]]
        return bool(self.block_masks[self.ground.block_pos[p.block]] >> (p.index - 1) & 1)

    def _check(self, other: TruncatedSet) -> None:
        if self.ground != other.ground or self.n != other.n:
            raise GroundMismatchError("truncations over different windows")


def truncate(s: SymbolicSet, n: int) -> TruncatedSet:
    """Restrict a symbolic set to the finite window of indices 1..n."""
    if n < 1:
        raise ValidationError("truncation bound must be >= 1")
    atom_mask = 0
    for i, name in enumerate(s.ground.atoms):
        if name in s.atoms_in:
            atom_mask |= 1 << i
    masks = []
    tails = []
    full = (1 << n) - 1
    for cof, idx in s.parts:
        m = 0
        for i in idx:
            if i <= n:
                m |= 1 << (i - 1)
        masks.append(~m & full if cof else m)
        tails.append(cof)
    return TruncatedSet(s.ground, n, atom_mask, tuple(masks), tuple(tails))


# ---------------------------------------------------------------------------
# Bounded-exhaustive enumeration and random sampling
# ---------------------------------------------------------------------------


def _part_choices(max_index: int, max_exceptions: int) -> list[BlockPart]:
    """Every finite/cofinite part with index lists over 1..max_index of size <= max_exceptions.

    Ordered canonically: finite before cofinite, then by list size, then
    lexicographically, so bounded searches report deterministic witnesses.
    """
    lists: list[frozenset[int]] = []
    for size in range(min(max_exceptions, max_index) + 1):
        for combo in itertools.combinations(range(1, max_index + 1), size):
            lists.append(frozenset(combo))
    return [BlockPart(cof, idx) for cof in (False, True) for idx in lists]


def enumerate_sets(
    ground: GroundStructure, max_index: int, max_exceptions: int
) -> Iterator[SymbolicSet]:
    """All symbolic sets whose per-block index lists fit the given bounds."""
    choices = _part_choices(max_index, max_exceptions)
    atom_subsets = [
        frozenset(combo)
        for size in range(len(ground.atoms) + 1)
        for combo in itertools.combinations(ground.atoms, size)
    ]
    for atoms_in in atom_subsets:
        for parts in itertools.product(choices, repeat=len(ground.blocks)):
            yield SymbolicSet(ground, atoms_in, parts)


def random_set(
    rng: random.Random,
    ground: GroundStructure,
    max_index: int = 16,
    max_size: int = 4,
) -> SymbolicSet:
    """A random symbolic set, for fuzzing and sampled property checks."""
    atoms_in = frozenset(a for a in ground.atoms if rng.random() < 0.5)
    parts = []
    for _ in ground.blocks:
        size = rng.randint(0, max_size)
        idx = frozenset(rng.sample(range(1, max_index + 1), size))
        parts.append(BlockPart(rng.random() < 0.5, idx))
    return SymbolicSet(ground, atoms_in, tuple(parts))


def set_sort_key(s: SymbolicSet) -> tuple:
    """Canonical order on symbolic sets, for deterministic reports."""
    return (
        tuple(sorted(s.atoms_in)),
        tuple((cof, len(idx), tuple(sorted(idx))) for cof, idx in s.parts),
    )
