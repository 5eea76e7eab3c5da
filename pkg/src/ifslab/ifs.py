"""Iterated function systems and their induced set operator.

An IFS is a finite family of piecewise maps over one ground structure.
The induced operator sends a nonempty set K to the union of the maps'
images of K; its fixed points in the family of nonempty closed sets are
the attractors.  Everything here is computed exactly on symbolic sets:
depth-k collections of word images, contractivity certificates (all word
images collapse to single points), attractor iteration from the whole
space, bounded fixed-point enumeration, and a witness generator that
refutes a second alleged fixed point once one is in hand.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Union

from .bounds import Bounds
from .errors import ContractViolation, IntegrityError, ValidationError
from .maps import PiecewiseMap, closed_sets_within
from .setalg import Point, SymbolicSet, set_sort_key
from .topology import TopologySpec

__all__ = [
    "IFS",
    "Word",
    "WordImageCollection",
    "ContractivityCertified",
    "ContractivityRefuted",
    "ContractivityInconclusive",
    "ContractivityVerdict",
    "AttractorFound",
    "AttractorInconclusive",
    "AttractorVerdict",
    "DistinguishingWitness",
    "distinguishing_witness",
]


@dataclass(frozen=True)
class Word:
    """A finite sequence of map indices (0-based into ``IFS.maps``)."""

    indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class WordImageCollection:
    """All distinct images of the whole space under words of one length."""

    depth: int
    images: tuple[SymbolicSet, ...]

    def all_singletons(self) -> bool:
        return all(s.is_singleton() for s in self.images)


@dataclass(frozen=True, eq=True)
class IFS:
    """A nonempty family of piecewise maps sharing one ground structure."""

    maps: tuple[PiecewiseMap, ...]
    _depth_cache: list = field(
        default_factory=list, compare=False, repr=False, init=False
    )

    def __post_init__(self) -> None:
        if not self.maps:
            raise ValidationError("an IFS needs at least one map")
        g = self.maps[0].ground
        if any(m.ground != g for m in self.maps):
            raise ValidationError("all maps of an IFS must share one ground structure")

    @property
    def ground(self):
        return self.maps[0].ground

    def hutchinson(self, k: SymbolicSet) -> SymbolicSet:
        """Union of the maps' images of k; defined for nonempty k only."""
        if k.is_empty():
            raise ValidationError(
                "the induced set operator is defined on nonempty sets only"
            )
        out = self.maps[0].image(k)
        for m in self.maps[1:]:
            out = out.union(m.image(k))
        return out

    def word_image(self, word: Word, start: SymbolicSet) -> SymbolicSet:
        """Image of start under the composition of the word's maps.

        The first index is applied first, so the word (i1, ..., in) denotes
        the composition f_in after ... after f_i1.
        """
        img = start
        for i in word.indices:
            if not 0 <= i < len(self.maps):
                raise ValidationError(f"word index {i} out of range")
            img = self.maps[i].image(img)
        return img

    def depth_images(self, n: int) -> WordImageCollection:
        """Distinct images of the whole space under all words of length n.

        Computed incrementally (each depth applies every map to every
        image at the previous depth) and memoized on the instance, which
        is safe under concurrent use: entries are only ever appended, and
        appending an already-computed depth is idempotent.
        """
        if n < 0:
            raise ValidationError("depth must be >= 0")
        cache = self._depth_cache
        if not cache:
            cache.append((self.ground.whole(),))
        while len(cache) <= n:
            prev = cache[-1]
            nxt = {m.image(a) for a in prev for m in self.maps}
            cache.append(tuple(sorted(nxt, key=set_sort_key)))
        return WordImageCollection(n, cache[n])


# ---------------------------------------------------------------------------
# Contractivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContractivityCertified:
    """At this depth every word image is a single point.

    A singleton lies inside some member of any open cover, and images of
    longer words are contained in images of their length-n prefixes, so
    one depth witnesses the covering condition for all covers at once.
    """

    depth: int


@dataclass(frozen=True)
class ContractivityRefuted:
    """The image collection reached a fixpoint still containing a 2-point set.

    From the fixpoint on, some word image keeps both points forever, and at
    shallower depths prefix images only grow, so the two-set cover built
    from the points' complements defeats every depth.
    """

    pair: tuple[Point, Point]
    stable_collection: WordImageCollection
    refuting_cover: tuple[SymbolicSet, SymbolicSet]


@dataclass(frozen=True)
class ContractivityInconclusive:
    reached: int
    note: str = ""


ContractivityVerdict = Union[
    ContractivityCertified, ContractivityRefuted, ContractivityInconclusive
]


def contractivity_certificate(
    system: IFS, topology: TopologySpec, n_max: int = 16
) -> ContractivityVerdict:
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    prev = system.depth_images(0)
    for n in range(1, n_max + 1):
        cur = system.depth_images(n)
        if cur.all_singletons():
            return ContractivityCertified(n)
        if cur.images == prev.images:
            witness = next(s for s in cur.images if s.cardinality() > 1)
            x, y = witness.first_points(2)
            whole = system.ground.whole()
            cover = (
                whole.difference(system.ground.singleton(x)),
                whole.difference(system.ground.singleton(y)),
            )
            if topology.cover_check(cover):
                return ContractivityRefuted((x, y), cur, cover)
            return ContractivityInconclusive(
                n,
                "image collection stabilized with a multi-point member, but the "
                "point-complement pair is not an open cover in this topology",
            )
        prev = cur
    return ContractivityInconclusive(n_max)


# ---------------------------------------------------------------------------
# Attractors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttractorFound:
    """The iteration from the whole space reached a fixed point.

    The result is the maximal fixed point: any fixed point E satisfies
    E = F^j(E) which is contained in F^j(whole space) by monotonicity.
    """

    attractor: SymbolicSet
    steps: int


@dataclass(frozen=True)
class AttractorInconclusive:
    reached: int


AttractorVerdict = Union[AttractorFound, AttractorInconclusive]


def attractor_from_space(
    system: IFS, topology: TopologySpec, n_max: int = 16
) -> AttractorVerdict:
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    prev = system.ground.whole()
    for j in range(n_max):
        cur = system.hutchinson(prev)
        if not cur.is_subset(prev):
            raise IntegrityError("attractor iteration failed to decrease")
        if cur == prev:
            if not topology.is_closed(cur):
                raise IntegrityError(
                    "iteration stabilized at a non-closed set; the topology or "
                    "map definitions are inconsistent"
                )
            return AttractorFound(cur, j)
        prev = cur
    return AttractorInconclusive(n_max)


def fixed_point_search(
    system: IFS,
    topology: TopologySpec,
    bounds: Bounds = Bounds(),
    n_max: int = 16,
) -> list[SymbolicSet]:
    """All nonempty closed fixed points of the set operator within the bounds.

    The attractor reached from the whole space is always included when the
    iteration is conclusive, even if it falls outside the shape grammar.
    """
    top = attractor_from_space(system, topology, n_max)
    if isinstance(top, AttractorFound):
        outer = top.attractor
    else:
        outer = system.hutchinson(system.ground.whole())
    found = []
    for e in closed_sets_within(topology, bounds):
        # Any fixed point E satisfies E = F^j(E) subset F^j(whole) by
        # monotonicity, so the cheap subset test against the attractor
        # (or one operator iterate) prunes before the operator is applied.
        if e.is_empty() or not e.is_subset(outer):
            continue
        if system.hutchinson(e) == e:
            found.append(e)
    if isinstance(top, AttractorFound) and top.attractor not in found:
        found.append(top.attractor)
    return found


# ---------------------------------------------------------------------------
# Distinguishing two alleged fixed points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistinguishingWitness:
    """Evidence that the second of two alleged fixed points is not fixed.

    ``point`` lies in the first set but not the second; ``word`` is a
    composition (at a depth where all word images are singletons) sending
    some element of the first set to that point.  The same word maps the
    second set to ``escaped_image``, a set disjoint from the second set,
    so the operator moves the second set off itself.
    """

    point: Point
    word: Word
    escaped_image: SymbolicSet


def distinguishing_witness(
    system: IFS,
    topology: TopologySpec,
    e1: SymbolicSet,
    e2: SymbolicSet,
    depth: int,
    verify: bool = True,
) -> DistinguishingWitness | None:
    """Search words of the given depth for one separating e1 from e2.

    Both sets must be nonempty, closed fixed points of the set operator;
    with ``verify`` (the default) this is checked and a violation raises.
    Passing ``verify=False`` runs the machinery on unverified claims, which
    is how a refutation of a wrong fixed-point claim is produced.  The
    depth must come from a contractivity certificate, so that word images
    of the whole space are singletons.  Returns None when the sets are
    equal or the first contains nothing outside the second.
    """
    if verify:
        for name, e in (("first", e1), ("second", e2)):
            if e.is_empty():
                raise ContractViolation(f"the {name} set is empty")
            if not topology.is_closed(e):
                raise ContractViolation(f"the {name} set is not closed")
            fe = system.hutchinson(e)
            if fe != e:
                raise ContractViolation(
                    f"the {name} set is not a fixed point: the operator sends "
                    f"{e!r} to {fe!r}"
                )
    if e1 == e2:
        return None
    z = e1.difference(e2).first_point()
    if z is None:
        return None
    target = system.ground.singleton(z)
    for combo in itertools.product(range(len(system.maps)), repeat=depth):
        word = Word(combo)
        if system.word_image(word, e1).contains(z):
            whole_image = system.word_image(word, system.ground.whole())
            if whole_image != target:
                raise ContractViolation(
                    f"depth {depth} is not a certified collapse depth: the word "
                    f"{combo} sends the whole space to {whole_image!r}"
                )
            escaped = system.word_image(word, e2)
            if escaped.meets(e2):
                raise IntegrityError(
                    "word image unexpectedly meets the second set"
                )
            return DistinguishingWitness(z, word, escaped)
    return None
