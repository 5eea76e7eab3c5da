"""Neighborhoods of closed sets and closure evidence for operator images.

The family of nonempty closed subsets of the ground space carries a
topology generated by basis neighborhoods S(V0; V1..Vk): a closed set
belongs to the neighborhood when it is contained in the open set V0 and
meets each open set Vi.  This module decides whether a target closed set
K is the image of some closed set under an IFS's induced set operator,
and gathers two tiers of evidence that K lies in the closure of that
operator's range without being in the range itself:

* bounded challenges: for each of finitely many basis neighborhoods of
  K, exhibit a closed set whose operator image lies in the neighborhood;
* an analytic certificate: a clause analysis showing every open set
  containing K's point is cofinite, combined with a fiber family showing
  every tail element of a designated block is an operator image of a
  singleton, which together settle every neighborhood at once.

A target that is certified outside the range but inside its closure
witnesses that the operator is not a closed map on the hyperspace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from random import Random
from typing import Optional, Union

from .bounds import DEFAULT_SEED, Bounds
from .errors import ContractViolation, ValidationError
from .ifs import IFS
from .setalg import (
    Atom,
    BlockElem,
    Point,
    SymbolicSet,
    enumerate_sets,
    set_sort_key,
)
from .topology import Avoids, CofiniteWithin, Meets, SubsetOf, TopologySpec

__all__ = [
    "BasisNeighborhood",
    "nbhd_contains",
    "fiber_intersection",
    "InImage",
    "NotInImageCertified",
    "NotInImageBounded",
    "ImageMembershipInconclusive",
    "ImageMembershipVerdict",
    "is_in_hutchinson_image",
    "closure_challenge",
    "ClauseFinding",
    "FiberSample",
    "ClosureCertificate",
    "guided_closure_proof",
    "ChallengeRecord",
    "NonClosednessReport",
    "non_closedness_report",
    "VERDICT_NON_CLOSED_CERTIFIED",
    "VERDICT_NON_CLOSED_EVIDENCE",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_IN_IMAGE",
]


@dataclass(frozen=True)
class BasisNeighborhood:
    """S(V0; V1..Vk): closed sets contained in V0 and meeting every Vi."""

    topology: TopologySpec
    container: SymbolicSet
    meeters: tuple[SymbolicSet, ...] = ()

    def __post_init__(self) -> None:
        for v in (self.container, *self.meeters):
            if not self.topology.is_open(v):
                raise ValidationError(
                    f"basis neighborhood component {v!r} is not open"
                )

    @classmethod
    def of(
        cls, topology: TopologySpec, container: SymbolicSet, *meeters: SymbolicSet
    ) -> "BasisNeighborhood":
        return cls(topology, container, tuple(meeters))

    def admits(self, k: SymbolicSet) -> bool:
        if k.is_empty():
            raise ValidationError("neighborhood membership is for nonempty sets")
        return k.is_subset(self.container) and all(k.meets(v) for v in self.meeters)

    def open_core(self) -> SymbolicSet:
        """Intersection of all components; open, and met by every member."""
        w = self.container
        for v in self.meeters:
            w = w.intersect(v)
        return w


def nbhd_contains(neighborhood: BasisNeighborhood, k: SymbolicSet) -> bool:
    return neighborhood.admits(k)


def fiber_intersection(system: IFS, k: SymbolicSet) -> SymbolicSet:
    """Intersection of the maps' preimages of k.

    A set E satisfies hutchinson(E) subset-of k exactly when E is a subset
    of this region, so it bounds every candidate solution of F(E) = k.
    """
    out = system.maps[0].preimage(k)
    for m in system.maps[1:]:
        out = out.intersect(m.preimage(k))
    return out


# ---------------------------------------------------------------------------
# Membership in the operator's range
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InImage:
    witness: SymbolicSet


@dataclass(frozen=True)
class NotInImageCertified:
    reason: str
    admissible: SymbolicSet


@dataclass(frozen=True)
class NotInImageBounded:
    bounds: Bounds
    admissible: SymbolicSet


@dataclass(frozen=True)
class ImageMembershipInconclusive:
    reason: str


ImageMembershipVerdict = Union[
    InImage, NotInImageCertified, NotInImageBounded, ImageMembershipInconclusive
]


def is_in_hutchinson_image(
    system: IFS,
    topology: TopologySpec,
    k: SymbolicSet,
    bounds: Bounds = Bounds(),
) -> ImageMembershipVerdict:
    """Decide whether k = hutchinson(E) for some nonempty closed E.

    Any solution E lies inside the fiber intersection R, and the operator
    is monotone, so hutchinson(R) = k settles the question positively when
    R is closed, and hutchinson(R) being a proper subset of k settles it
    negatively.  When R is not closed the monotone shortcut would need a
    largest closed subset of R, which need not exist, so only a bounded
    search over closed subsets of R is run and no certified negative is
    issued.
    """
    if k.is_empty():
        raise ValidationError("the target of an image-membership query is nonempty")
    if not topology.is_closed(k):
        raise ValidationError("the target of an image-membership query is closed")
    region = fiber_intersection(system, k)
    if region.is_empty():
        return NotInImageCertified(
            "no point is sent into the target by every map, so only the empty "
            "set has operator image inside the target",
            region,
        )
    if topology.is_closed(region):
        if system.hutchinson(region) == k:
            return InImage(region)
        return NotInImageCertified(
            "the operator image of the maximal admissible set is a proper "
            "subset of the target, and the operator is monotone",
            region,
        )
    for e in enumerate_sets(system.ground, bounds.max_index, bounds.max_exceptions):
        if e.is_empty() or not e.is_subset(region):
            continue
        if not topology.is_closed(e):
            continue
        if system.hutchinson(e) == k:
            return InImage(e)
    return NotInImageBounded(bounds, region)


# ---------------------------------------------------------------------------
# Closure challenges
# ---------------------------------------------------------------------------

_GUIDED_PER_BLOCK = 4


def _block_points_of(s: SymbolicSet, per_block: int) -> list[BlockElem]:
    """First few block elements of s, round-robin across blocks."""
    g = s.ground
    columns = []
    for bi, name in enumerate(g.blocks):
        part = s.parts[bi]
        picked: list[BlockElem] = []
        if part.cofinite:
            n = 1
            while len(picked) < per_block:
                if n not in part.indices:
                    picked.append(BlockElem(name, n))
                n += 1
        else:
            for n in sorted(part.indices)[:per_block]:
                picked.append(BlockElem(name, n))
        columns.append(picked)
    out: list[BlockElem] = []
    for layer in itertools.zip_longest(*columns):
        out.extend(p for p in layer if p is not None)
    return out


def _exact_singleton_source(
    system: IFS, topology: TopologySpec, target: SymbolicSet
) -> Optional[SymbolicSet]:
    """A closed set whose operator image is exactly the given singleton."""
    e = fiber_intersection(system, target)
    if e.is_empty() or not topology.is_closed(e):
        return None
    if system.hutchinson(e) != target:
        return None
    return e


def closure_challenge(
    system: IFS,
    topology: TopologySpec,
    k: SymbolicSet,
    neighborhood: BasisNeighborhood,
    bounds: Bounds = Bounds(),
) -> Optional[SymbolicSet]:
    """A closed E whose operator image lies in the given neighborhood of k.

    Candidates are tried in a deterministic order: first, singleton
    targets drawn from the neighborhood's open core are inverted through
    the fiber intersection; then singletons and doubletons over block
    elements with small index and the atoms are tested directly.  Returns
    the first success, or None when every candidate fails.
    """
    if not neighborhood.admits(k):
        raise ContractViolation(
            "the challenge neighborhood does not contain the target set"
        )
    g = system.ground
    core = neighborhood.open_core()
    for q in _block_points_of(core, _GUIDED_PER_BLOCK):
        e = _exact_singleton_source(system, topology, g.singleton(q))
        if e is not None:
            return e
    points: list[Point] = [
        BlockElem(name, i)
        for name in g.blocks
        for i in range(1, bounds.max_index + 1)
    ]
    points.extend(Atom(name) for name in g.atoms)
    for p in points:
        e = g.singleton(p)
        if topology.is_closed(e) and neighborhood.admits(system.hutchinson(e)):
            return e
    for p, q in itertools.combinations(points, 2):
        e = g.finite((p, q))
        if topology.is_closed(e) and neighborhood.admits(system.hutchinson(e)):
            return e
    return None


# ---------------------------------------------------------------------------
# The analytic certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClauseFinding:
    """How one openness clause behaves for open sets containing the point."""

    clause_index: int
    outcome: str  # "excludes-point" | "unsatisfiable" | "forces-cofinite"
    detail: str


@dataclass(frozen=True)
class FiberSample:
    index: int
    fiber: SymbolicSet
    image: SymbolicSet


@dataclass(frozen=True)
class ClosureCertificate:
    """Every basis neighborhood of the target meets the operator's range.

    The clause findings show that every open set containing the target's
    point is cofinite, so the open core of any basis neighborhood of the
    target is cofinite and contains an element of the designated block
    with arbitrarily large index.  The fiber family shows that each such
    block element's singleton is the exact operator image of a closed
    set, uniformly in the index beyond all clause and map literals
    (spot-checked at three consecutive generic indices) and individually
    below them.  Together these settle every neighborhood, not only the
    enumerated ones.
    """

    target: SymbolicSet
    point: Point
    block: str
    clause_findings: tuple[ClauseFinding, ...]
    exceptional_fibers: tuple[FiberSample, ...]
    generic_index: int
    generic_fibers: tuple[FiberSample, ...]


def _clause_cofinite_finding(
    topology: TopologySpec, clause_index: int, p: Point
) -> Optional[ClauseFinding]:
    """Classify one clause; None when it admits a non-cofinite open with p."""
    g = topology.ground
    whole = g.whole()
    clause = topology.clauses[clause_index]
    region = whole
    for prim in clause.conjuncts:
        if isinstance(prim, SubsetOf):
            region = region.intersect(prim.base)
        elif isinstance(prim, Avoids):
            region = region.difference(prim.base)
    if not region.contains(p):
        return ClauseFinding(
            clause_index,
            "excludes-point",
            "no set satisfying the clause contains the point",
        )
    forced = g.singleton(p)
    for prim in clause.conjuncts:
        if isinstance(prim, CofiniteWithin):
            if not prim.base.difference(region).is_finite():
                return ClauseFinding(
                    clause_index,
                    "unsatisfiable",
                    "a cofinite-within requirement cannot be met inside the "
                    "clause's admissible region",
                )
            forced = forced.union(prim.base.intersect(region))
        elif isinstance(prim, Meets):
            hit = prim.base.intersect(region).first_point()
            if hit is None:
                return ClauseFinding(
                    clause_index,
                    "unsatisfiable",
                    "a meets requirement cannot be met inside the clause's "
                    "admissible region",
                )
            forced = forced.union(g.singleton(hit))
    if whole.difference(forced).is_finite():
        return ClauseFinding(
            clause_index,
            "forces-cofinite",
            "every set satisfying the clause and containing the point is "
            "cofinite in the whole space",
        )
    return None


def _index_literal_bound(system: IFS, topology: TopologySpec) -> int:
    """Largest block index written anywhere in the maps or the topology."""
    top = 0
    for bi in range(len(system.ground.blocks)):
        for clause in topology.clauses:
            for prim in clause.conjuncts:
                lits = prim.base.literal_indices(bi)
                if lits:
                    top = max(top, max(lits))
    for m in system.maps:
        for blk, idx, target in m.overrides:
            top = max(top, idx)
            if isinstance(target, BlockElem):
                top = max(top, target.index)
        for t in m.atom_targets:
            if isinstance(t, BlockElem):
                top = max(top, t.index)
        for rule in m.block_rules:
            target = getattr(rule, "target", None)
            if isinstance(target, BlockElem):
                top = max(top, target.index)
    return top


def guided_closure_proof(
    system: IFS,
    topology: TopologySpec,
    k: SymbolicSet,
    block: str,
    bounds: Bounds = Bounds(),
) -> Optional[ClosureCertificate]:
    """Certificate that every basis neighborhood of k meets the range.

    k must be a singleton.  Two facts are established: every open set
    containing k's point is cofinite (per-clause analysis), and for every
    index n the singleton of the designated block's n-th element is the
    exact operator image of a nonempty closed set (fiber analysis at each
    index up to the largest literal, then at three consecutive generic
    indices; beyond the literals every definition treats indices alike,
    so the generic checks cover the whole tail).  Returns None as soon as
    either fact fails.
    """
    if not k.is_singleton():
        raise ValidationError("the analytic certificate applies to singletons")
    if block not in system.ground.blocks:
        raise ValidationError(f"unknown block {block!r}")
    p = k.first_point()
    assert p is not None
    findings = []
    for ci in range(len(topology.clauses)):
        finding = _clause_cofinite_finding(topology, ci, p)
        if finding is None:
            return None
        findings.append(finding)

    g = system.ground
    bound = _index_literal_bound(system, topology)
    generic = bound + 1

    def fiber_at(n: int) -> Optional[FiberSample]:
        target = g.singleton(BlockElem(block, n))
        if not topology.is_closed(target):
            return None
        e = _exact_singleton_source(system, topology, target)
        if e is None:
            return None
        return FiberSample(n, e, target)

    exceptional = []
    for n in range(1, bound + 1):
        sample = fiber_at(n)
        if sample is None:
            return None
        exceptional.append(sample)
    generic_samples = []
    for n in (generic, generic + 1, generic + 2):
        sample = fiber_at(n)
        if sample is None:
            return None
        generic_samples.append(sample)
    return ClosureCertificate(
        k,
        p,
        block,
        tuple(findings),
        tuple(exceptional),
        generic,
        tuple(generic_samples),
    )


# ---------------------------------------------------------------------------
# The combined non-closedness report
# ---------------------------------------------------------------------------

VERDICT_NON_CLOSED_CERTIFIED = "non-closed-certified"
VERDICT_NON_CLOSED_EVIDENCE = "non-closed-evidence"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_IN_IMAGE = "not-applicable-in-image"


@dataclass(frozen=True)
class ChallengeRecord:
    neighborhood: BasisNeighborhood
    witness: Optional[SymbolicSet]


@dataclass(frozen=True)
class NonClosednessReport:
    verdict: str
    membership: ImageMembershipVerdict
    certificate: Optional[ClosureCertificate]
    challenges: tuple[ChallengeRecord, ...]


def _open_pool(topology: TopologySpec, bounds: Bounds) -> list[SymbolicSet]:
    """Deterministic pool of open sets used to assemble neighborhoods."""
    g = topology.ground
    whole = g.whole()
    pool = [whole]
    universe: list[Point] = [Atom(name) for name in g.atoms]
    depth = min(3, bounds.max_index)
    universe.extend(
        BlockElem(name, i) for name in g.blocks for i in range(1, depth + 1)
    )
    for p in universe:
        pool.append(whole.difference(g.singleton(p)))
    for p, q in zip(universe, universe[1:]):
        pool.append(whole.difference(g.finite((p, q))))
    for clause in topology.clauses:
        region = whole
        for prim in clause.conjuncts:
            if isinstance(prim, SubsetOf):
                region = region.intersect(prim.base)
            elif isinstance(prim, Avoids):
                region = region.difference(prim.base)
        pool.append(region)
        trimmed = region
        for p in region.first_points(2):
            trimmed = trimmed.difference(g.singleton(p))
            pool.append(trimmed)
        members = [p for p in universe if region.contains(p)]
        for p in members:
            pool.append(g.singleton(p))
        for p, q in zip(members, members[1:]):
            pool.append(g.finite((p, q)))
    seen = set()
    out = []
    for s in sorted(pool, key=set_sort_key):
        if s not in seen and not s.is_empty() and topology.is_open(s):
            seen.add(s)
            out.append(s)
    return out


def _random_open(
    rng: Random, topology: TopologySpec, k: SymbolicSet
) -> Optional[SymbolicSet]:
    """A random cofinite open set containing k, if one turns up."""
    g = topology.ground
    whole = g.whole()
    for _ in range(8):
        cut = []
        for _ in range(rng.randrange(1, 4)):
            name = rng.choice(g.blocks)
            cut.append(BlockElem(name, rng.randrange(1, 33)))
        v = whole.difference(g.finite(cut))
        if k.is_subset(v) and topology.is_open(v):
            return v
    return None


def _neighborhoods_of(
    topology: TopologySpec,
    k: SymbolicSet,
    bounds: Bounds,
    rng: Random,
) -> list[BasisNeighborhood]:
    pool = _open_pool(topology, bounds)
    containers = [v for v in pool if k.is_subset(v)]
    meeters = [v for v in pool if k.meets(v)]
    out: list[BasisNeighborhood] = []

    def push(container: SymbolicSet, vs: tuple[SymbolicSet, ...]) -> bool:
        out.append(BasisNeighborhood(topology, container, vs))
        return len(out) >= bounds.neighborhoods

    done = False
    for v0 in containers:
        if push(v0, ()):
            done = True
            break
    if not done:
        for v0, v1 in itertools.product(containers, meeters):
            if push(v0, (v1,)):
                done = True
                break
    if not done:
        for v0 in containers:
            for v1, v2 in itertools.combinations(meeters, 2):
                if push(v0, (v1, v2)):
                    done = True
                    break
            if done:
                break
    extras = min(8, bounds.neighborhoods)
    for _ in range(extras):
        v0 = _random_open(rng, topology, k)
        if v0 is None:
            continue
        vs = []
        v1 = _random_open(rng, topology, k)
        if v1 is not None and rng.random() < 0.7:
            vs.append(v1)
        out.append(BasisNeighborhood(topology, v0, tuple(vs)))
    return out


def non_closedness_report(
    system: IFS,
    topology: TopologySpec,
    k: SymbolicSet,
    bounds: Bounds = Bounds(),
    seed: int = DEFAULT_SEED,
) -> NonClosednessReport:
    """Combine membership, the analytic certificate, and bounded challenges.

    Verdicts: the target being in the operator's range makes non-closedness
    of the operator not decidable through this target; a certified
    non-membership together with the analytic closure certificate yields
    the certified verdict; otherwise unanimous successful challenges with
    at least bounded non-membership yield the evidence verdict.
    """
    membership = is_in_hutchinson_image(system, topology, k, bounds)
    if isinstance(membership, InImage):
        return NonClosednessReport(VERDICT_IN_IMAGE, membership, None, ())
    certificate = None
    if k.is_singleton():
        for block in system.ground.blocks:
            certificate = guided_closure_proof(system, topology, k, block, bounds)
            if certificate is not None:
                break
    rng = Random(seed)
    records = []
    for nbhd in _neighborhoods_of(topology, k, bounds, rng):
        if not nbhd.admits(k):
            continue
        records.append(
            ChallengeRecord(nbhd, closure_challenge(system, topology, k, nbhd, bounds))
        )
    challenges = tuple(records)
    all_met = bool(challenges) and all(r.witness is not None for r in challenges)
    if isinstance(membership, NotInImageCertified) and certificate is not None:
        verdict = VERDICT_NON_CLOSED_CERTIFIED
    elif isinstance(
        membership, (NotInImageCertified, NotInImageBounded)
    ) and (certificate is not None or all_met):
        verdict = VERDICT_NON_CLOSED_EVIDENCE
    else:
        verdict = VERDICT_INCONCLUSIVE
    return NonClosednessReport(verdict, membership, certificate, challenges)
