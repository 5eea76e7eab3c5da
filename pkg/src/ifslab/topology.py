"""Clause-defined topologies and exact decision procedures.

A topology is given by a finite disjunction of conjunctive clauses over
four primitive conditions on a set A:

* ``SubsetOf(S)``        -- A is contained in S
* ``CofiniteWithin(S)``  -- S minus A is finite
* ``Meets(S)``           -- A intersects S
* ``Avoids(S)``          -- A is disjoint from S

A set is open when it is empty or satisfies every conjunct of some clause.
The empty set is open unconditionally: clause satisfaction (for example a
Meets conjunct) must not be able to exclude it.

Closure and separation are decided by a maximal-admissible-set argument,
see :meth:`TopologySpec.exists_open_avoiding`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Union

from .errors import ContractViolation, GroundMismatchError, ValidationError
from .setalg import Atom, BlockElem, BlockPart, GroundStructure, Point, SymbolicSet

__all__ = [
    "SubsetOf",
    "CofiniteWithin",
    "Meets",
    "Avoids",
    "Primitive",
    "OpennessClause",
    "TopologySpec",
]


@dataclass(frozen=True)
class SubsetOf:
    base: SymbolicSet

    def holds(self, a: SymbolicSet) -> bool:
        return a.is_subset(self.base)


@dataclass(frozen=True)
class CofiniteWithin:
    base: SymbolicSet

    def holds(self, a: SymbolicSet) -> bool:
        return self.base.diff_is_finite(a)


@dataclass(frozen=True)
class Meets:
    base: SymbolicSet

    def __post_init__(self) -> None:
        if self.base.is_empty():
            raise ValidationError("Meets(empty) is unsatisfiable")

    def holds(self, a: SymbolicSet) -> bool:
        return a.meets(self.base)


@dataclass(frozen=True)
class Avoids:
    base: SymbolicSet

    def holds(self, a: SymbolicSet) -> bool:
        return not a.meets(self.base)


Primitive = Union[SubsetOf, CofiniteWithin, Meets, Avoids]


@dataclass(frozen=True)
class OpennessClause:
    """A conjunction of primitives; a set satisfying all of them is open."""

    conjuncts: tuple[Primitive, ...]

    def __post_init__(self) -> None:
        if not self.conjuncts:
            raise ValidationError("a clause needs at least one conjunct")

    def holds(self, a: SymbolicSet) -> bool:
        return all(p.holds(a) for p in self.conjuncts)


@dataclass(frozen=True)
class TopologySpec:
    """A ground structure together with openness clauses.

    Whether arbitrary unions of opens are again open is not decidable from
    a clause list; callers get exact answers for the sets they ask about,
    and the test suite checks closure under finite unions and
    intersections on samples only.
    """

    ground: GroundStructure
    clauses: tuple[OpennessClause, ...]

    def __post_init__(self) -> None:
        for clause in self.clauses:
            for prim in clause.conjuncts:
                if prim.base.ground != self.ground:
                    raise ValidationError(
                        "clause primitive defined over a different ground structure"
                    )
        if not self.is_open(self.ground.whole()):
            warnings.warn(
                "the whole space satisfies no openness clause; "
                "this clause list does not define a topology",
                stacklevel=2,
            )

    # --- openness and closedness ---

    # Openness and closedness sit on the hot path of bounded-exhaustive
    # sweeps, so both avoid per-call generator frames and dispatch through
    # flat (kind, base) test tables instead of the primitive objects.
    _SUPERSET, _FINITE_MEET, _NOT_SUPERSET, _SUBSET, _COFINITE, _MEETS, _AVOIDS = range(7)

    @cached_property
    def _open_tests(self) -> tuple[tuple[tuple[int, SymbolicSet], ...], ...]:
        out = []
        for clause in self.clauses:
            tests = []
            for p in clause.conjuncts:
                if isinstance(p, SubsetOf):
                    tests.append((self._SUBSET, p.base))
                elif isinstance(p, CofiniteWithin):
                    tests.append((self._COFINITE, p.base))
                elif isinstance(p, Meets):
                    tests.append((self._MEETS, p.base))
                else:
                    tests.append((self._AVOIDS, p.base))
            out.append(tuple(tests))
        return tuple(out)

    @cached_property
    def _closed_tests(self) -> tuple[tuple[tuple[int, SymbolicSet], ...], ...]:
        """Clause tests rewritten against A itself instead of its complement.

        With C = X minus A:  C subset S  iff  X minus S subset A;
        S minus C finite  iff  S intersect A finite;  C meets S  iff
        S is not a subset of A;  C avoids S  iff  S subset A.
        """
        out = []
        for clause in self.clauses:
            tests = []
            for p in clause.conjuncts:
                if isinstance(p, SubsetOf):
                    tests.append((self._SUPERSET, p.base.complement()))
                elif isinstance(p, CofiniteWithin):
                    tests.append((self._FINITE_MEET, p.base))
                elif isinstance(p, Meets):
                    tests.append((self._NOT_SUPERSET, p.base))
                else:
                    tests.append((self._SUPERSET, p.base))
            out.append(tuple(tests))
        return tuple(out)

    def is_open(self, a: SymbolicSet) -> bool:
        self._check_ground(a)
        if a.is_empty():
            return True
        for tests in self._open_tests:
            for kind, base in tests:
                if kind == self._SUBSET:
                    if not a.is_subset(base):
                        break
                elif kind == self._COFINITE:
                    if not base.diff_is_finite(a):
                        break
                elif kind == self._MEETS:
                    if not a.meets(base):
                        break
                elif a.meets(base):
                    break
            else:
                return True
        return False

    def is_closed(self, a: SymbolicSet) -> bool:
        self._check_ground(a)
        if a.atoms_in == self.ground.atom_set and all(
            cof and not idx for cof, idx in a.parts
        ):
            return True  # the whole space is closed: its complement is empty
        for tests in self._closed_tests:
            for kind, base in tests:
                if kind == self._SUPERSET:
                    if not base.is_subset(a):
                        break
                elif kind == self._FINITE_MEET:
                    if not a.intersection_is_finite(base):
                        break
                elif base.is_subset(a):
                    break
            else:
                return True
        return False

    # --- separation core ---

    def exists_open_avoiding(self, x: Point, a: SymbolicSet) -> SymbolicSet | None:
        """An open set containing x and disjoint from a, or None.

        Per clause, the maximal admissible candidate is
        ``(intersection of the SubsetOf bases, or X) minus (a and the
        Avoids bases)``.  Any open U containing x, avoiding a and
        satisfying the clause is contained in that candidate, and the
        remaining primitive kinds (CofiniteWithin, Meets) are monotone
        under supersets, so the clause admits such a U exactly when the
        candidate itself contains x and satisfies them.
        """
        self._check_ground(a)
        if a.contains(x):
            raise ContractViolation(f"{x!r} is a member of the set to avoid")
        for clause in self.clauses:
            cand = None
            residual: list[Primitive] = []
            for prim in clause.conjuncts:
                if isinstance(prim, SubsetOf):
                    cand = prim.base if cand is None else cand.intersect(prim.base)
                elif isinstance(prim, Avoids):
                    pass  # handled by subtraction below
                else:
                    residual.append(prim)
            if cand is None:
                cand = self.ground.whole()
            cand = cand.difference(a)
            for prim in clause.conjuncts:
                if isinstance(prim, Avoids):
                    cand = cand.difference(prim.base)
            if cand.contains(x) and all(p.holds(cand) for p in residual):
                return cand
        return None

    # --- closure and interior ---

    @cached_property
    def _clause_literals(self) -> tuple[frozenset[int], ...]:
        """Per block, the index literals mentioned by any clause base set."""
        lits = [set() for _ in self.ground.blocks]
        for clause in self.clauses:
            for prim in clause.conjuncts:
                for bi in range(len(self.ground.blocks)):
                    lits[bi] |= prim.base.literal_indices(bi)
        return tuple(frozenset(s) for s in lits)

    def closure(self, a: SymbolicSet) -> SymbolicSet:
        """Smallest closed superset: a plus every point no open separates from a.

        Evaluated regionally: each atom individually, and each block at its
        finitely many exceptional indices (those mentioned in a or in any
        clause base set) plus one generic index above all of them.  Beyond
        the mentioned literals the separation predicate cannot distinguish
        indices, so the generic answer covers the whole tail.
        """
        self._check_ground(a)
        g = self.ground

        def in_closure(p: Point) -> bool:
            return a.contains(p) or self.exists_open_avoiding(p, a) is None

        atoms = frozenset(name for name in g.atoms if in_closure(Atom(name)))
        parts = []
        for bi, name in enumerate(g.blocks):
            exceptional = a.literal_indices(bi) | self._clause_literals[bi]
            generic = max(exceptional, default=0) + 1
            if in_closure(BlockElem(name, generic)):
                excl = frozenset(
                    i for i in exceptional if not in_closure(BlockElem(name, i))
                )
                parts.append(BlockPart(True, excl))
            else:
                members = frozenset(
                    i for i in exceptional if in_closure(BlockElem(name, i))
                )
                parts.append(BlockPart(False, members))
        return SymbolicSet(g, atoms, tuple(parts))

    def interior(self, a: SymbolicSet) -> SymbolicSet:
        return self.closure(a.complement()).complement()

    # --- sampled checks ---

    def t1_sample(self, points) -> bool:
        """True iff each sampled singleton equals its own closure."""
        for p in points:
            single = self.ground.singleton(p)
            if self.closure(single) != single:
                return False
        return True

    def cover_check(self, cover) -> bool:
        """True iff every member is open and the union is the whole space."""
        union = self.ground.empty()
        for member in cover:
            if not self.is_open(member):
                return False
            union = union.union(member)
        return union == self.ground.whole()

    def _check_ground(self, a: SymbolicSet) -> None:
        if a.ground is not self.ground and a.ground != self.ground:
            raise GroundMismatchError("set belongs to a different ground structure")
