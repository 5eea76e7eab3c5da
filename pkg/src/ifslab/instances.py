"""Built-in ground spaces, topologies, maps and systems.

The bundled instance lives on two atoms a, b and two indexed blocks ODD
and EVEN (block element n standing for the n-th odd or even natural).
Opens are: any subset of ODD; any subset of ODD union EVEN containing all
but finitely many elements of ODD; any set meeting {a, b} that is
cofinite in the whole space.  This makes every singleton closed, the
space compact, and {a, b} the only closed infinite-set limit points.

The two bundled maps send both atoms to a single atom, collapse EVEN to
the opposite atom, and shift each ODD element to the EVEN element of the
same index.  Together they form a system whose induced set operator has
attractor {a, b}; each alone contracts the space to one atom.
"""

from __future__ import annotations

from random import Random

from .bounds import Bounds
from .config import LabConfig
from .ifs import IFS
from .maps import ConstRule, IdentityRule, PiecewiseMap
from .setalg import Atom, BlockElem, GroundStructure, Point
from .topology import CofiniteWithin, Meets, OpennessClause, SubsetOf, TopologySpec

__all__ = [
    "parity_ground",
    "parity_topology",
    "discrete_topology",
    "collapse_map",
    "to_a",
    "to_b",
    "parity_system",
    "solo_a_system",
    "broken_parity_map",
    "parity_lab",
    "random_piecewise_map",
    "random_ifs",
]


def parity_ground() -> GroundStructure:
    return GroundStructure(atoms=("a", "b"), blocks=("ODD", "EVEN"))


def parity_topology(ground: GroundStructure | None = None) -> TopologySpec:
    g = ground if ground is not None else parity_ground()
    odd = g.block_all("ODD")
    naturals = odd.union(g.block_all("EVEN"))
    atoms = g.finite((Atom("a"), Atom("b")))
    return TopologySpec(
        g,
        (
            OpennessClause((SubsetOf(odd),)),
            OpennessClause((SubsetOf(naturals), CofiniteWithin(odd))),
            OpennessClause((Meets(atoms), CofiniteWithin(g.whole()))),
        ),
    )


def discrete_topology(ground: GroundStructure | None = None) -> TopologySpec:
    """Every set open; the control topology where closure evidence dries up."""
    g = ground if ground is not None else parity_ground()
    return TopologySpec(g, (OpennessClause((SubsetOf(g.whole()),)),))


def collapse_map(
    ground: GroundStructure, home: str, spill: str
) -> PiecewiseMap:
    """Atoms to the home atom, EVEN to the spill atom, ODD across to EVEN."""
    return PiecewiseMap.build(
        ground,
        atoms={"a": Atom(home), "b": Atom(home)},
        blocks={"ODD": IdentityRule("EVEN"), "EVEN": ConstRule(Atom(spill))},
    )


def to_a(ground: GroundStructure | None = None) -> PiecewiseMap:
    """Iterated alone, shrinks the space to {a}."""
    return collapse_map(ground if ground is not None else parity_ground(), "a", "b")


def to_b(ground: GroundStructure | None = None) -> PiecewiseMap:
    """Iterated alone, shrinks the space to {b}."""
    return collapse_map(ground if ground is not None else parity_ground(), "b", "a")


def parity_system(ground: GroundStructure | None = None) -> IFS:
    g = ground if ground is not None else parity_ground()
    return IFS((to_a(g), to_b(g)))


def solo_a_system(ground: GroundStructure | None = None) -> IFS:
    g = ground if ground is not None else parity_ground()
    return IFS((to_a(g),))


def broken_parity_map(ground: GroundStructure | None = None) -> PiecewiseMap:
    """A map that is not closed: it carries EVEN onto ODD.

    The closed set EVEN with the atoms goes to ODD with one atom, whose
    complement meets {a, b} without being cofinite, so the image is not
    closed.
    """
    g = ground if ground is not None else parity_ground()
    return PiecewiseMap.build(
        g,
        atoms={"a": Atom("a"), "b": Atom("a")},
        blocks={"ODD": ConstRule(Atom("a")), "EVEN": IdentityRule("ODD")},
    )


def parity_lab() -> LabConfig:
    """The bundled laboratory; configs/standard.toml spells out the same one."""
    g = parity_ground()
    whole = g.whole()
    maps = {"to_a": to_a(g), "to_b": to_b(g), "broken": broken_parity_map(g)}
    systems = {
        "parity": IFS((maps["to_a"], maps["to_b"])),
        "solo_a": IFS((maps["to_a"],)),
    }
    covers = {
        "atom-complements": (
            whole.difference(g.singleton(Atom("a"))),
            whole.difference(g.singleton(Atom("b"))),
        )
    }
    return LabConfig(g, parity_topology(g), maps, systems, covers, Bounds())


# ---------------------------------------------------------------------------
# Seeded random instances for fuzzing
# ---------------------------------------------------------------------------


def _random_point(rng: Random, ground: GroundStructure, max_index: int) -> Point:
    if rng.random() < 0.4:
        return Atom(rng.choice(ground.atoms))
    return BlockElem(rng.choice(ground.blocks), rng.randrange(1, max_index + 1))


def random_piecewise_map(
    rng: Random, ground: GroundStructure, max_index: int = 8
) -> PiecewiseMap:
    atoms = {name: _random_point(rng, ground, max_index) for name in ground.atoms}
    blocks = {}
    for name in ground.blocks:
        if rng.random() < 0.5:
            blocks[name] = ConstRule(_random_point(rng, ground, max_index))
        else:
            blocks[name] = IdentityRule(rng.choice(ground.blocks))
    overrides = {}
    for _ in range(rng.randrange(0, 3)):
        key = (rng.choice(ground.blocks), rng.randrange(1, max_index + 1))
        overrides[key] = _random_point(rng, ground, max_index)
    return PiecewiseMap.build(ground, atoms, blocks, overrides)


def random_ifs(
    rng: Random,
    ground: GroundStructure | None = None,
    n_maps: int = 3,
    max_index: int = 8,
) -> IFS:
    g = ground if ground is not None else parity_ground()
    return IFS(tuple(random_piecewise_map(rng, g) for _ in range(n_maps)))
