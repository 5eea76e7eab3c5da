"""Config files: one TOML surface describing a whole laboratory.

Sections: [space] declares atoms and blocks; [topology] lists openness
clauses; [map.<name>] defines piecewise maps; [ifs.<name>] groups maps
into systems; [cover.<name>] names open covers; [bounds] sets search
budgets.  Sets are written as expressions over the literals `X`, `empty`,
`atom:a`, `block:ODD[3]`, and bare block names, combined with `union`,
`inter`, `minus`, and the postfix `BLOCK cofinite-excluding [i, j]`.
The canonical renderer emits this same syntax, so reported sets can be
pasted back into configs.
"""

from __future__ import annotations

import re
import sys
import warnings
from dataclasses import dataclass, field
from typing import Mapping

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .bounds import Bounds
from .errors import ConfigError, ValidationError
from .ifs import IFS
from .maps import BlockRule, ConstRule, IdentityRule, PiecewiseMap
from .setalg import (
    Atom,
    BlockElem,
    GroundStructure,
    Point,
    SymbolicSet,
    enumerate_sets,
)
from .topology import (
    Avoids,
    CofiniteWithin,
    Meets,
    OpennessClause,
    Primitive,
    SubsetOf,
    TopologySpec,
)

__all__ = ["LabConfig", "parse_set", "parse_point", "load_config", "loads"]

_RESERVED = {
    "X",
    "empty",
    "union",
    "inter",
    "minus",
    "cofinite-excluding",
}
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")
_TOKEN_RE = re.compile(r"[()\[\],]|[^\s()\[\],]+")


@dataclass(frozen=True)
class LabConfig:
    """A validated laboratory: space, topology, named maps/systems/covers."""

    ground: GroundStructure
    topology: TopologySpec
    maps: Mapping[str, PiecewiseMap]
    systems: Mapping[str, IFS]
    covers: Mapping[str, tuple[SymbolicSet, ...]]
    bounds: Bounds
    source: str = field(default="<builtin>", compare=False)


# ---------------------------------------------------------------------------
# Set expressions
# ---------------------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str, where: str):
        self.text = text
        self.where = where
        self.toks = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]
        self.i = 0

    def error(self, message: str, pos: int | None = None) -> ConfigError:
        if pos is None:
            pos = self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)
        return ConfigError(f"{self.where}: column {pos + 1}: {message}")

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, int]:
        if self.i >= len(self.toks):
            raise self.error("unexpected end of expression")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, want: str) -> None:
        tok, pos = self.next()
        if tok != want:
            raise self.error(f"expected {want!r}, got {tok!r}", pos)

    def exhausted(self) -> bool:
        return self.i >= len(self.toks)


def _parse_int(ts: _Tokens) -> int:
    tok, pos = ts.next()
    if not tok.isdigit():
        raise ts.error(f"expected a block index, got {tok!r}", pos)
    value = int(tok)
    if value < 1:
        raise ts.error("block indices start at 1", pos)
    return value


def _parse_index_list(ts: _Tokens) -> list[int]:
    ts.expect("[")
    if ts.peek() == "]":
        ts.next()
        return []
    out = [_parse_int(ts)]
    while ts.peek() == ",":
        ts.next()
        out.append(_parse_int(ts))
    ts.expect("]")
    return out


def _parse_prim(ground: GroundStructure, ts: _Tokens) -> SymbolicSet:
    tok, pos = ts.next()
    if tok == "(":
        inner = _parse_expr(ground, ts)
        ts.expect(")")
        return inner
    if tok == "X":
        return ground.whole()
    if tok == "empty":
        return ground.empty()
    if tok.startswith("atom:"):
        name = tok[len("atom:") :]
        if name not in ground.atom_set:
            raise ts.error(f"unknown atom {name!r}", pos)
        return ground.singleton(Atom(name))
    if tok.startswith("block:"):
        name = tok[len("block:") :]
        if name not in ground.block_pos:
            raise ts.error(f"unknown block {name!r}", pos)
        index = _parse_index_list(ts)
        return ground.finite([BlockElem(name, i) for i in index])
    if tok in ground.block_pos:
        if ts.peek() == "cofinite-excluding":
            ts.next()
            return ground.cofinite_block(tok, _parse_index_list(ts))
        return ground.block_all(tok)
    raise ts.error(f"unrecognized token {tok!r}", pos)


def _parse_inter(ground: GroundStructure, ts: _Tokens) -> SymbolicSet:
    node = _parse_prim(ground, ts)
    while ts.peek() == "inter":
        ts.next()
        node = node.intersect(_parse_prim(ground, ts))
    return node


def _parse_diff(ground: GroundStructure, ts: _Tokens) -> SymbolicSet:
    node = _parse_inter(ground, ts)
    while ts.peek() == "minus":
        ts.next()
        node = node.difference(_parse_inter(ground, ts))
    return node


def _parse_expr(ground: GroundStructure, ts: _Tokens) -> SymbolicSet:
    node = _parse_diff(ground, ts)
    while ts.peek() == "union":
        ts.next()
        node = node.union(_parse_diff(ground, ts))
    return node


def parse_set(
    ground: GroundStructure, text: str, where: str = "set expression"
) -> SymbolicSet:
    ts = _Tokens(text, where)
    node = _parse_expr(ground, ts)
    if not ts.exhausted():
        raise ts.error("trailing input after expression")
    return node


def parse_point(ground: GroundStructure, text: str, where: str = "point") -> Point:
    ts = _Tokens(text, where)
    tok, pos = ts.next()
    if tok.startswith("atom:"):
        name = tok[len("atom:") :]
        if name not in ground.atom_set:
            raise ts.error(f"unknown atom {name!r}", pos)
        point: Point = Atom(name)
    elif tok.startswith("block:"):
        name = tok[len("block:") :]
        if name not in ground.block_pos:
            raise ts.error(f"unknown block {name!r}", pos)
        index = _parse_index_list(ts)
        if len(index) != 1:
            raise ts.error("a point names exactly one index", pos)
        point = BlockElem(name, index[0])
    else:
        raise ts.error(f"expected atom:NAME or block:NAME[i], got {tok!r}", pos)
    if not ts.exhausted():
        raise ts.error("trailing input after point")
    return point


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def _require(table: Mapping, key: str, kind: type, where: str):
    if key not in table:
        raise ConfigError(f"{where}: missing required key {key!r}")
    value = table[key]
    if not isinstance(value, kind):
        raise ConfigError(f"{where}: key {key!r} must be a {kind.__name__}")
    return value


def _load_space(data: Mapping) -> GroundStructure:
    table = _require(data, "space", dict, "config")
    atoms = _require(table, "atoms", list, "[space]")
    blocks = _require(table, "blocks", list, "[space]")
    for name in [*atoms, *blocks]:
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise ConfigError(f"[space]: invalid name {name!r}")
        if name in _RESERVED:
            raise ConfigError(f"[space]: name {name!r} is reserved")
    try:
        return GroundStructure(tuple(atoms), tuple(blocks))
    except ValidationError as exc:
        raise ConfigError(f"[space]: {exc}") from exc


_PRIMITIVES: dict[str, type] = {
    "subset-of": SubsetOf,
    "cofinite-within": CofiniteWithin,
    "meets": Meets,
    "avoids": Avoids,
}


def _parse_primitive(ground: GroundStructure, text: str, where: str) -> Primitive:
    head, _, rest = text.strip().partition(" ")
    if head not in _PRIMITIVES:
        raise ConfigError(
            f"{where}: unknown primitive {head!r}; expected one of "
            f"{sorted(_PRIMITIVES)}"
        )
    base = parse_set(ground, rest, where)
    try:
        return _PRIMITIVES[head](base)
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _load_topology(ground: GroundStructure, data: Mapping, strict: bool) -> TopologySpec:
    table = _require(data, "topology", dict, "config")
    clause_rows = _require(table, "clauses", list, "[topology]")
    clauses = []
    for ci, row in enumerate(clause_rows, start=1):
        if not isinstance(row, list) or not row:
            raise ConfigError(
                f"[topology]: clause {ci} must be a nonempty list of primitives"
            )
        prims = tuple(
            _parse_primitive(ground, item, f"[topology] clause {ci} conjunct {pi}")
            for pi, item in enumerate(row, start=1)
        )
        clauses.append(OpennessClause(prims))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        topology = TopologySpec(ground, tuple(clauses))
    for w in caught:
        if strict:
            raise ConfigError(f"[topology]: {w.message}")
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    return topology


def _load_map(
    ground: GroundStructure, name: str, table: Mapping
) -> PiecewiseMap:
    where = f"[map.{name}]"
    atoms_table = _require(table, "atoms", dict, where)
    blocks_table = _require(table, "blocks", dict, where)
    atom_rules = {
        atom: parse_point(ground, spec, f"{where} atom {atom!r}")
        for atom, spec in atoms_table.items()
    }
    block_rules: dict[str, BlockRule] = {}
    for block, spec in blocks_table.items():
        rule_where = f"{where} block {block!r}"
        if not isinstance(spec, str):
            raise ConfigError(f"{rule_where}: rule must be a string")
        head, _, rest = spec.strip().partition(" ")
        if head == "identity":
            dst = rest.strip()
            if dst not in ground.block_pos:
                raise ConfigError(f"{rule_where}: unknown destination block {dst!r}")
            block_rules[block] = IdentityRule(dst)
        elif head == "const":
            block_rules[block] = ConstRule(parse_point(ground, rest, rule_where))
        else:
            raise ConfigError(
                f"{rule_where}: rule must start with 'identity' or 'const'"
            )
    overrides: dict[tuple[str, int], Point] = {}
    for row in table.get("overrides", []):
        row_where = f"{where} override {row!r}"
        if not (isinstance(row, list) and len(row) == 3):
            raise ConfigError(f"{row_where}: expected [block, index, point]")
        block, index, target = row
        if not isinstance(block, str) or not isinstance(index, int):
            raise ConfigError(f"{row_where}: expected [block, index, point]")
        key = (block, index)
        if key in overrides:
            raise ConfigError(f"{row_where}: duplicate override key")
        overrides[key] = parse_point(ground, target, row_where)
    try:
        return PiecewiseMap.build(ground, atom_rules, block_rules, overrides)
    except ValidationError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _sample_topology_axioms(topology: TopologySpec, strict: bool) -> None:
    """Spot-check closure of openness under pairwise union and intersection."""
    sample = []
    for s in enumerate_sets(topology.ground, 2, 1):
        sample.append(s)
        if len(sample) >= 60:
            break
    opens = [s for s in sample if topology.is_open(s)]
    for x in opens:
        for y in opens:
            for combined, op in ((x.union(y), "union"), (x.intersect(y), "intersection")):
                if not topology.is_open(combined):
                    message = (
                        f"openness is not closed under {op} on sampled sets "
                        f"({x!r} and {y!r}); the clause list does not define "
                        "a topology"
                    )
                    if strict:
                        raise ConfigError(f"[topology]: {message}")
                    warnings.warn(message, stacklevel=3)
                    return


def loads(text: str, source: str = "<config>", strict: bool = False) -> LabConfig:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    ground = _load_space(data)
    topology = _load_topology(ground, data, strict)
    _sample_topology_axioms(topology, strict)

    maps = {
        name: _load_map(ground, name, table)
        for name, table in data.get("map", {}).items()
    }
    systems = {}
    for name, table in data.get("ifs", {}).items():
        where = f"[ifs.{name}]"
        names = _require(table, "maps", list, where)
        members = []
        for member in names:
            if member not in maps:
                raise ConfigError(f"{where}: unknown map {member!r}")
            members.append(maps[member])
        try:
            systems[name] = IFS(tuple(members))
        except ValidationError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    covers = {}
    for name, table in data.get("cover", {}).items():
        where = f"[cover.{name}]"
        exprs = _require(table, "sets", list, where)
        members = tuple(
            parse_set(ground, e, f"{where} set {i}")
            for i, e in enumerate(exprs, start=1)
        )
        if not topology.cover_check(members):
            raise ConfigError(
                f"{where}: the listed sets are not an open cover of the space"
            )
        covers[name] = members

    bounds_table = data.get("bounds", {})
    keymap = {
        "max-exceptions": "max_exceptions",
        "max-index": "max_index",
        "samples": "samples",
        "n-max": "n_max",
        "neighborhoods": "neighborhoods",
    }
    kwargs = {}
    for key, value in bounds_table.items():
        if key not in keymap:
            raise ConfigError(f"[bounds]: unknown key {key!r}")
        if not isinstance(value, int):
            raise ConfigError(f"[bounds]: key {key!r} must be an integer")
        kwargs[keymap[key]] = value
    try:
        bounds = Bounds(**kwargs)
    except ValidationError as exc:
        raise ConfigError(f"[bounds]: {exc}") from exc

    return LabConfig(ground, topology, maps, systems, covers, bounds, source)


def load_config(path: str, strict: bool = False) -> LabConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return loads(text, source=path, strict=strict)
