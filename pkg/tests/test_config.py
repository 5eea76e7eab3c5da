"""Config loading, the set-expression grammar, and rendering round trips."""

from __future__ import annotations

import warnings

import pytest
from hypothesis import given

from ifslab.config import load_config, loads, parse_point, parse_set
from ifslab.errors import ConfigError
from ifslab.instances import parity_lab
from ifslab.render import format_point, format_set
from ifslab.setalg import Atom, BlockElem

from conftest import G, points, symbolic_sets

STANDARD = "configs/standard.toml"


def minimal_config(extra: str = "") -> str:
    return (
        """
[space]
atoms = ["a", "b"]
blocks = ["ODD", "EVEN"]

[topology]
clauses = [
  ["subset-of ODD"],
  ["subset-of ODD union EVEN", "cofinite-within ODD"],
  ["meets atom:a union atom:b", "cofinite-within X"],
]
"""
        + extra
    )


# --- the bundled file matches the built-in instance ---


def test_standard_config_equals_the_builtin_lab():
    loaded = load_config(STANDARD)
    lab = parity_lab()
    assert loaded.ground == lab.ground
    assert loaded.topology == lab.topology
    assert loaded.maps == lab.maps
    assert loaded.systems == lab.systems
    assert loaded.covers == lab.covers
    assert loaded.bounds == lab.bounds
    assert loaded == lab  # source is excluded from comparison
    assert loaded.source == STANDARD


def test_standard_config_loads_strict():
    assert load_config(STANDARD, strict=True) == parity_lab()


# --- expression grammar ---


def test_expression_precedence_and_parens(ground):
    odd = ground.block_all("ODD")
    even = ground.block_all("EVEN")
    a = ground.singleton(Atom("a"))
    assert parse_set(ground, "X") == ground.whole()
    assert parse_set(ground, "empty") == ground.empty()
    assert parse_set(ground, "ODD union EVEN") == odd.union(even)
    assert parse_set(ground, "X minus ODD union EVEN") == ground.whole().difference(
        odd
    ).union(even)
    assert parse_set(ground, "X minus (ODD union EVEN)") == ground.whole().difference(
        odd.union(even)
    )
    assert parse_set(ground, "ODD inter X minus atom:a") == odd
    assert parse_set(ground, "block:EVEN[3] union atom:a") == ground.finite(
        [BlockElem("EVEN", 3), Atom("a")]
    )
    assert parse_set(ground, "EVEN cofinite-excluding [2, 4]") == ground.cofinite_block(
        "EVEN", (2, 4)
    )
    assert parse_set(ground, "EVEN cofinite-excluding []") == even


def test_expression_errors(ground):
    for text in (
        "",
        "X X",
        "(X",
        "atom:zzz",
        "block:ODD",
        "block:ODD[0]",
        "NOPE",
        "X cofinite-excluding [1]",
        "ODD union",
        "ODD cofinite-excluding [1,]",
    ):
        with pytest.raises(ConfigError):
            parse_set(ground, text)


def test_point_parsing(ground):
    assert parse_point(ground, "atom:b") == Atom("b")
    assert parse_point(ground, "block:ODD[7]") == BlockElem("ODD", 7)
    for text in ("atom:zzz", "block:NOPE[1]", "block:ODD[1][2]", "ODD", "block:ODD[1,2]"):
        with pytest.raises(ConfigError):
            parse_point(ground, text)


# --- rendering round trips ---


@given(symbolic_sets())
def test_format_parse_round_trip(a):
    assert parse_set(G, format_set(a)) == a


@given(points())
def test_point_round_trip(p):
    assert parse_point(G, format_point(p)) == p


def test_render_spot_values(ground):
    assert format_set(ground.empty()) == "empty"
    assert format_set(ground.whole()) == "X"
    assert format_point(Atom("a")) == "atom:a"
    assert format_point(BlockElem("ODD", 3)) == "block:ODD[3]"


# --- section errors ---


def test_space_errors():
    with pytest.raises(ConfigError, match="missing required key"):
        loads("[topology]\nclauses = []")
    with pytest.raises(ConfigError, match="reserved"):
        loads('[space]\natoms = ["X"]\nblocks = ["B"]\n[topology]\nclauses = [["subset-of X"]]')
    with pytest.raises(ConfigError, match="invalid name"):
        loads('[space]\natoms = ["has space"]\nblocks = []\n[topology]\nclauses = []')
    with pytest.raises(ConfigError, match="distinct"):
        loads('[space]\natoms = ["a", "a"]\nblocks = []\n[topology]\nclauses = [["subset-of X"]]')


def test_topology_errors():
    with pytest.raises(ConfigError, match="unknown primitive"):
        loads(minimal_config().replace("subset-of ODD", "subsetted-by ODD"))
    with pytest.raises(ConfigError, match="unsatisfiable|Meets"):
        loads(minimal_config().replace("meets atom:a union atom:b", "meets empty"))
    with pytest.raises(ConfigError, match="nonempty list"):
        loads(minimal_config().replace('["subset-of ODD"],', "[],"))


def test_not_a_topology_warns_by_default_and_fails_strict():
    text = """
[space]
atoms = ["a"]
blocks = ["B"]

[topology]
clauses = [["subset-of B"]]
"""
    with pytest.warns(UserWarning, match="whole space"):
        loads(text)
    with pytest.raises(ConfigError, match="whole space"):
        loads(text, strict=True)


def test_union_axiom_violation_warns_and_fails_strict():
    # Singletons from each block are open, but their union satisfies no
    # clause, so sampling catches a finite-union failure.
    text = """
[space]
atoms = ["a"]
blocks = ["ODD", "EVEN"]

[topology]
clauses = [
  ["subset-of ODD"],
  ["subset-of EVEN"],
  ["cofinite-within X", "meets atom:a"],
]
"""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        loads(text)
    assert any("union" in str(w.message) for w in caught)
    with pytest.raises(ConfigError, match="union"):
        loads(text, strict=True)


def test_map_errors():
    base = minimal_config(
        """
[map.m]
atoms = { a = "atom:a", b = "atom:a" }
blocks = { ODD = "const atom:a", EVEN = "const atom:a" }
"""
    )
    loads(base)
    with pytest.raises(ConfigError, match="cover exactly|missing"):
        loads(base.replace('b = "atom:a" }', "}"))
    with pytest.raises(ConfigError, match="unknown destination"):
        loads(base.replace("const atom:a", "identity NOPE", 1))
    with pytest.raises(ConfigError, match="rule"):
        loads(base.replace("const atom:a", "collapse atom:a", 1))
    with pytest.raises(ConfigError):
        loads(base.replace('a = "atom:a"', 'a = "atom:zzz"'))


def test_override_errors():
    base = minimal_config(
        """
[map.m]
atoms = { a = "atom:a", b = "atom:a" }
blocks = { ODD = "const atom:a", EVEN = "const atom:a" }
overrides = [["EVEN", 2, "atom:b"]]
"""
    )
    assert loads(base).maps["m"].apply(BlockElem("EVEN", 2)) == Atom("b")
    with pytest.raises(ConfigError, match="expected"):
        loads(base.replace('[["EVEN", 2, "atom:b"]]', '[["EVEN", 2]]'))
    with pytest.raises(ConfigError, match="duplicate"):
        loads(
            base.replace(
                '[["EVEN", 2, "atom:b"]]',
                '[["EVEN", 2, "atom:b"], ["EVEN", 2, "atom:a"]]',
            )
        )
    with pytest.raises(ConfigError):
        loads(base.replace('"EVEN", 2', '"EVEN", 0'))


def test_system_and_cover_errors():
    with pytest.raises(ConfigError, match="unknown map"):
        loads(minimal_config('[ifs.s]\nmaps = ["ghost"]\n'))
    with pytest.raises(ConfigError, match="at least one map"):
        loads(minimal_config("[ifs.s]\nmaps = []\n"))
    with pytest.raises(ConfigError, match="not an open cover"):
        loads(minimal_config('[cover.c]\nsets = ["X minus atom:a"]\n'))
    with pytest.raises(ConfigError, match="not an open cover"):
        loads(minimal_config('[cover.c]\nsets = ["atom:a", "X"]\n'))
    good = loads(minimal_config('[cover.c]\nsets = ["X minus atom:a", "X minus atom:b"]\n'))
    assert len(good.covers["c"]) == 2


def test_bounds_errors():
    with pytest.raises(ConfigError, match="unknown key"):
        loads(minimal_config("[bounds]\nmystery = 3\n"))
    with pytest.raises(ConfigError, match="integer"):
        loads(minimal_config('[bounds]\nmax-index = "eight"\n'))
    with pytest.raises(ConfigError):
        loads(minimal_config("[bounds]\nmax-index = 0\n"))
    cfg = loads(minimal_config("[bounds]\nmax-index = 5\nsamples = 10\n"))
    assert cfg.bounds.max_index == 5 and cfg.bounds.samples == 10


def test_toml_and_io_errors(tmp_path):
    with pytest.raises(ConfigError, match="<config>"):
        loads("not = [valid")
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "missing.toml"))
