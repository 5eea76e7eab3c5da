"""Canonical text rendering of points and sets.

The output uses the same expression syntax the config files use, so every
rendered set parses back to an equal value (see :mod:`ifslab.config`).
"""

from __future__ import annotations

from .setalg import Atom, Point, SymbolicSet


def format_point(p: Point) -> str:
    if isinstance(p, Atom):
        return f"atom:{p.name}"
    return f"block:{p.block}[{p.index}]"


def format_set(s: SymbolicSet) -> str:
    if s.is_empty():
        return "empty"
    if s == s.ground.whole():
        return "X"
    pieces: list[str] = []
    for name in s.ground.atoms:
        if name in s.atoms_in:
            pieces.append(f"atom:{name}")
    for bi, name in enumerate(s.ground.blocks):
        cof, idx = s.parts[bi]
        if cof:
            if idx:
                pieces.append(
                    f"{name} cofinite-excluding [{', '.join(str(i) for i in sorted(idx))}]"
                )
            else:
                pieces.append(name)
        else:
            pieces.extend(f"block:{name}[{i}]" for i in sorted(idx))
    return " union ".join(pieces)
