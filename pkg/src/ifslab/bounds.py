"""Shared search-budget parameters for bounded verification."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

DEFAULT_SEED = 7919


@dataclass(frozen=True)
class Bounds:
    """Budgets for bounded-exhaustive searches and sampled checks.

    max_index and max_exceptions bound the shape grammar (per-block index
    lists over 1..max_index of size at most max_exceptions), samples the
    number of random candidates drawn on top, n_max the iteration depth
    for chains and image collections, neighborhoods the number of basis
    neighborhoods enumerated in hyperspace reports.
    """

    max_exceptions: int = 3
    max_index: int = 8
    samples: int = 500
    n_max: int = 16
    neighborhoods: int = 24

    def __post_init__(self) -> None:
        for name in ("max_exceptions", "max_index", "samples", "n_max", "neighborhoods"):
            if getattr(self, name) < 1:
                raise ValidationError(f"bound {name} must be positive")
