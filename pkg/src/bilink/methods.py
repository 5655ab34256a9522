"""Registry of scoring methods available to the evaluator and the CLI."""

from __future__ import annotations

import zlib

import numpy as np

from .bigraph import BipartiteGraph
from .local_indices import CLASSICAL_KINDS, LCP_KINDS, CommunityTables, IndexKind, community_tables
from .projection import BASELINE_METHODS, baseline_matrix

LOCAL_METHODS = tuple(k.value for k in IndexKind)
RANDOM = "random"
ALL_METHODS = LOCAL_METHODS + BASELINE_METHODS + (RANDOM,)

METHOD_CLASSES = {
    "lcp": tuple(k.value for k in LCP_KINDS),
    "classical": tuple(k.value for k in CLASSICAL_KINDS),
    "projection": BASELINE_METHODS,
}


def method_key(name: str) -> int:
    """Stable 32-bit integer identifying a method name (used in seeding)."""
    return zlib.crc32(name.encode("utf-8"))


def validate_methods(names) -> list[str]:
    out = []
    for name in names:
        key = str(name).strip().lower()
        if key not in ALL_METHODS:
            raise ValueError(f"unknown method {name!r}; valid: {', '.join(ALL_METHODS)}")
        out.append(key)
    return out


class Scorer:
    """Score matrices for many methods over one observed graph.

    The local-index tables are computed once and shared by all local methods.
    """

    def __init__(self, g: BipartiteGraph, side: str = "left"):
        self.g = g
        self.side = side
        self._tables: CommunityTables | None = None

    @property
    def tables(self) -> CommunityTables:
        if self._tables is None:
            self._tables = community_tables(self.g)
        return self._tables

    def matrix(self, method: str, rng: np.random.Generator | None = None) -> np.ndarray:
        if method in LOCAL_METHODS:
            return self.tables.index(method)
        if method in BASELINE_METHODS:
            return baseline_matrix(method, self.g, self.side)
        if method == RANDOM:
            if rng is None:
                raise ValueError("the random method needs a generator")
            return rng.random(self.g.shape)
        raise ValueError(f"unknown method {method!r}")
