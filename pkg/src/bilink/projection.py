"""One-mode-projection baselines: profile-vector similarity and NBI (ProbS).

Each left node is represented by its binary incidence row over the right
partition. A candidate pair ``(x, y)`` is scored by summing the similarity
of ``x``'s profile to the profiles of the left nodes already linked to
``y``. NBI spreads a unit of resource from each neighbour of ``x`` to the
left partition and back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bigraph import BipartiteGraph, _check_pair


class SimilarityKind(str, enum.Enum):
    JACCARD = "jac"
    COSINE = "cos"
    EUCLIDEAN = "euc"
    PEARSON = "pea"

    @classmethod
    def parse(cls, name) -> "SimilarityKind":
        if isinstance(name, cls):
            return name
        aliases = {"jaccard": "jac", "cosine": "cos", "euclidean": "euc", "pearson": "pea"}
        key = str(name).lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown similarity {name!r}") from None


_KIND_CODE = {SimilarityKind.JACCARD: 0, SimilarityKind.COSINE: 1,
              SimilarityKind.EUCLIDEAN: 2, SimilarityKind.PEARSON: 3}

BASELINE_METHODS = ("nbi", "jac", "cos", "euc", "pea")


@dataclass(frozen=True)
class ProfileVector:
    owner: int
    support: np.ndarray
    dim: int


def profile(g: BipartiteGraph, x: int) -> ProfileVector:
    """Incidence row of left node ``x``."""
    return ProfileVector(int(x), g.adj_left(x), g.n_right)


def pair_similarity(kind, u: ProfileVector, v: ProfileVector, dim: int | None = None) -> float:
    """Similarity of two binary profiles from their supports.

    Euclidean distance ``d`` is mapped to ``1 / (1 + d)``; Pearson uses the
    closed form for binary vectors and is 0 when either vector is constant.
    """
    kind = SimilarityKind.parse(kind)
    if dim is None:
        dim = u.dim
    if u.dim != dim or v.dim != dim:
        raise ValueError(f"dimension mismatch: {u.dim}, {v.dim} vs {dim}")
    inter = len(np.intersect1d(u.support, v.support, assume_unique=True))
    du, dv = len(u.support), len(v.support)
    if kind is SimilarityKind.JACCARD:
        union = du + dv - inter
        return inter / union if union else 0.0
    if kind is SimilarityKind.COSINE:
        return inter / math.sqrt(du * dv) if du and dv else 0.0
    if kind is SimilarityKind.EUCLIDEAN:
        return 1.0 / (1.0 + math.sqrt(du + dv - 2 * inter))
    if du in (0, dim) or dv in (0, dim):
        return 0.0
    return (dim * inter - du * dv) / math.sqrt(du * (dim - du) * 1.0 * dv * (dim - dv))


def similarity_score(kind, g: BipartiteGraph, x: int, y: int) -> float:
    _check_pair(g, x, y)
    px = profile(g, x)
    return float(sum(pair_similarity(kind, px, profile(g, a), g.n_right)
                     for a in g.adj_right(y)))


def nbi_score(g: BipartiteGraph, x: int, y: int) -> float:
    """Resource reaching right node ``y`` after spreading from ``N(x)``."""
    _check_pair(g, x, y)
    nx_ = g.adj_left(x)
    total = 0.0
    for a in g.adj_right(y):
        shared = np.intersect1d(nx_, g.adj_left(a), assume_unique=True)
        if len(shared):
            total += float(np.sum(1.0 / g.right_degrees[shared])) / len(g.adj_left(a))
    return total


def baseline_matrix(method: str, g: BipartiteGraph, side: str = "left") -> np.ndarray:
    """Dense ``n_left x n_right`` score matrix for ``nbi`` or a similarity.

    ``side="right"`` uses right-partition profiles (and spreads NBI resource
    from the right seed) by scoring the transposed graph.
    """
    if side == "right":
        return baseline_matrix(method, g.transpose()).T.copy()
    if side != "left":
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    out = np.zeros(g.shape, np.float64)
    deg_l = g.left_degrees.astype(np.int64)
    if method == "nbi":
        _kernels.nbi_rows(g.left_indptr, g.left_indices, g.right_indptr,
                          g.right_indices, deg_l, g.right_degrees.astype(np.int64), out)
        return out
    kind = SimilarityKind.parse(method)
    _kernels.similarity_rows(g.left_indptr, g.left_indices, g.right_indptr,
                             g.right_indices, deg_l, g.n_right, _KIND_CODE[kind], out)
    return out


def score_all_baseline(method: str, g: BipartiteGraph, pairs, side: str = "left") -> np.ndarray:
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                     dtype=np.int64).reshape(-1, 2)
    if len(arr) == 0:
        return np.zeros(0)
    mat = baseline_matrix(method, g, side)
    return mat[arr[:, 0], arr[:, 1]]
