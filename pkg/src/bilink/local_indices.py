"""Common neighbours, local community links and the local link-prediction indices.

A common neighbour (CN) of a left seed ``x`` and a right seed ``y`` is a
node lying on a quadrangle ``x - b - a - y``: the right node ``b`` is
adjacent to ``x`` and the left node ``a`` to ``y``. The edges ``(a, b)``
closing those quadrangles are the local community links (LCL); their
number equals the number of length-3 paths between the seeds.

For adjacent seeds the seeds are excluded from each other's neighbourhood
so that only proper 4-cycles count (``exclude_seeds=True``). The
alternative ``exclude_seeds=False`` keeps the degenerate walks through the
seed edge itself; it is only used by the LCP decomposition statistics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _kernels
from .bigraph import BipartiteGraph, _check_pair


class IndexKind(str, enum.Enum):
    CN = "cn"
    JC = "jc"
    AA = "aa"
    RA = "ra"
    PA = "pa"
    LCL = "lcl"
    CAR = "car"
    CJC = "cjc"
    CAA = "caa"
    CRA = "cra"
    CPA = "cpa"

    @classmethod
    def parse(cls, name) -> "IndexKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown local index {name!r}; "
                             f"valid: {', '.join(k.value for k in cls)}") from None


LCP_KINDS = (IndexKind.CAR, IndexKind.CJC, IndexKind.CAA, IndexKind.CRA,
             IndexKind.CPA, IndexKind.LCL)
CLASSICAL_KINDS = (IndexKind.CN, IndexKind.JC, IndexKind.AA, IndexKind.RA,
                   IndexKind.PA)


@dataclass(frozen=True)
class LocalCommunity:
    seed_left: int
    seed_right: int
    cn_right: np.ndarray
    cn_left: np.ndarray
    gamma_right: np.ndarray
    gamma_left: np.ndarray
    lcl: int

    @property
    def cn(self) -> int:
        return len(self.cn_left) + len(self.cn_right)

    def gamma(self) -> dict:
        """Local community degree keyed by ``("left"|"right", index)``."""
        out = {("right", int(b)): int(k) for b, k in zip(self.cn_right, self.gamma_right)}
        out.update({("left", int(a)): int(k) for a, k in zip(self.cn_left, self.gamma_left)})
        return out


def local_community(g: BipartiteGraph, x: int, y: int,
                    exclude_seeds: bool = True) -> LocalCommunity:
    """Common neighbours and local community links of left ``x`` and right ``y``."""
    _check_pair(g, x, y)
    nx_ = g.adj_left(x)
    ny_ = g.adj_right(y)
    if exclude_seeds:
        nx_ = nx_[nx_ != y]
        ny_ = ny_[ny_ != x]
    gamma_r = np.array([len(np.intersect1d(g.adj_right(b), ny_, assume_unique=True))
                        for b in nx_], dtype=np.int64)
    gamma_l = np.array([len(np.intersect1d(g.adj_left(a), nx_, assume_unique=True))
                        for a in ny_], dtype=np.int64)
    keep_r = gamma_r > 0
    keep_l = gamma_l > 0
    lcl = int(gamma_r.sum())
    assert lcl == int(gamma_l.sum())
    return LocalCommunity(int(x), int(y), nx_[keep_r], ny_[keep_l],
                          gamma_r[keep_r], gamma_l[keep_l], lcl)


def _from_counts(kind, dx, dy, cn_l, cn_r, lcl, aa, ra, caa, cra):
    """Index values from the per-pair community summaries (scalars or arrays)."""
    cn = cn_l + cn_r
    union = dx + dy
    if kind is IndexKind.CN:
        return cn * 1.0
    if kind is IndexKind.JC:
        return np.where(union > 0, cn / np.maximum(union, 1), 0.0)
    if kind is IndexKind.AA:
        return aa
    if kind is IndexKind.RA:
        return ra
    if kind is IndexKind.PA:
        return dx * dy * 1.0
    if kind is IndexKind.LCL:
        return lcl * 1.0
    car = cn * lcl
    if kind is IndexKind.CAR:
        return car * 1.0
    if kind is IndexKind.CJC:
        return np.where(union > 0, car / np.maximum(union, 1), 0.0)
    if kind is IndexKind.CAA:
        return caa
    if kind is IndexKind.CRA:
        return cra
    if kind is IndexKind.CPA:
        ex = dx - cn_r
        ey = dy - cn_l
        return (ex * ey + ex * car + ey * car + car * car) * 1.0
    raise ValueError(kind)


def score(kind, g: BipartiteGraph, x: int, y: int) -> float:
    """Score the pair (left ``x``, right ``y``) with one local index."""
    kind = IndexKind.parse(kind)
    lc = local_community(g, x, y)
    dx = len(g.adj_left(x))
    dy = len(g.adj_right(y))
    deg_r = g.right_degrees[lc.cn_right]
    deg_l = g.left_degrees[lc.cn_left]
    degs = np.concatenate([deg_r, deg_l])
    gammas = np.concatenate([lc.gamma_right, lc.gamma_left])
    assert np.all(degs >= 2), "common neighbour with degree < 2"
    aa = float(sum(1.0 / math.log2(d) for d in degs))
    ra = float(sum(1.0 / d for d in degs))
    caa = float(sum(k / math.log2(d) for k, d in zip(gammas, degs)))
    cra = float(sum(k / d for k, d in zip(gammas, degs)))
    val = _from_counts(kind, dx, dy, len(lc.cn_left), len(lc.cn_right), lc.lcl,
                       aa, ra, caa, cra)
    return float(val)


@dataclass(frozen=True)
class CommunityTables:
    """Dense per-pair community summaries for all ``n_left x n_right`` pairs.

    Entries for adjacent pairs follow the seed-exclusion rule.
    """

    deg_left: np.ndarray
    deg_right: np.ndarray
    cn_left: np.ndarray
    cn_right: np.ndarray
    lcl: np.ndarray
    aa: np.ndarray
    ra: np.ndarray
    caa: np.ndarray
    cra: np.ndarray

    def index(self, kind) -> np.ndarray:
        kind = IndexKind.parse(kind)
        dx = self.deg_left[:, None]
        dy = self.deg_right[None, :]
        val = _from_counts(kind, dx, dy, self.cn_left, self.cn_right, self.lcl,
                           self.aa, self.ra, self.caa, self.cra)
        return np.broadcast_to(val, self.lcl.shape).astype(np.float64)


def community_tables(g: BipartiteGraph) -> CommunityTables:
    """Compute :class:`CommunityTables` with one pass per partition."""
    shape = g.shape
    cn_l = np.zeros(shape, np.int64)
    cn_r = np.zeros(shape, np.int64)
    lcl = np.zeros(shape, np.int64)
    aa = np.zeros(shape, np.float64)
    ra = np.zeros(shape, np.float64)
    caa = np.zeros(shape, np.float64)
    cra = np.zeros(shape, np.float64)
    deg_l = g.left_degrees.astype(np.int64)
    deg_r = g.right_degrees.astype(np.int64)
    # left-partition CNs a in N(y): rows run over left seeds x
    _kernels.community_side(g.left_indptr, g.left_indices, g.right_indptr,
                            g.right_indices, deg_l, cn_l, lcl, aa, ra, caa, cra,
                            False, True, False)
    # right-partition CNs b in N(x): rows run over right seeds y
    _kernels.community_side(g.right_indptr, g.right_indices, g.left_indptr,
                            g.left_indices, deg_r, cn_r, lcl, aa, ra, caa, cra,
                            True, False, False)
    return CommunityTables(deg_l, deg_r, cn_l, cn_r, lcl, aa, ra, caa, cra)


def score_matrix(kind, g: BipartiteGraph, tables: CommunityTables | None = None) -> np.ndarray:
    """Dense ``n_left x n_right`` matrix of index values for every pair."""
    if tables is None:
        tables = community_tables(g)
    return tables.index(kind)


def score_all(kind, g: BipartiteGraph, pairs: Iterable, tables=None) -> np.ndarray:
    """Scores aligned with ``pairs`` (an iterable or ``(k, 2)`` array)."""
    kind = IndexKind.parse(kind)
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                     dtype=np.int64).reshape(-1, 2)
    if len(arr) == 0:
        return np.zeros(0)
    if arr[:, 0].min() < 0 or arr[:, 0].max() >= g.n_left \
            or arr[:, 1].min() < 0 or arr[:, 1].max() >= g.n_right:
        raise ValueError("pair index out of range")
    mat = score_matrix(kind, g, tables)
    return mat[arr[:, 0], arr[:, 1]]
