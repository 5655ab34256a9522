"""LCP decomposition and basic topological statistics of bipartite graphs."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy import sparse

from . import _kernels
from .bigraph import BipartiteGraph
from .stats import pearson_corr, spearman_corr

# LCP-DP conventions for the seed edge itself
PROPER = "proper"        # seeds excluded: only proper 4-cycles through (x, y)
INCLUSIVE = "inclusive"  # walks through the seed edge kept; reproduces published LCP-corr


@dataclass(frozen=True)
class LcpPoint:
    left: int
    right: int
    cn: int
    lcl: int


@dataclass(frozen=True)
class LcpDecomposition:
    edges: np.ndarray
    cn: np.ndarray
    lcl: np.ndarray
    convention: str

    def __len__(self):
        return len(self.edges)

    def points(self) -> list[LcpPoint]:
        return [LcpPoint(int(a), int(b), int(c), int(k))
                for (a, b), c, k in zip(self.edges, self.cn, self.lcl)]

    @property
    def pearson(self) -> float:
        return pearson_corr(self.cn, self.lcl) if len(self) >= 2 else float("nan")

    @property
    def spearman(self) -> float:
        return spearman_corr(self.cn, self.lcl) if len(self) >= 2 else float("nan")


def lcp_decomposition(g: BipartiteGraph, convention: str = PROPER) -> LcpDecomposition:
    """One (CN, LCL) point per existing edge, in canonical edge order.

    With ``convention="proper"`` each edge is treated as an adjacent seed
    pair whose members are removed from each other's neighbourhood, so only
    genuine 4-cycles through the edge count. ``"inclusive"`` keeps the seed
    edge: every neighbour of either seed becomes a CN
    (``cn = deg(x) + deg(y)``) and every edge between ``N(x)`` and ``N(y)``,
    the seed edge included, is an LCL.
    """
    if convention not in (PROPER, INCLUSIVE):
        raise ValueError(f"unknown convention {convention!r}")
    edges = g.edge_array()
    shape = g.shape
    cn = np.zeros(shape, np.int64)
    lcl = np.zeros(shape, np.int64)
    scratch = [np.zeros(shape, np.float64) for _ in range(4)]
    deg_l = g.left_degrees.astype(np.int64)
    deg_r = g.right_degrees.astype(np.int64)
    _kernels.community_side(g.left_indptr, g.left_indices, g.right_indptr,
                            g.right_indices, deg_l, cn, lcl, *scratch, False, True, True)
    _kernels.community_side(g.right_indptr, g.right_indices, g.left_indptr,
                            g.left_indices, deg_r, cn, lcl, *scratch, True, False, True)
    e_cn = cn[edges[:, 0], edges[:, 1]]
    e_lcl = lcl[edges[:, 0], edges[:, 1]]
    if convention == INCLUSIVE:
        dx = deg_l[edges[:, 0]]
        dy = deg_r[edges[:, 1]]
        e_cn = dx + dy
        e_lcl = e_lcl + dx + dy - 1
    return LcpDecomposition(edges, e_cn, e_lcl, convention)


def _cooccurrence_blocks(x: sparse.csr_matrix, block: int = 2048):
    """Yield ``(start, W_block)`` with ``W = X X^T``, diagonal removed."""
    xt = x.T.tocsc()
    n = x.shape[0]
    for start in range(0, n, block):
        w = (x[start:start + block] @ xt).tocoo()
        keep = w.row + start != w.col
        yield start, w.row[keep] + start, w.col[keep], w.data[keep]


def latapy_clustering(g: BipartiteGraph) -> float:
    """Average node clustering of Latapy, Magnien and Del Vecchio.

    The pair coefficient of same-partition nodes ``u, v`` at distance 2 is
    ``|N(u) & N(v)| / |N(u) | N(v)|``. Each node takes the mean over its
    distance-2 neighbours; the result is the mean over nodes that have any.
    """
    a = g.biadjacency().astype(np.int64)
    node_cc = []
    for x in (a, a.T.tocsr()):
        deg = np.asarray(x.sum(axis=1)).ravel()
        sums = np.zeros(x.shape[0])
        counts = np.zeros(x.shape[0], np.int64)
        for _, rows, cols, shared in _cooccurrence_blocks(x):
            cc = shared / (deg[rows] + deg[cols] - shared)
            np.add.at(sums, rows, cc)
            np.add.at(counts, rows, 1)
        has = counts > 0
        node_cc.append(sums[has] / counts[has])
    allcc = np.concatenate(node_cc)
    return float(allcc.mean()) if len(allcc) else 0.0


def robins_alexander_clustering(g: BipartiteGraph) -> float:
    """Four times the number of 4-cycles over the number of 3-paths."""
    a = g.biadjacency().astype(np.int64)
    x = a if g.n_left <= g.n_right else a.T.tocsr()
    c4 = 0
    for _, _, _, shared in _cooccurrence_blocks(x):
        c4 += int(np.sum(shared * (shared - 1) // 2))
    c4 //= 2  # each unordered node pair appears twice
    edges = g.edge_array()
    dl = g.left_degrees[edges[:, 0]].astype(np.int64)
    dr = g.right_degrees[edges[:, 1]].astype(np.int64)
    l3 = int(np.sum((dl - 1) * (dr - 1)))
    return 4.0 * c4 / l3 if l3 else 0.0


def _unipartite_csr(g: BipartiteGraph):
    """Adjacency of the whole graph, right node ``j`` relabelled ``n_left + j``."""
    ptr = np.concatenate([g.left_indptr, g.right_indptr[1:] + g.m])
    idx = np.concatenate([g.left_indices + g.n_left, g.right_indices])
    return ptr.astype(np.int64), idx.astype(np.int64)


def betweenness(g: BipartiteGraph, block: int = 64) -> np.ndarray:
    """Normalised betweenness of every node (left nodes first).

    Brandes' accumulation over all sources; values are divided by
    ``(n-1)(n-2)/2``, the number of node pairs excluding the node itself.
    """
    n = g.n_left + g.n_right
    if n < 3:
        return np.zeros(n)
    ptr, idx = _unipartite_csr(g)
    raw = _kernels.brandes_blocks(ptr, idx, block)
    # each unordered pair is counted from both ends
    return raw / 2.0 / ((n - 1) * (n - 2) / 2.0)


def avg_betweenness(g: BipartiteGraph) -> float:
    b = betweenness(g)
    return float(b.mean()) if len(b) else 0.0


@dataclass
class TopoStats:
    """Table-style summary of one network.

    ``avg_degree`` is ``m / (n_left + n_right)``, the convention of the
    published statistics table; ``mean_degree`` is the usual ``2m / n``.
    ``lcp_pearson``/``lcp_spearman`` use the inclusive LCP convention,
    the ``*_proper`` fields the proper-quadrangle one.
    """

    n_left: int
    n_right: int
    m: int
    left_avg_degree: float
    right_avg_degree: float
    avg_degree: float
    mean_degree: float
    latapy_clustering: float
    robins_alexander_clustering: float
    avg_betweenness: float
    lcp_pearson: float
    lcp_spearman: float
    lcp_pearson_proper: float
    lcp_spearman_proper: float

    def as_dict(self) -> dict:
        return asdict(self)


def degree_stats(g: BipartiteGraph) -> tuple[float, float, float, float]:
    n = g.n_left + g.n_right
    return (g.m / g.n_left if g.n_left else 0.0,
            g.m / g.n_right if g.n_right else 0.0,
            g.m / n if n else 0.0,
            2.0 * g.m / n if n else 0.0)


def topo_stats(g: BipartiteGraph, with_betweenness: bool = True) -> TopoStats:
    left_avg, right_avg, avg, mean = degree_stats(g)
    inc = lcp_decomposition(g, INCLUSIVE)
    prop = lcp_decomposition(g, PROPER)
    return TopoStats(
        n_left=g.n_left, n_right=g.n_right, m=g.m,
        left_avg_degree=left_avg, right_avg_degree=right_avg,
        avg_degree=avg, mean_degree=mean,
        latapy_clustering=latapy_clustering(g),
        robins_alexander_clustering=robins_alexander_clustering(g),
        avg_betweenness=avg_betweenness(g) if with_betweenness else float("nan"),
        lcp_pearson=inc.pearson, lcp_spearman=inc.spearman,
        lcp_pearson_proper=prop.pearson, lcp_spearman_proper=prop.spearman,
    )
