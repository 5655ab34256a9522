"""Immutable sparse bipartite graphs and edge-list ingestion.

Nodes are dense integers within each partition. Adjacency is stored twice,
as CSR-style ``indptr``/``indices`` arrays for the left and the right side,
with every neighbour list strictly increasing.
"""

from __future__ import annotations

import enum
import hashlib
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

import numpy as np

log = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for invalid nodes, edges or malformed input."""


class ParseError(GraphError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Partition(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class NodeRef:
    partition: Partition
    index: int


def left(i: int) -> NodeRef:
    return NodeRef(Partition.LEFT, int(i))


def right(j: int) -> NodeRef:
    return NodeRef(Partition.RIGHT, int(j))


def _csr(rows: np.ndarray, cols: np.ndarray, n_rows: int):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
    return indptr, np.ascontiguousarray(cols, dtype=np.int64)


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


class EdgeSet:
    """Canonically sorted, duplicate-free set of ``(left, right)`` pairs."""

    __slots__ = ("pairs",)

    def __init__(self, pairs):
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if len(arr):
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
            if np.any(np.all(arr[1:] == arr[:-1], axis=1)):
                raise GraphError("edge set contains duplicate pairs")
        arr = np.ascontiguousarray(arr)
        _freeze(arr)
        self.pairs = arr

    def __len__(self):
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return ((int(a), int(b)) for a, b in self.pairs)

    def __eq__(self, other):
        return isinstance(other, EdgeSet) and np.array_equal(self.pairs, other.pairs)

    def __repr__(self):
        return f"EdgeSet({len(self)} edges)"


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Undirected, unweighted bipartite graph.

    Build instances with :meth:`from_edges` or :func:`parse_edge_list`; the
    constructor trusts its arguments.
    """

    n_left: int
    n_right: int
    left_indptr: np.ndarray
    left_indices: np.ndarray
    right_indptr: np.ndarray
    right_indices: np.ndarray
    left_labels: tuple[str, ...] | None = None
    right_labels: tuple[str, ...] | None = None
    _label_index: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, n_left, n_right, edges, left_labels=None, right_labels=None):
        """Build a graph from ``(left, right)`` index pairs.

        Duplicate pairs are collapsed. Every index must be smaller than the
        corresponding partition size.
        """
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(arr):
            if arr.min() < 0 or arr[:, 0].max() >= n_left or arr[:, 1].max() >= n_right:
                raise GraphError("edge index out of range")
            arr = np.unique(arr, axis=0)
        l_ptr, l_idx = _csr(arr[:, 0], arr[:, 1], n_left)
        r_ptr, r_idx = _csr(arr[:, 1], arr[:, 0], n_right)
        _freeze(l_ptr, l_idx, r_ptr, r_idx)
        if left_labels is not None:
            left_labels = tuple(left_labels)
            if len(left_labels) != n_left:
                raise GraphError("left label count does not match n_left")
        if right_labels is not None:
            right_labels = tuple(right_labels)
            if len(right_labels) != n_right:
                raise GraphError("right label count does not match n_right")
        return cls(int(n_left), int(n_right), l_ptr, l_idx, r_ptr, r_idx,
                   left_labels, right_labels)

    @property
    def m(self) -> int:
        return int(self.left_indptr[-1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_left, self.n_right

    def adj_left(self, i: int) -> np.ndarray:
        """Sorted right neighbours of left node ``i``."""
        return self.left_indices[self.left_indptr[i]:self.left_indptr[i + 1]]

    def adj_right(self, j: int) -> np.ndarray:
        """Sorted left neighbours of right node ``j``."""
        return self.right_indices[self.right_indptr[j]:self.right_indptr[j + 1]]

    def neighbours(self, v: NodeRef) -> np.ndarray:
        _check_node(self, v)
        if v.partition is Partition.LEFT:
            return self.adj_left(v.index)
        return self.adj_right(v.index)

    @property
    def left_degrees(self) -> np.ndarray:
        return np.diff(self.left_indptr)

    @property
    def right_degrees(self) -> np.ndarray:
        return np.diff(self.right_indptr)

    def edges(self) -> EdgeSet:
        rows = np.repeat(np.arange(self.n_left, dtype=np.int64), self.left_degrees)
        return EdgeSet(np.column_stack([rows, self.left_indices]))

    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` array of edges in canonical (left-major) order."""
        rows = np.repeat(np.arange(self.n_left, dtype=np.int64), self.left_degrees)
        return np.column_stack([rows, self.left_indices])

    def biadjacency(self):
        """Return the ``n_left x n_right`` biadjacency as a scipy CSR matrix."""
        from scipy import sparse

        data = np.ones(self.m, dtype=np.int64)
        return sparse.csr_matrix((data, self.left_indices, self.left_indptr),
                                 shape=self.shape)

    def transpose(self) -> "BipartiteGraph":
        """Same graph with the roles of the two partitions exchanged."""
        return BipartiteGraph(self.n_right, self.n_left, self.right_indptr,
                              self.right_indices, self.left_indptr,
                              self.left_indices, self.right_labels, self.left_labels)

    def label(self, v: NodeRef) -> str:
        _check_node(self, v)
        labels = self.left_labels if v.partition is Partition.LEFT else self.right_labels
        return labels[v.index] if labels is not None else str(v.index)

    def node(self, partition: Partition, label: str) -> NodeRef:
        """Look up a node by its raw label."""
        key = partition
        if key not in self._label_index:
            labels = self.left_labels if partition is Partition.LEFT else self.right_labels
            if labels is None:
                raise GraphError("graph carries no labels")
            self._label_index[key] = {s: i for i, s in enumerate(labels)}
        try:
            return NodeRef(partition, self._label_index[key][label])
        except KeyError:
            raise GraphError(f"unknown {partition.value} label {label!r}") from None

    def checksum(self) -> str:
        """SHA-256 over the sizes and the canonical edge list."""
        h = hashlib.sha256()
        h.update(np.array([self.n_left, self.n_right], dtype="<i8").tobytes())
        h.update(self.left_indptr.astype("<i8").tobytes())
        h.update(self.left_indices.astype("<i8").tobytes())
        return h.hexdigest()

    def __repr__(self):
        return f"BipartiteGraph(n_left={self.n_left}, n_right={self.n_right}, m={self.m})"


def _check_node(g: BipartiteGraph, v: NodeRef):
    size = g.n_left if v.partition is Partition.LEFT else g.n_right
    if not 0 <= v.index < size:
        raise GraphError(f"{v.partition.value} node {v.index} out of range [0, {size})")


def _check_pair(g: BipartiteGraph, x: int, y: int):
    if not 0 <= x < g.n_left:
        raise GraphError(f"left node {x} out of range [0, {g.n_left})")
    if not 0 <= y < g.n_right:
        raise GraphError(f"right node {y} out of range [0, {g.n_right})")


def degree(g: BipartiteGraph, v: NodeRef) -> int:
    return len(g.neighbours(v))


def has_edge(g: BipartiteGraph, x: int, y: int) -> bool:
    """True when left node ``x`` is adjacent to right node ``y``."""
    _check_pair(g, x, y)
    nx_, ny_ = g.adj_left(x), g.adj_right(y)
    # binary search in the shorter list
    if len(nx_) <= len(ny_):
        arr, key = nx_, y
    else:
        arr, key = ny_, x
    k = np.searchsorted(arr, key)
    return bool(k < len(arr) and arr[k] == key)


def remove_edges(g: BipartiteGraph, edges) -> BipartiteGraph:
    """Return a copy of ``g`` without ``edges``; node sets are unchanged."""
    if not isinstance(edges, EdgeSet):
        edges = EdgeSet(edges)
    if len(edges) == 0:
        return g
    all_edges = g.edge_array()
    key_all = all_edges[:, 0] * g.n_right + all_edges[:, 1]
    rem = edges.pairs
    if rem[:, 0].max() >= g.n_left or rem[:, 1].max() >= g.n_right or rem.min() < 0:
        raise GraphError("edge index out of range")
    key_rem = rem[:, 0] * g.n_right + rem[:, 1]
    present = np.isin(key_rem, key_all, assume_unique=True)
    if not present.all():
        a, b = rem[np.argmin(present)]
        raise GraphError(f"edge ({a}, {b}) is not in the graph")
    keep = all_edges[~np.isin(key_all, key_rem, assume_unique=True)]
    return BipartiteGraph.from_edges(g.n_left, g.n_right, keep,
                                     g.left_labels, g.right_labels)


def candidate_pairs(g: BipartiteGraph) -> Iterator[tuple[int, int]]:
    """Non-adjacent ``(left, right)`` pairs in lexicographic order."""
    for x in range(g.n_left):
        mask = np.ones(g.n_right, dtype=bool)
        mask[g.adj_left(x)] = False
        for y in np.flatnonzero(mask):
            yield x, int(y)


def candidate_array(g: BipartiteGraph) -> np.ndarray:
    """``(n_left*n_right - m, 2)`` array with the pairs of :func:`candidate_pairs`."""
    mask = nonedge_mask(g)
    xs, ys = np.nonzero(mask)
    return np.column_stack([xs, ys]).astype(np.int64)


def nonedge_mask(g: BipartiteGraph) -> np.ndarray:
    """Dense boolean ``n_left x n_right`` mask, True where no edge exists."""
    mask = np.ones(g.shape, dtype=bool)
    rows = np.repeat(np.arange(g.n_left), g.left_degrees)
    mask[rows, g.left_indices] = False
    return mask


@dataclass
class IngestionReport:
    lines_read: int = 0
    records: int = 0
    duplicates: int = 0
    extra_columns: int = 0
    n_left: int = 0
    n_right: int = 0
    edges: int = 0

    def as_dict(self):
        return dict(self.__dict__)


def parse_edge_list(stream: TextIO | str, delimiter: str | None = "\t",
                    comment: str = "#", header: bool = False):
    """Read ``left<delim>right[<delim>ignored...]`` records.

    Parameters
    ----------
    stream : text stream or str
        Open text stream, or the literal file content.
    delimiter : str or None
        Column separator; ``None`` splits on any whitespace.
    comment : str
        Lines starting with this prefix are skipped.
    header : bool
        Skip the first non-comment line.

    Returns
    -------
    graph : BipartiteGraph
    report : IngestionReport

    Ids are assigned in first-appearance order per partition and duplicate
    records collapse to one edge. Columns past the second (weights,
    timestamps) are dropped.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    report = IngestionReport()
    lmap: dict[str, int] = {}
    rmap: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    skip_header = header
    for lineno, raw in enumerate(stream, start=1):
        report.lines_read += 1
        line = raw.rstrip("\r\n")
        if not line.strip() or (comment and line.lstrip().startswith(comment)):
            continue
        if skip_header:
            skip_header = False
            continue
        cols = line.split(delimiter) if delimiter is not None else line.split()
        if len(cols) < 2 or not cols[0].strip() or not cols[1].strip():
            raise ParseError(f"expected at least 2 columns, got {len(cols)}", lineno)
        if len(cols) > 2:
            report.extra_columns += 1
        a, b = cols[0].strip(), cols[1].strip()
        i = lmap.setdefault(a, len(lmap))
        j = rmap.setdefault(b, len(rmap))
        report.records += 1
        if (i, j) in seen:
            report.duplicates += 1
            continue
        seen.add((i, j))
        edges.append((i, j))
    if not edges:
        raise ParseError("no edges in input")
    if report.extra_columns:
        log.warning("ignored extra columns on %d records", report.extra_columns)
    g = BipartiteGraph.from_edges(len(lmap), len(rmap), edges, list(lmap), list(rmap))
    report.n_left, report.n_right, report.edges = g.n_left, g.n_right, g.m
    return g, report


def read_edge_list(path, **kwargs):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, **kwargs)


def format_edge_list(g: BipartiteGraph, header_comment: Iterable[str] = ()) -> str:
    """Serialise ``g`` in the canonical tab-separated format.

    Edges are written in canonical left-major order. Isolated nodes cannot be
    represented in an edge list and are lost on a round trip.
    """
    out = io.StringIO()
    for line in header_comment:
        out.write(f"# {line}\n")
    ll = g.left_labels or [str(i) for i in range(g.n_left)]
    rl = g.right_labels or [str(j) for j in range(g.n_right)]
    for a, b in g.edge_array():
        out.write(f"{ll[a]}\t{rl[b]}\n")
    return out.getvalue()
