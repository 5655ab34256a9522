"""Repeated random-removal evaluation: precision@L, AUPR and method comparison.

Seeding
-------
Repetition ``r`` of a run with master seed ``s`` draws its removed edges from
``SeedSequence([s, r])``. The random baseline of method ``name`` uses
``SeedSequence([s, r, crc32(name)])`` and the tie-breaking shuffle uses
``SeedSequence([s, r, crc32(name), 1])``. Every number therefore depends
only on ``(graph, s, r, name)``, never on scheduling or on which other
methods are evaluated.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .bigraph import BipartiteGraph, EdgeSet, nonedge_mask, remove_edges
from .methods import METHOD_CLASSES, Scorer, method_key, validate_methods
from .stats import benjamini_hochberg, mann_whitney_u

log = logging.getLogger(__name__)

MethodFn = Callable[[BipartiteGraph, EdgeSet, np.random.Generator], np.ndarray]


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RemovalSplit:
    observed: BipartiteGraph
    removed: EdgeSet
    seed: object


def removal_size(m: int, fraction: float) -> int:
    """``round(fraction * m)`` with halves rounded up."""
    return int(np.floor(fraction * m + 0.5))


def sample_removal(g: BipartiteGraph, fraction: float, seed) -> RemovalSplit:
    """Remove ``round(fraction * m)`` edges drawn uniformly without replacement."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    n_remove = removal_size(g.m, fraction)
    if n_remove == 0:
        raise ValueError(f"fraction {fraction} removes no edge from a graph with {g.m} edges")
    rng = np.random.default_rng(seed)
    edges = g.edge_array()
    pick = rng.choice(g.m, size=n_remove, replace=False)
    removed = EdgeSet(edges[pick])
    return RemovalSplit(remove_edges(g, removed), removed, seed)


@dataclass(frozen=True)
class RankedCandidates:
    """Candidates ranked by decreasing score.

    ``order[k]`` is the candidate index at rank ``k`` (0-based); ``scores``
    and ``positive`` are aligned with the original candidate order.
    """

    order: np.ndarray
    scores: np.ndarray
    positive: np.ndarray

    def __len__(self):
        return len(self.order)

    @property
    def ranks(self) -> np.ndarray:
        ranks = np.empty(len(self.order), np.int64)
        ranks[self.order] = np.arange(len(self.order))
        return ranks

    @property
    def ranked_positive(self) -> np.ndarray:
        return self.positive[self.order]

    @property
    def n_positive(self) -> int:
        return int(self.positive.sum())


def rank_candidates(scores, seed, positive=None) -> RankedCandidates:
    """Sort descending by score; ties are broken by a seeded random shuffle."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if positive is None:
        positive = np.zeros(len(scores), dtype=bool)
    positive = np.asarray(positive, dtype=bool).ravel()
    if len(positive) != len(scores):
        raise ValueError(f"{len(scores)} scores for {len(positive)} candidates")
    if np.isnan(scores).any():
        raise ValueError("scores contain NaN")
    rng = np.random.default_rng(seed)
    shuffle_key = rng.permutation(len(scores))
    order = np.lexsort((np.arange(len(scores)), shuffle_key, -scores))
    return RankedCandidates(order, scores, positive)


def precision_at_L(r: RankedCandidates, L: int) -> float:
    """Fraction of positives among the top ``L`` candidates."""
    if L <= 0:
        raise ValueError("L must be positive")
    if L > len(r):
        raise ValueError(f"L={L} exceeds the {len(r)} candidates")
    return float(r.positive[r.order[:L]].sum()) / L


def pr_curve(r: RankedCandidates):
    """Recall and precision after each of the ``n`` ranked candidates."""
    hits = np.cumsum(r.ranked_positive)
    k = np.arange(1, len(r) + 1)
    return hits / max(r.n_positive, 1), hits / k


def aupr(r: RankedCandidates, integrator: str = "trapezoid") -> float:
    """Area under the precision-recall curve over the full ranking.

    The curve has one point per retrieved positive, ``(i/P, i/k_i)`` where
    ``k_i`` is the 1-based rank of the ``i``-th positive; it is anchored at
    recall 0 with the precision of its first point. ``"trapezoid"``
    integrates linearly between points, ``"step"`` uses the right-hand
    precision of each recall step (average precision).
    """
    n_pos = r.n_positive
    if n_pos == 0:
        raise ValueError("AUPR needs at least one positive")
    k = np.flatnonzero(r.ranked_positive) + 1
    prec = np.arange(1, n_pos + 1) / k
    if integrator == "step":
        return float(prec.sum() / n_pos)
    if integrator != "trapezoid":
        raise ValueError(f"unknown integrator {integrator!r}")
    prev = np.concatenate([prec[:1], prec[:-1]])
    return float(np.sum((prev + prec) / 2.0) / n_pos)


@dataclass
class Comparison:
    metric: str
    method_a: str
    method_b: str
    u: float
    p: float
    p_adjusted: float = float("nan")


@dataclass
class ExperimentResult:
    methods: list[str]
    precision: dict[str, np.ndarray]
    aupr: dict[str, np.ndarray]
    removed_per_rep: int
    candidates_per_rep: int
    comparisons: list[Comparison] = field(default_factory=list)

    @property
    def reps(self) -> int:
        return len(next(iter(self.precision.values()))) if self.precision else 0

    def mean(self, metric: str, method: str) -> float:
        return float(np.mean(self._metric(metric)[method]))

    def se(self, metric: str, method: str) -> float:
        return standard_error(self._metric(metric)[method])

    def _metric(self, metric):
        if metric == "precision":
            return self.precision
        if metric == "aupr":
            return self.aupr
        raise ValueError(metric)

    def comparison(self, metric, a, b) -> Comparison:
        for c in self.comparisons:
            if c.metric == metric and {c.method_a, c.method_b} == {a, b}:
                return c
        raise KeyError((metric, a, b))

    def summary(self) -> dict:
        out = {"methods": {}, "comparisons": []}
        for name in self.methods:
            out["methods"][name] = {
                "precision_mean": self.mean("precision", name),
                "precision_se": self.se("precision", name),
                "aupr_mean": self.mean("aupr", name),
                "aupr_se": self.se("aupr", name),
            }
        for c in self.comparisons:
            out["comparisons"].append(dict(metric=c.metric, method_a=c.method_a,
                                           method_b=c.method_b, u=c.u, p=c.p,
                                           p_adjusted=c.p_adjusted))
        return out


def standard_error(values) -> float:
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def compare_methods(samples: Mapping[str, np.ndarray], metric: str) -> list[Comparison]:
    """Pairwise Mann-Whitney tests with Benjamini-Hochberg adjustment."""
    comps = []
    for a, b in itertools.combinations(list(samples), 2):
        u, p = mann_whitney_u(samples[a], samples[b])
        comps.append(Comparison(metric, a, b, u, p))
    if comps:
        adj = benjamini_hochberg([c.p for c in comps])
        for c, pa in zip(comps, adj):
            c.p_adjusted = float(pa)
    return comps


def _resolve(methods) -> list[tuple[str, MethodFn | None]]:
    out = []
    for m in methods:
        if isinstance(m, tuple):
            name, fn = m
            out.append((str(name), fn))
        else:
            out.append((validate_methods([m])[0], None))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise ValueError("duplicate method names")
    return out


def evaluate_split(g: BipartiteGraph, split: RemovalSplit, methods, master_seed: int,
                   rep: int, integrator: str = "trapezoid", side: str = "left"):
    """Precision@L and AUPR of each method on one removal split."""
    mask = nonedge_mask(split.observed)
    pos = np.zeros(g.shape, dtype=bool)
    pos[split.removed.pairs[:, 0], split.removed.pairs[:, 1]] = True
    positive = pos[mask]
    L = len(split.removed)
    scorer = Scorer(split.observed, side)
    out = {}
    for name, fn in _resolve(methods):
        key = method_key(name)
        rng = np.random.default_rng(np.random.SeedSequence([master_seed, rep, key]))
        try:
            if fn is None:
                mat = scorer.matrix(name, rng)
            else:
                mat = np.asarray(fn(split.observed, split.removed, rng), dtype=np.float64)
            if mat.shape != g.shape:
                raise ValueError(f"score matrix has shape {mat.shape}, expected {g.shape}")
            ranked = rank_candidates(mat[mask],
                                     np.random.SeedSequence([master_seed, rep, key, 1]),
                                     positive)
            out[name] = (precision_at_L(ranked, L), aupr(ranked, integrator))
        except Exception as exc:
            raise EvaluationError(f"repetition {rep}, method {name!r}: {exc}") from exc
    return out, L, int(mask.sum())


def run_experiment(g: BipartiteGraph, methods: Sequence, fraction: float = 0.1,
                   reps: int = 100, seed: int = 0, integrator: str = "trapezoid",
                   side: str = "left", progress: Callable[[int], None] | None = None
                   ) -> ExperimentResult:
    """Repeat removal, scoring and ranking ``reps`` times.

    Every method is scored on the same split in each repetition. ``methods``
    holds registry names (see :mod:`bilink.methods`) or ``(name, fn)``
    tuples, where ``fn(observed, removed, rng)`` returns a dense score
    matrix.
    """
    resolved = _resolve(methods)
    names = [n for n, _ in resolved]
    if reps < 1:
        raise ValueError("reps must be at least 1")
    prec = {n: np.zeros(reps) for n in names}
    apr = {n: np.zeros(reps) for n in names}
    L = n_cand = 0
    for r in range(reps):
        split = sample_removal(g, fraction, np.random.SeedSequence([seed, r]))
        res, L, n_cand = evaluate_split(g, split, resolved, seed, r, integrator, side)
        for n in names:
            prec[n][r], apr[n][r] = res[n]
        if progress is not None:
            progress(r)
    result = ExperimentResult(names, prec, apr, L, n_cand)
    result.comparisons = compare_methods(prec, "precision") + compare_methods(apr, "aupr")
    return result


@dataclass
class ClassAggregate:
    name: str
    members: list[str]
    n: int
    precision_mean: float
    precision_se: float
    aupr_mean: float
    aupr_se: float


def _pool(results, members, metric):
    vals = []
    for res in results.values():
        store = res.precision if metric == "precision" else res.aupr
        for m in members:
            if m in store:
                vals.append(store[m])
    return np.concatenate(vals) if vals else np.zeros(0)


def aggregate_classes(results: Mapping[str, ExperimentResult],
                      classes: Mapping[str, Sequence[str]] | None = None):
    """Pool every (method, network, repetition) result within each class.

    Returns ``(aggregates, comparisons)``: a dict of :class:`ClassAggregate`
    for each class with results and pairwise Mann-Whitney comparisons of the
    pooled class samples.
    """
    classes = dict(METHOD_CLASSES if classes is None else classes)
    aggs = {}
    for cname, members in classes.items():
        if not members:
            raise ValueError(f"class {cname!r} has no methods")
        present = sorted({m for res in results.values() for m in res.methods if m in members},
                         key=list(members).index)
        if not present:
            continue
        p = _pool(results, present, "precision")
        a = _pool(results, present, "aupr")
        aggs[cname] = ClassAggregate(cname, present, len(p), float(p.mean()),
                                     standard_error(p), float(a.mean()), standard_error(a))
    if not aggs:
        raise ValueError("no class has any results")
    comps = []
    for metric in ("precision", "aupr"):
        comps += compare_methods({c: _pool(results, aggs[c].members, metric) for c in aggs},
                                 metric)
    return aggs, comps
