"""Acceptance checks, one test per criterion (or per network where a criterion
names several). Every check prints a single ``[PASS]`` or ``[FAIL]`` line;
under pytest the lines are repeated in the terminal summary.

Run standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from bilink import (  # noqa: E402
    BipartiteGraph,
    DatasetError,
    IndexKind,
    community_tables,
    latapy_clustering,
    lcp_decomposition,
    load_dataset,
    local_community,
    robins_alexander_clustering,
    run_experiment,
)
from bilink.bigraph import nonedge_mask  # noqa: E402
from bilink.evaluator import removal_size  # noqa: E402
from bilink.methods import METHOD_CLASSES  # noqa: E402
from bilink.network_analysis import INCLUSIVE, degree_stats  # noqa: E402
from bilink.projection import baseline_matrix  # noqa: E402

# tolerances and published values
REAL_TOL = 1e-12
DEGREE_TOL = 0.01
CLUSTER_TOL = 0.005
LCP_TOL = 0.02
SIGMAS = 3.0
CRA_BUDGET_S = 180.0
SUITE_BUDGET_S = 30 * 60.0
P_ADJ_MAX = 0.05

TABLE_S1_DEGREES = {  # left, right, average
    "movielens100k": (59.45, 106.04, 38.1),
    "gpcr": (2.85, 6.68, 2.0),
    "ion_channels": (7.03, 7.24, 3.57),
    "enzymes": (6.58, 4.41, 2.64),
    "aid": (12.51, 55.56, 10.21),
    "ipums": (67.75, 35.26, 23.19),
}
TABLE_S1_SIZES = {  # n_left, n_right, m
    "movielens100k": (1682, 943, 100000),
    "gpcr": (223, 95, 635),
    "ion_channels": (210, 204, 1476),
    "enzymes": (445, 664, 2926),
    "aid": (151, 34, 1889),
    "ipums": (267, 513, 18088),
}
MOVIELENS_LATAPY = 0.0715
MOVIELENS_ROBINS_ALEXANDER = 0.2948
LCP_CORR = {"movielens100k": (0.80, 0.81), "ipums": (0.92, 0.94)}

RESULTS: list[str] = []
_GRAPHS: dict = {}


def report(criterion: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def check(criterion: str, ok: bool, detail: str):
    report(criterion, ok, detail)
    assert ok, detail


def dataset(name):
    """Load a benchmark network, caching the result (or the failure)."""
    if name not in _GRAPHS:
        try:
            _GRAPHS[name] = load_dataset(name)[0]
        except (DatasetError, OSError) as exc:
            _GRAPHS[name] = exc
    return _GRAPHS[name]


def require(criterion, name):
    g = dataset(name)
    if isinstance(g, Exception):
        check(criterion, False, f"{name} dataset unavailable ({g})")
    return g


KINDS = [k.value for k in IndexKind]
INTEGER_KINDS = {"cn", "pa", "lcl", "car", "cpa"}
_SUITE: dict = {}


def random_suite():
    """Compare every pair of 500 random graphs with the oracles (computed once).

    Returns the per-pair ``(graph, community, car)`` records, the mismatch
    list, the largest absolute difference and the runtime.
    """
    if _SUITE:
        return _SUITE
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    worst = 0.0
    mismatches = []
    records = []
    for gi in range(500):
        nl, nr = (int(v) for v in rng.integers(1, 13, size=2))
        edges = oracles.random_edges(rng, nl, nr, rng.uniform(0.1, 0.5))
        g = BipartiteGraph.from_edges(nl, nr, sorted(edges))
        tables = community_tables(g)
        mats = {k: tables.index(k) for k in KINDS}
        for x in range(nl):
            for y in range(nr):
                lc = local_community(g, x, y)
                records.append((g, lc, mats["car"][x, y]))
                cn_r, cn_l, gamma, lcl = oracles.community(edges, x, y)
                if (list(lc.cn_right), list(lc.cn_left), lc.gamma(), lc.lcl) != \
                        (cn_r, cn_l, gamma, lcl):
                    mismatches.append((gi, x, y, "community"))
                want = oracles.indices(edges, nl, nr, x, y)
                for k in KINDS:
                    diff = abs(mats[k][x, y] - want[k])
                    limit = 0.0 if k in INTEGER_KINDS else REAL_TOL
                    if diff > limit:
                        mismatches.append((gi, x, y, k))
                    worst = max(worst, diff)
        diffs = [np.abs(baseline_matrix("nbi", g) - oracles.nbi_dense(edges, nl, nr)).max()]
        for kind in ("jac", "cos", "euc", "pea"):
            diffs.append(np.abs(baseline_matrix(kind, g)
                                - oracles.similarity_dense(kind, edges, nl, nr)).max())
        if max(diffs) > REAL_TOL:
            mismatches.append((gi, "baselines", max(diffs)))
        worst = max(worst, *diffs)
    _SUITE.update(records=records, mismatches=mismatches, worst=worst,
                  seconds=time.perf_counter() - t0)
    return _SUITE


def test_criterion_1_oracle_equivalence():
    s = random_suite()
    check("1", not s["mismatches"],
          f"500 random graphs, {len(s['records'])} pairs, 11 indices + NBI + 4 similarities; "
          f"max |diff| {s['worst']:.2e} (tol {REAL_TOL:g}, integers exact), "
          f"{len(s['mismatches'])} mismatches, {s['seconds']:.1f}s")


def community_invariants_hold(g, lc, car):
    gam = lc.gamma()
    degs = np.concatenate([g.right_degrees[lc.cn_right], g.left_degrees[lc.cn_left]])
    return (sum(gam.values()) == 2 * lc.lcl
            and car == lc.cn * lc.lcl
            and np.all(degs >= 2)
            and lc.lcl <= len(lc.cn_left) * len(lc.cn_right))


def test_criterion_2_structural_invariants():
    records = random_suite()["records"]
    bad_small = sum(not community_invariants_hold(*r) for r in records)
    small_ok = bool(records) and bad_small == 0
    g = require("2", "movielens100k")
    t0 = time.perf_counter()
    dec = lcp_decomposition(g)
    tables = community_tables(g)
    car = tables.index("car")
    a = g.biadjacency().toarray().astype(bool)
    bad = 0
    k = 0
    for x in range(g.n_left):
        nx_ = g.adj_left(x)
        for y in nx_:
            ny_ = g.adj_right(y)
            rows = ny_[ny_ != x]
            cols = nx_[nx_ != y]
            sub = a[np.ix_(rows, cols)]
            gamma_l = sub.sum(axis=1)
            gamma_r = sub.sum(axis=0)
            lcl = int(sub.sum())
            cn_l = rows[gamma_l > 0]
            cn_r = cols[gamma_r > 0]
            cn = len(cn_l) + len(cn_r)
            ok = (int(gamma_l.sum() + gamma_r.sum()) == 2 * lcl
                  and np.all(g.left_degrees[cn_l] >= 2) and np.all(g.right_degrees[cn_r] >= 2)
                  and lcl <= len(cn_l) * len(cn_r)
                  and car[x, y] == cn * lcl
                  and tables.cn_left[x, y] == len(cn_l) and tables.cn_right[x, y] == len(cn_r)
                  and tables.lcl[x, y] == lcl
                  and dec.cn[k] == cn and dec.lcl[k] == lcl)
            bad += not ok
            k += 1
    dt = time.perf_counter() - t0
    check("2", small_ok and bad == 0 and k == g.m,
          f"{len(records)} random-graph communities ({bad_small} violations); "
          f"MovieLens decomposition {k} edges ({bad} violations), {dt:.1f}s")


@pytest.mark.parametrize("name", list(TABLE_S1_DEGREES))
def test_criterion_3_degrees(name):
    crit = f"3 [{name}]"
    g = require(crit, name)
    t0 = time.perf_counter()
    left_avg, right_avg, avg, _ = degree_stats(g)
    dt = time.perf_counter() - t0
    want = TABLE_S1_DEGREES[name]
    got = (left_avg, right_avg, avg)
    ok = all(abs(a - b) <= DEGREE_TOL for a, b in zip(got, want)) and dt < 1.0
    check(crit, ok, "left/right/average degree "
          + "/".join(f"{v:.2f}" for v in got) + " vs Table S1 "
          + "/".join(f"{v:g}" for v in want) + f" (tol {DEGREE_TOL}, average = m/N)")


def test_criterion_3_published_counts():
    # the degree columns follow from the published node and edge counts alone
    bad = []
    for name, (nl, nr, m) in TABLE_S1_SIZES.items():
        got = (m / nl, m / nr, m / (nl + nr))
        if any(abs(a - b) > DEGREE_TOL for a, b in zip(got, TABLE_S1_DEGREES[name])):
            bad.append(name)
    check("3 [published counts]", not bad,
          f"degree arithmetic from published sizes of all 6 networks; mismatches: {bad or 'none'}")


def test_criterion_4_clustering():
    g = require("4", "movielens100k")
    t0 = time.perf_counter()
    lat = latapy_clustering(g)
    ra = robins_alexander_clustering(g)
    dt = time.perf_counter() - t0
    ok = abs(lat - MOVIELENS_LATAPY) <= CLUSTER_TOL and \
        abs(ra - MOVIELENS_ROBINS_ALEXANDER) <= CLUSTER_TOL
    check("4", ok, f"MovieLens Latapy {lat:.4f} (want {MOVIELENS_LATAPY}), Robins-Alexander "
          f"{ra:.4f} (want {MOVIELENS_ROBINS_ALEXANDER}), tol {CLUSTER_TOL}, {dt:.1f}s")


@pytest.mark.parametrize("name", list(LCP_CORR))
def test_criterion_5_lcp_correlation(name):
    crit = f"5 [{name}]"
    g = require(crit, name)
    dec = lcp_decomposition(g, INCLUSIVE)
    want_p, want_s = LCP_CORR[name]
    p, s = dec.pearson, dec.spearman
    ok = abs(p - want_p) <= LCP_TOL and abs(s - want_s) <= LCP_TOL
    check(crit, ok, f"LCP Pearson/Spearman {p:.4f}/{s:.4f} vs {want_p}/{want_s} "
          f"(tol {LCP_TOL}, '{INCLUSIVE}' convention)")


def oracle_method(observed, removed, rng):
    m = np.zeros(observed.shape)
    m[removed.pairs[:, 0], removed.pairs[:, 1]] = 1.0
    return m


def test_criterion_6_protocol_sanity():
    rng = np.random.default_rng(6)
    g = BipartiteGraph.from_edges(30, 30, sorted(oracles.random_edges(rng, 30, 30, 0.2)))
    t0 = time.perf_counter()
    res = run_experiment(g, [("oracle", oracle_method), "random"], 0.1, reps=1000, seed=6)
    dt = time.perf_counter() - t0
    L = removal_size(g.m, 0.1)
    n = g.n_left * g.n_right - g.m + L
    p0 = L / n
    # hypergeometric sd of precision@L, then of the mean over repetitions
    sd = np.sqrt(p0 * (1 - p0) * (n - L) / (n - 1) / L) / np.sqrt(res.reps)
    mean = res.mean("precision", "random")
    perfect = np.all(res.precision["oracle"] == 1.0) and np.all(res.aupr["oracle"] == 1.0)
    ok = perfect and abs(mean - p0) <= SIGMAS * sd
    check("6", ok, f"oracle precision/AUPR 1.0 in all 1000 reps: {perfect}; random mean "
          f"precision {mean:.5f} vs L/|candidates| {p0:.5f} (|z| = {abs(mean - p0) / sd:.2f} "
          f"<= {SIGMAS:g}), {dt:.1f}s")


@pytest.mark.parametrize("name", ["gpcr", "aid"])
def test_criterion_7_directional(name):
    crit = f"7 [{name}]"
    g = require(crit, name)
    methods = [m for cls in METHOD_CLASSES.values() for m in cls]
    res = run_experiment(g, methods, 0.1, reps=100, seed=0)
    cls = {c: np.mean([res.mean("precision", m) for m in ms])
           for c, ms in METHOD_CLASSES.items()}
    p_adj = {m: res.comparison("precision", m, "cn").p_adjusted for m in ("cra", "car")}
    better = {m: res.mean("precision", m) > res.mean("precision", "cn") for m in p_adj}
    ok = (cls["lcp"] > cls["classical"] > cls["projection"]
          and all(better.values()) and all(p < P_ADJ_MAX for p in p_adj.values()))
    check(crit, ok, f"class precision lcp {cls['lcp']:.4f} > classical {cls['classical']:.4f} "
          f"> projection {cls['projection']:.4f}; CRA/CAR vs CN adjusted p "
          f"{p_adj['cra']:.2e}/{p_adj['car']:.2e} (< {P_ADJ_MAX})")


def _run_cli(args, threads, out):
    env = dict(os.environ, NUMBA_NUM_THREADS=str(threads))
    cmd = [sys.executable, "-m", "bilink.cli", *args, "--out-dir", str(out)]
    return subprocess.run(cmd, env=env, capture_output=True, text=True)


def _same_outputs(a: Path, b: Path):
    names = sorted(p.name for p in a.iterdir())
    if names != sorted(p.name for p in b.iterdir()):
        return False, names
    return all((a / n).read_bytes() == (b / n).read_bytes() for n in names), names


def test_criterion_8_determinism(tmp_path):
    rng = np.random.default_rng(8)
    net = tmp_path / "synthetic.tsv"
    net.write_text("".join(f"l{a}\tr{b}\n" for a, b in
                           sorted(oracles.random_edges(rng, 40, 35, 0.15))))
    runs = []
    cache = os.environ.get("BILINK_DATA")
    ml_args = ["evaluate", "--input", "movielens100k", "--reps", "2", "--seed", "3"]
    if cache:
        ml_args += ["--data-dir", cache]
    cases = [("synthetic, all 17 methods, 100 reps",
              ["evaluate", "--input", str(net), "--reps", "100", "--seed", "7"]),
             ("MovieLens, all 17 methods, 2 reps", ml_args)]
    ok = True
    details = []
    for label, args in cases:
        dirs = []
        for i, threads in enumerate((1, 4)):
            out = tmp_path / f"{len(runs)}_{i}"
            proc = _run_cli(args, threads, out)
            if proc.returncode != 0:
                ok = False
                details.append(f"{label}: exit {proc.returncode} {proc.stderr.strip()[-200:]}")
            dirs.append(out)
        runs.append(dirs)
        if all(d.exists() for d in dirs):
            same, names = _same_outputs(*dirs)
            ok &= same
            details.append(f"{label}: {len(names)} files identical at 1 vs 4 threads: {same}")
        else:
            ok = False
    check("8", ok, "; ".join(details))


def test_criterion_9_cra_budget():
    g = require("9 [MovieLens CRA]", "movielens100k")
    t0 = time.perf_counter()
    scores = community_tables(g).index("cra")
    cand = scores[nonedge_mask(g)]
    dt = time.perf_counter() - t0
    ok = len(cand) == 1_486_126 and dt < CRA_BUDGET_S
    check("9 [MovieLens CRA]", ok, f"{len(cand)} candidates scored with CRA in {dt:.1f}s "
          f"(budget {CRA_BUDGET_S:g}s, {os.cpu_count()} CPU)")


def test_criterion_9_small_suites():
    crit = "9 [small-network suites]"
    small = ["gpcr", "ion_channels", "enzymes", "aid", "ipums"]
    missing = [n for n in small if isinstance(dataset(n), Exception)]
    if missing:
        check(crit, False, f"datasets unavailable: {', '.join(missing)}")
    methods = [m for cls in METHOD_CLASSES.values() for m in cls] + ["random"]
    t0 = time.perf_counter()
    for n in small:
        run_experiment(dataset(n), methods, 0.1, reps=100, seed=0)
    dt = time.perf_counter() - t0
    check(crit, dt < SUITE_BUDGET_S,
          f"100-repetition suites on 5 small networks in {dt:.0f}s (budget {SUITE_BUDGET_S:g}s)")


def main():
    import inspect
    import tempfile

    failed = 0
    for name, fn in list(globals().items()):
        if not name.startswith("test_criterion"):
            continue
        params = inspect.signature(fn).parameters
        marks = getattr(fn, "pytestmark", [])
        values = [m.args[1] for m in marks if m.name == "parametrize"] or [[None]]
        for v in values[0]:
            kwargs = {}
            if "name" in params:
                kwargs["name"] = v
            try:
                if "tmp_path" in params:
                    with tempfile.TemporaryDirectory() as d:
                        fn(tmp_path=Path(d), **kwargs)
                else:
                    fn(**kwargs)
            except AssertionError:
                failed += 1
    print(json.dumps({"checks": len(RESULTS), "failed": failed}))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
