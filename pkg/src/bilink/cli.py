"""Batch command line: ``bilink {stats,predict,evaluate,lcpdp,fetch}``.

Settings are resolved as flag > config file > default. Every output file
carries the tool version, the input checksum, the master seed and the
resolved configuration; the configuration is also written to
``<out-dir>/config.json``.

The config file holds ``key = value`` lines (``#`` comments allowed), e.g.::

    input = movielens100k
    methods = car, cra, cn, nbi, random
    fraction = 0.1
    reps = 100
    seed = 7

Keys are the long flag names with dashes replaced by underscores. List
values are comma separated.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bigraph import GraphError, nonedge_mask, read_edge_list
from .datasets import REGISTRY, DatasetError, fetch_dataset, resolve_name, sha256_file
from .evaluator import EvaluationError, aggregate_classes, rank_candidates, run_experiment
from .methods import ALL_METHODS, Scorer, method_key, validate_methods
from .network_analysis import INCLUSIVE, PROPER, lcp_decomposition, topo_stats

log = logging.getLogger("bilink")

DEFAULTS = {
    "out_dir": ".",
    "seed": 0,
    "threads": 0,
    "methods": ",".join(["car", "cjc", "caa", "cra", "cpa", "lcl",
                         "cn", "jc", "aa", "ra", "pa",
                         "nbi", "jac", "cos", "euc", "pea", "random"]),
    "fraction": 0.1,
    "reps": 100,
    "top_k": 100,
    "method": "car",
    "side": "left",
    "integrator": "trapezoid",
    "convention": INCLUSIVE,
    "data_dir": None,
}

# execution-only settings, left out of provenance so file contents do not depend on them
NOT_RECORDED = {"threads", "config", "command", "data_dir", "out_dir", "out_dir_explicit"}


class UsageError(Exception):
    pass


def _read_config(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[run]\n" + text)
    return {k.replace("-", "_"): v for k, v in parser["run"].items()}


def _resolve(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(_read_config(args.config))
    for key, val in vars(args).items():
        if val is not None:
            cfg[key] = val
    for key, conv in (("seed", int), ("threads", int), ("reps", int), ("top_k", int),
                      ("fraction", float)):
        if cfg.get(key) is not None:
            try:
                cfg[key] = conv(cfg[key])
            except ValueError:
                raise UsageError(f"{key} must be {conv.__name__}, got {cfg[key]!r}") from None
    for key in ("input", "methods"):
        val = cfg.get(key)
        if isinstance(val, str):
            cfg[key] = [s.strip() for s in val.split(",") if s.strip()]
    return cfg


def _recorded(cfg) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k not in NOT_RECORDED}


def _set_threads(n: int):
    if n and n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def _load_input(spec: str, data_dir):
    """Read a path, or fetch a registry dataset by name."""
    path = Path(spec)
    if not path.exists():
        try:
            resolve_name(spec)
        except DatasetError:
            raise UsageError(f"input {spec!r} is neither a file nor a known dataset") from None
        path = fetch_dataset(spec, data_dir)
    g, _ = read_edge_list(path)
    name = path.stem
    return g, name, sha256_file(path)


def _clean(obj):
    """Replace NaN/inf by None so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _provenance(cfg, checksums: dict) -> dict:
    return {"tool": "bilink", "version": __version__, "seed": cfg["seed"],
            "input_sha256": checksums, "config": _recorded(cfg)}


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _write_csv(path: Path, prov: dict, header, rows):
    buf = io.StringIO()
    buf.write(f"# bilink {prov['version']}\n")
    buf.write(f"# input_sha256: {json.dumps(prov['input_sha256'], sort_keys=True)}\n")
    buf.write(f"# seed: {prov['seed']}\n")
    buf.write(f"# config: {json.dumps(_clean(prov['config']), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _out_dir(cfg) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _single_input(cfg):
    inputs = cfg.get("input") or []
    if len(inputs) != 1:
        raise UsageError("this command takes exactly one --input")
    return _load_input(inputs[0], cfg["data_dir"])


def cmd_stats(cfg) -> list[Path]:
    g, name, digest = _single_input(cfg)
    stats = topo_stats(g)
    payload = stats.as_dict()
    payload["network"] = name
    payload["conventions"] = {
        "avg_degree": "m / (n_left + n_right)",
        "mean_degree": "2m / (n_left + n_right)",
        "betweenness": "Brandes, unweighted, each node divided by (n-1)(n-2)/2, "
                       "averaged over all nodes",
        "latapy_clustering": "mean over nodes with a distance-2 neighbour",
        "lcp": f"lcp_* use '{INCLUSIVE}', lcp_*_proper use '{PROPER}'",
    }
    payload["provenance"] = _provenance(cfg, {name: digest})
    out = _out_dir(cfg) / f"{name}_stats.json"
    _write_json(out, payload)
    return [out]


def cmd_predict(cfg) -> list[Path]:
    g, name, digest = _single_input(cfg)
    method = validate_methods([cfg["method"]])[0]
    key = method_key(method)
    scorer = Scorer(g, cfg["side"])
    mat = scorer.matrix(method, np.random.default_rng(np.random.SeedSequence([cfg["seed"], key])))
    mask = nonedge_mask(g)
    xs, ys = np.nonzero(mask)
    ranked = rank_candidates(mat[mask], np.random.SeedSequence([cfg["seed"], key, 1]))
    top = ranked.order[:max(0, cfg["top_k"])]
    ll = g.left_labels
    rl = g.right_labels
    rows = [(ll[xs[i]], rl[ys[i]], float(ranked.scores[i])) for i in top]
    out = _out_dir(cfg) / f"{name}_{method}_top{cfg['top_k']}.csv"
    _write_csv(out, _provenance(cfg, {name: digest}), ["left_label", "right_label", "score"], rows)
    return [out]


def cmd_evaluate(cfg) -> list[Path]:
    inputs = cfg.get("input") or []
    if not inputs:
        raise UsageError("evaluate needs at least one --input")
    if not 0.0 < cfg["fraction"] < 1.0:
        raise UsageError(f"fraction must lie in (0, 1), got {cfg['fraction']}")
    if cfg["reps"] < 1:
        raise UsageError("reps must be at least 1")
    methods = validate_methods(cfg["methods"])
    out_dir = _out_dir(cfg)
    results = {}
    checksums = {}
    written = []
    graphs = [_load_input(spec, cfg["data_dir"]) for spec in inputs]
    for g, name, digest in graphs:
        checksums[name] = digest
    prov = _provenance(cfg, checksums)
    for g, name, digest in graphs:
        log.info("evaluating %s (%d reps, %d methods)", name, cfg["reps"], len(methods))
        try:
            res = run_experiment(g, methods, cfg["fraction"], cfg["reps"], cfg["seed"],
                                 cfg["integrator"], cfg["side"])
        except EvaluationError as exc:
            raise EvaluationError(f"network {name}, {exc}") from exc
        results[name] = res
        rows = [(m, r, float(res.precision[m][r]), float(res.aupr[m][r]))
                for m in res.methods for r in range(res.reps)]
        path = out_dir / f"{name}_evaluation.csv"
        _write_csv(path, prov, ["method", "repetition", "precision", "aupr"], rows)
        written.append(path)
    summary = {"networks": {}, "provenance": prov}
    for name, res in results.items():
        s = res.summary()
        s["removed_per_repetition"] = res.removed_per_rep
        s["candidates_per_repetition"] = res.candidates_per_rep
        summary["networks"][name] = s
    try:
        aggs, comps = aggregate_classes(results)
    except ValueError:
        aggs, comps = {}, []
    summary["classes"] = {c: a.__dict__ for c, a in aggs.items()}
    summary["class_comparisons"] = [c.__dict__ for c in comps]
    path = out_dir / "summary.json"
    _write_json(path, summary)
    written.append(path)
    return written


def cmd_lcpdp(cfg) -> list[Path]:
    g, name, digest = _single_input(cfg)
    conv = cfg["convention"]
    if conv not in (PROPER, INCLUSIVE):
        raise UsageError(f"convention must be {PROPER!r} or {INCLUSIVE!r}")
    dec = lcp_decomposition(g, conv)
    prov = _provenance(cfg, {name: digest})
    out = _out_dir(cfg)
    rows = [(g.left_labels[a], g.right_labels[b], int(c), int(k))
            for (a, b), c, k in zip(dec.edges, dec.cn, dec.lcl)]
    csv_path = out / f"{name}_lcpdp.csv"
    _write_csv(csv_path, prov, ["left", "right", "cn", "lcl"], rows)
    json_path = out / f"{name}_lcpdp.json"
    _write_json(json_path, {"network": name, "convention": conv, "points": len(dec),
                            "pearson": dec.pearson, "spearman": dec.spearman,
                            "provenance": prov})
    return [csv_path, json_path]


def cmd_fetch(cfg) -> list[Path]:
    names = cfg.get("names") or []
    if not names:
        raise UsageError("fetch needs at least one dataset name; known: "
                         + ", ".join(sorted(REGISTRY)))
    paths = []
    for n in names:
        try:
            resolve_name(n)
        except DatasetError as exc:
            raise UsageError(str(exc)) from None
        p = fetch_dataset(n, cfg["data_dir"] or cfg.get("out_dir_explicit"), cfg.get("source"))
        paths.extend([p, p.with_suffix(".json")])
    return paths


COMMANDS = {"stats": cmd_stats, "predict": cmd_predict, "evaluate": cmd_evaluate,
            "lcpdp": cmd_lcpdp, "fetch": cmd_fetch}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append",
                        help="edge-list file or dataset name (repeatable for evaluate)")
    common.add_argument("--out-dir", dest="out_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="worker threads (0 = all)")
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--data-dir", dest="data_dir", help="dataset cache directory")
    common.add_argument("--side", choices=["left", "right"],
                        help="partition whose profiles the projection baselines use")

    p = argparse.ArgumentParser(prog="bilink", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"bilink {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("stats", parents=[common], help="topological statistics JSON")
    pp = sub.add_parser("predict", parents=[common], help="top-k ranked candidate links")
    pp.add_argument("--method", help=f"one of: {', '.join(ALL_METHODS)}")
    pp.add_argument("--top-k", dest="top_k", type=int)
    pe = sub.add_parser("evaluate", parents=[common], help="random-removal evaluation")
    pe.add_argument("--methods", help="comma-separated method names")
    pe.add_argument("--fraction", type=float)
    pe.add_argument("--reps", type=int)
    pe.add_argument("--integrator", choices=["trapezoid", "step"])
    pl = sub.add_parser("lcpdp", parents=[common], help="LCP decomposition points")
    pl.add_argument("--convention", choices=[PROPER, INCLUSIVE])
    pf = sub.add_parser("fetch", parents=[common], help="download benchmark datasets")
    pf.add_argument("names", nargs="*", help=f"datasets: {', '.join(sorted(REGISTRY))}")
    pf.add_argument("--source", help="local raw file to convert instead of downloading")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    verbose = args.verbose
    del args.verbose
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command = args.command
    try:
        cfg = _resolve(args)
        if command == "fetch" and args.out_dir is not None and cfg.get("data_dir") is None:
            cfg["out_dir_explicit"] = args.out_dir
        _set_threads(cfg["threads"])
        written = COMMANDS[command](cfg)
        if command != "fetch":
            cfg_path = _out_dir(cfg) / "config.json"
            _write_json(cfg_path, {"command": command, **_recorded(cfg)})
            written.append(cfg_path)
    except (UsageError, GraphError, DatasetError, ValueError, OSError) as exc:
        print(f"bilink {command}: error: {exc}", file=sys.stderr)
        return 2
    except EvaluationError as exc:
        print(f"bilink {command}: method failure: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
