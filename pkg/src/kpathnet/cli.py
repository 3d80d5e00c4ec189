"""``kpathnet`` command line: generate, weight, detect, evaluate, experiment.

Every subcommand that writes files also writes ``<output>.manifest.json``
holding the exact argument vector, parameters and SHA-256 checksums of its
inputs and outputs. Rerunning ``kpathnet`` with the recorded ``argv``
reproduces the primary outputs byte for byte.

Exit codes: 0 ok, 1 unexpected library error, 2 bad argument or invalid
value, 3 parse error, 4 domain error, 5 generation failure, 6 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np

from . import oracle, synthgen
from .community import (CopraConfig, LouvainConfig, Partition,
                        align_partition, copra, louvain, modularity,
                        q_gain_percent, write_cover, write_partition)
from .community.partition import read_cover, read_partition
from .errors import KpathError
from .experiment import ALGORITHMS, run_cell
from .graph import load_edge_list, write_weighted_edge_list
from .kpath import Convention, SourcePolicy, WalkConfig, werw_kpath
from .metrics import nmi

SCHEMA_VERSION = 1
EXIT_IO = 6
THREADS_ENV = "KPATHNET_THREADS"

CSV_FIELDS = ("schema_version", "benchmark", "n", "avg_degree", "gamma", "beta", "mu",
              "algo", "weighted", "runs", "mean_q", "mean_nmi", "ttest_p", "ttest_p_q",
              "error")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class Manifest:
    """Collects what a run needs to be replayed and written next to its output."""

    def __init__(self, subcommand: str, argv: list[str], params: dict):
        self.data = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": _version(),
            "subcommand": subcommand,
            "argv": list(argv),
            "params": params,
            "started": _now(),
            "inputs": {},
            "outputs": {},
        }
        self._t0 = time.perf_counter()

    def add_input(self, role: str, path) -> None:
        self.data["inputs"][role] = {"path": os.fspath(path), "sha256": _sha256(path)}

    def add_output(self, role: str, path) -> None:
        self.data["outputs"][role] = {"path": os.fspath(path), "sha256": _sha256(path)}

    def write(self, path, **extra) -> Path:
        self.data.update(extra)
        self.data["finished"] = _now()
        self.data["runtime_ms"] = round((time.perf_counter() - self._t0) * 1000, 3)
        path = Path(path)
        path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def manifest_path(output) -> Path:
    return Path(os.fspath(output) + ".manifest.json")


def _cmd_gen(args, argv) -> int:
    spec = synthgen.GenSpec(n=args.n, avg_degree=args.avg_degree, gamma=args.gamma,
                            beta=args.beta, mu=args.mu, max_degree=args.max_degree,
                            min_community=args.min_community, seed=args.seed)
    man = Manifest("gen", argv, {"spec": asdict(spec)})
    bench = synthgen.generate(spec)
    Path(args.out_prefix).parent.mkdir(parents=True, exist_ok=True)
    paths = synthgen.write_benchmark(bench, args.out_prefix)
    for role, p in paths.items():
        man.add_output(role, p)
    man.write(manifest_path(args.out_prefix))
    print(f"{bench.graph.n} vertices, {bench.graph.edge_count} edges, "
          f"{len(bench.community_sizes)} communities, mu={bench.realized_mu:.4f}")
    return 0


def _cmd_grid(args, argv) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    specs = synthgen.parameter_grid(n=args.n, seed=args.seed)
    man = Manifest("grid", argv, {"n": args.n, "seed": args.seed, "cells": len(specs)})
    for spec in specs:
        paths = synthgen.write_benchmark(synthgen.generate(spec), out / spec.tag())
        for role, p in paths.items():
            man.add_output(f"{spec.tag()}:{role}", p)
    man.write(out / "manifest.json")
    print(f"wrote {len(specs)} benchmarks to {out}")
    return 0


def _cmd_weight(args, argv) -> int:
    cfg = WalkConfig(kappa=args.kappa, rho=args.rho, seed=args.seed,
                     source_policy=args.source_policy, convention=args.convention,
                     static_weights=args.static_weights)
    g = load_edge_list(args.graph)
    man = Manifest("weight", argv, {"walk": {**asdict(cfg),
                                             "source_policy": cfg.source_policy.value,
                                             "convention": cfg.convention.value}})
    man.add_input("graph", args.graph)
    t0 = time.perf_counter()
    c = werw_kpath(g, cfg)
    elapsed = time.perf_counter() - t0
    write_weighted_edge_list(g, c, args.output)
    man.add_output("weighted_graph", args.output)
    man.write(manifest_path(args.output), rho_used=c.rho_used)
    print(f"edges={g.edge_count} rho={c.rho_used} kappa={c.kappa_used} time={elapsed:.3f}s")
    return 0


def _cmd_detect(args, argv) -> int:
    g = load_edge_list(args.graph)
    weights = np.ones(g.edge_count) if args.unweighted else None
    if args.algo == "louvain":
        cfg = LouvainConfig(seed=args.seed, min_gain=args.min_gain)
        res = louvain(g, cfg, weights=weights)
        part = res.partition
        write_partition(part, args.output, labels=g.labels)
    else:
        cfg = CopraConfig(v_max=args.vmax, max_iterations=args.max_iterations, seed=args.seed)
        res = copra(g, cfg, weights=weights)
        part = res.cover.crisp()
        write_cover(res.cover, args.output, labels=g.labels)
    q = modularity(g, part, weights=weights)
    man = Manifest("detect", argv, {"algo": args.algo, "config": asdict(cfg),
                                    "unweighted": args.unweighted})
    man.add_input("graph", args.graph)
    man.add_output("partition", args.output)
    man.write(manifest_path(args.output), modularity=q, communities=part.community_count)
    print(f"communities={part.community_count} Q={q:.6f}")
    return 0


def load_any_partition(path, labels) -> Partition:
    """Read a crisp or cover file and align it to a graph's vertex ids."""
    text = Path(path).read_text(encoding="utf-8")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith(("#", "%"))]
    if any(":" in ln for ln in body):
        cover = read_cover(io.StringIO(text))
        # strongest membership per vertex, lowest id on ties
        strongest = {v: min(m.items(), key=lambda kv: (-kv[1], kv[0]))[0]
                     for v, m in cover.items() if m}
        return align_partition(strongest, labels)
    return align_partition(read_partition(io.StringIO(text)), labels)


def build_eval_report(g, a: Partition, b: Partition | None, truth: Partition | None,
                      weights=None) -> dict:
    report: dict = {"schema_version": SCHEMA_VERSION, "vertices": g.n, "edges": g.edge_count,
                    "q": {"a": modularity(g, a, weights=weights)},
                    "communities": {"a": a.community_count}, "nmi": {}}
    if b is not None:
        report["q"]["b"] = modularity(g, b, weights=weights)
        report["communities"]["b"] = b.community_count
        report["nmi"]["a_vs_b"] = nmi(a, b)
        qa, qb = report["q"]["a"], report["q"]["b"]
        report["q_gain_percent"] = q_gain_percent(qa, qb) if qa != 0 else None
        report["q_gain"] = f"{qb:.3f} [{report['q_gain_percent']:+.1f}%]" if qa != 0 else None
    if truth is not None:
        report["q"]["truth"] = modularity(g, truth, weights=weights)
        report["nmi"]["a_vs_truth"] = nmi(a, truth)
        if b is not None:
            report["nmi"]["b_vs_truth"] = nmi(b, truth)
    return report


def _cmd_eval(args, argv) -> int:
    if args.partition_b is None and args.truth is None:
        raise _UsageError("eval needs a second partition or --truth")
    g = load_edge_list(args.graph)
    weights = np.ones(g.edge_count) if args.unweighted else None
    a = load_any_partition(args.partition_a, g.labels)
    b = load_any_partition(args.partition_b, g.labels) if args.partition_b else None
    truth = load_any_partition(args.truth, g.labels) if args.truth else None
    report = build_eval_report(g, a, b, truth, weights)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        man = Manifest("eval", argv, {"unweighted": args.unweighted})
        man.add_input("graph", args.graph)
        man.add_input("partition_a", args.partition_a)
        if args.partition_b:
            man.add_input("partition_b", args.partition_b)
        if args.truth:
            man.add_input("truth", args.truth)
        man.add_output("report", args.output)
        man.write(manifest_path(args.output))
    sys.stdout.write(text)
    return 0


def _discover(grid_dir: Path) -> list[tuple[str, Path, Path, dict]]:
    found = []
    for edges in sorted(grid_dir.glob("*.edges")):
        stem = edges.with_suffix("")
        truth, side = stem.with_suffix(".truth"), stem.with_suffix(".json")
        spec = json.loads(side.read_text(encoding="utf-8"))["spec"] if side.exists() else {}
        found.append((stem.name, edges, truth, spec))
    return found


def _experiment_cell(task):
    name, edges, truth_path, spec, algo, runs, seed_base, kappa = task
    base = {"schema_version": SCHEMA_VERSION, "benchmark": name,
            **{k: spec.get(k, "") for k in ("n", "avg_degree", "gamma", "beta", "mu")},
            "algo": algo, "runs": runs}
    try:
        g = load_edge_list(edges)
        truth = load_any_partition(truth_path, g.labels)
        cell = run_cell(g, truth, algo, runs=runs, seed_base=seed_base, kappa=kappa)
    except (KpathError, OSError) as exc:
        err = f"{type(exc).__name__}: {exc}"
        return [{**base, "weighted": w, "mean_q": "", "mean_nmi": "", "ttest_p": "",
                 "ttest_p_q": "", "error": err} for w in (0, 1)]
    p, pq = cell.ttest_p, cell.ttest_p_q
    rows = []
    for arm in (cell.unweighted, cell.weighted):
        rows.append({**base, "weighted": int(arm.weighted), "mean_q": repr(arm.mean_q),
                     "mean_nmi": repr(arm.mean_nmi),
                     "ttest_p": "" if math.isnan(p) else repr(p),
                     "ttest_p_q": "" if math.isnan(pq) else repr(pq), "error": ""})
    return rows


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise _UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _cmd_experiment(args, argv) -> int:
    grid = Path(args.grid_dir)
    if not grid.is_dir():
        raise FileNotFoundError(f"grid directory not found: {grid}")
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise _UsageError(f"unknown algorithm(s): {', '.join(bad) or '(none)'}")
    benches = _discover(grid)
    if not benches:
        raise FileNotFoundError(f"no *.edges files in {grid}")
    threads = args.threads or default_threads()
    tasks = [(name, e, t, s, a, args.runs, args.seed_base, args.kappa)
             for name, e, t, s in benches for a in algos]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_experiment_cell, tasks))
    else:
        chunks = [_experiment_cell(t) for t in tasks]
    rows = sorted((r for c in chunks for r in c),
                  key=lambda r: (r["benchmark"], r["algo"], r["weighted"]))
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    man = Manifest("experiment", argv, {"algos": algos, "runs": args.runs,
                                        "seed_base": args.seed_base, "kappa": args.kappa})
    for name, e, t, _ in benches:
        man.add_input(f"{name}:graph", e)
        if t.exists():
            man.add_input(f"{name}:truth", t)
    man.add_output("csv", args.output)
    man.write(manifest_path(args.output), threads=threads)
    failed = sum(1 for r in rows if r["error"])
    print(f"{len(rows)} rows ({failed} failed) -> {args.output}")
    return 0


def _cmd_oracle(args, argv) -> int:
    g = load_edge_list(args.graph)
    lab = g.labels.tolist()
    edges = [[lab[u], lab[v]] for u, v in zip(g.src.tolist(), g.dst.tolist())]
    if args.kind == "walk":
        d = oracle.exact_walk_distribution(g, args.kappa, args.source_policy)
        out = {"kappa": args.kappa, "source_policy": args.source_policy,
               "edges": edges, "probability": d.edge_probability.tolist()}
    elif args.kind == "modularity":
        r = oracle.exhaustive_modularity_max(g)
        out = {"q": r.q, "enumerated": r.enumerated,
               "partition": dict(zip(map(str, lab), r.labels.tolist()))}
    else:
        out = {"edges": edges, "betweenness": oracle.edge_betweenness(g).tolist()}
    sys.stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, **out}, indent=2) + "\n")
    return 0


class _UsageError(Exception):
    pass


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kpathnet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", help="generate one planted-partition benchmark")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--avg-degree", type=float, default=20.0)
    s.add_argument("--gamma", type=float, default=2.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--mu", type=float, default=0.1)
    s.add_argument("--max-degree", type=int)
    s.add_argument("--min-community", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--out-prefix", required=True)
    s.set_defaults(func=_cmd_gen)

    s = sub.add_parser("grid", help="generate the 72-cell benchmark grid")
    s.add_argument("out_dir")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_grid)

    s = sub.add_parser("weight", help="weight edges by k-path centrality")
    s.add_argument("graph")
    s.add_argument("--kappa", type=int, default=20)
    s.add_argument("--rho", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--source-policy", choices=[x.value for x in SourcePolicy], default="degree")
    s.add_argument("--convention", choices=[x.value for x in Convention], default="theorem")
    s.add_argument("--static-weights", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=_cmd_weight)

    s = sub.add_parser("detect", help="detect communities")
    s.add_argument("graph")
    s.add_argument("--algo", choices=ALGORITHMS, default="louvain")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--vmax", type=int, default=1)
    s.add_argument("--max-iterations", type=int, default=100)
    s.add_argument("--min-gain", type=float, default=1e-12)
    s.add_argument("--unweighted", action="store_true", help="ignore the weight column")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=_cmd_detect)

    s = sub.add_parser("eval", help="compare partitions; JSON report on stdout")
    s.add_argument("graph")
    s.add_argument("partition_a")
    s.add_argument("partition_b", nargs="?")
    s.add_argument("--truth")
    s.add_argument("--unweighted", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_eval)

    s = sub.add_parser("experiment", help="weighted vs unweighted detection over a grid")
    s.add_argument("--grid-dir", required=True)
    s.add_argument("--algos", default="louvain,copra")
    s.add_argument("--runs", type=_positive, default=10)
    s.add_argument("--seed-base", type=int, default=0)
    s.add_argument("--kappa", type=_positive, default=20)
    s.add_argument("--threads", type=_positive, help=f"worker processes (default ${THREADS_ENV} or 1)")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=_cmd_experiment)

    s = sub.add_parser("oracle", help="brute-force references for tiny graphs")
    s.add_argument("kind", choices=("walk", "modularity", "betweenness"))
    s.add_argument("graph")
    s.add_argument("--kappa", type=int, default=2)
    s.add_argument("--source-policy", choices=[x.value for x in SourcePolicy], default="degree")
    s.set_defaults(func=_cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"kpathnet: error: {exc}", file=sys.stderr)
        return 2
    except KpathError as exc:
        print(f"kpathnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"kpathnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
