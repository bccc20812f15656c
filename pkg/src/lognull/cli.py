"""Command-line surface: detect, loglik, generate, eval, sweep.

Single runs emit a JSON record on stdout; sweeps emit CSV. All commands are
deterministic for a fixed --seed (the LOGNULL_SEED environment variable
supplies a default): timing is reported only under --timing so repeated runs
are byte-identical.

Exit codes: 0 success, 1 usage error, 2 input/validation error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import (
    GraphError,
    Partition,
    compute_stats,
    load_edge_list,
    load_partition,
    write_edge_list,
    write_partition,
)
from .lfr import LfrConfig, LfrConfigError, generate
from .optimizer import louvain
from .metrics import jaccard_index, nmi, rand_index
from .models import (
    DegeneratePartitionError,
    QualityModel,
    estimate_params,
    evaluate,
    loglik_at,
    modularity,
    simple_modularity,
)
from .strategies import (
    GridConfig,
    IterativeConfig,
    run_iterative,
    run_maximization,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

_MODEL_CHOICES = ("ppm", "dcppm", "ilfr", "ilfrs", "modularity", "simple")
_STRATEGY_CHOICES = ("iterative", "max", "fixed")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunRecord:
    """One detection run, in the shape of the experiment tables."""

    dataset: str
    model: str
    strategy: str
    seed: int
    params: dict = field(default_factory=dict)
    loglik: float | None = None
    modularity: float | None = None
    k: int = 0
    nmi: float | None = None
    rand: float | None = None
    jaccard: float | None = None
    evaluations: int = 0
    stop_reason: str = ""
    wall_time_s: float | None = None
    error: str = ""


def _default_seed():
    return int(os.environ.get("LOGNULL_SEED", "0"))


def _params_dict(est):
    out = {}
    if est is None:
        return out
    for key in ("p_in", "p_out", "mu", "gamma"):
        value = getattr(est, key, None)
        if value is not None:
            out[key] = round(float(value), 10)
    return out


def _detect_once(graph, model, strategy, param, seed):
    """(partition, record fields) for one (model, strategy) run."""
    if strategy == "fixed":
        if param is None:
            raise _UsageError("--strategy fixed requires --param")
        if model in ("modularity", "simple"):
            qm = QualityModel(model, gamma=param)
        elif model in ("ppm", "dcppm"):
            # one free parameter on the command line: resolution, as the
            # fixed-parameter likelihoods are modularity-equivalent
            qm = QualityModel(
                "simple" if model == "ppm" else "modularity", gamma=param
            )
        else:
            qm = QualityModel(model, mu=param)
        partition = louvain(graph, qm, seed=seed)
        stats = compute_stats(graph, partition)
        fields = {"params": {"fixed": param}, "evaluations": 1, "stop_reason": "fixed"}
        if model not in ("modularity", "simple"):
            try:
                est = estimate_params(graph, stats, model)
                fields["params"] = _params_dict(est)
                fields["loglik"] = loglik_at(graph, stats, est)
            except DegeneratePartitionError:
                pass
        return partition, fields
    if model in ("modularity", "simple"):
        raise _UsageError(
            f"--model {model} supports only --strategy fixed (pass --param gamma)"
        )
    run = run_iterative if strategy == "iterative" else run_maximization
    result = run(graph, model, seed=seed)
    return result.partition, {
        "params": _params_dict(result.params),
        "loglik": result.loglik if np.isfinite(result.loglik) else None,
        "evaluations": result.evaluations,
        "stop_reason": result.stop_reason,
    }


def cmd_detect(args):
    graph = load_edge_list(args.graph)
    t0 = time.perf_counter()
    partition, fields = _detect_once(
        graph, args.model, args.strategy, args.param, args.seed
    )
    elapsed = time.perf_counter() - t0
    stats = compute_stats(graph, partition)
    record = RunRecord(
        dataset=args.graph,
        model=args.model,
        strategy=args.strategy,
        seed=args.seed,
        modularity=modularity(stats, 1.0),
        k=partition.k,
        **fields,
    )
    if args.ground_truth:
        gt = load_partition(args.ground_truth, graph)
        record.nmi = nmi(partition, gt)
        record.rand = rand_index(partition, gt)
        record.jaccard = jaccard_index(partition, gt)
    if args.timing:
        record.wall_time_s = elapsed
    if args.out:
        write_partition(partition, args.out, graph=graph)
    payload = {k: v for k, v in asdict(record).items() if v is not None}
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_loglik(args):
    graph = load_edge_list(args.graph)
    partition = load_partition(args.partition, graph)
    stats = compute_stats(graph, partition)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["model", "p_in", "p_out", "mu", "gamma", "value"])

    def fmt(x):
        return "" if x is None else f"{x:.6f}"

    for kind in ("ppm", "dcppm", "ilfr", "ilfrs"):
        est = estimate_params(graph, stats, kind)
        value = loglik_at(graph, stats, est)
        writer.writerow(
            [kind, fmt(est.p_in), fmt(est.p_out), fmt(est.mu), fmt(est.gamma), fmt(value)]
        )
    writer.writerow(
        ["simple", "", "", "", fmt(1.0), fmt(simple_modularity(stats, 1.0))]
    )
    writer.writerow(
        ["modularity", "", "", "", fmt(1.0), fmt(modularity(stats, 1.0))]
    )
    return EXIT_OK


def cmd_generate(args):
    config = LfrConfig(
        n=args.n,
        degree_exponent=args.gamma_d,
        mean_degree=args.dbar,
        size_exponent=args.beta,
        s_min=args.smin,
        s_max=args.smax,
        mu_target=args.mu,
        d_max=args.dmax,
        seed=args.seed,
    )
    graph, partition, info = generate(config)
    write_edge_list(graph, f"{args.out}.edges")
    write_partition(partition, f"{args.out}.clusters", graph=graph)
    meta = {
        "n": config.n,
        "m": len(graph.edges),
        "k": partition.k,
        "mu_target": config.mu_target,
        "realized_mixing": info.realized_mixing,
        "realized_mean_degree": info.realized_mean_degree,
        "degree_lower_cutoff": info.degree_lower_cutoff,
        "dropped_stub_pairs": info.dropped_stub_pairs,
        "rewire_warning": info.rewire_warning,
        "seed": config.seed,
    }
    with open(f"{args.out}.json", "w", encoding="utf-8") as f:
        json.dump(meta, f, sort_keys=True, indent=2)
        f.write("\n")
    print(json.dumps(meta, sort_keys=True))
    return EXIT_OK


def _load_label_partition(path):
    pairs = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise GraphError(f"{path}:{line_no}: expected 2 tokens")
            if tokens[0] in pairs:
                raise GraphError(f"{path}:{line_no}: duplicate vertex {tokens[0]!r}")
            pairs[tokens[0]] = tokens[1]
    return pairs


def cmd_eval(args):
    pa = _load_label_partition(args.partition_a)
    pb = _load_label_partition(args.partition_b)
    if set(pa) != set(pb):
        raise GraphError("partition files cover different vertex sets")
    order = sorted(pa)
    ids_a = {}
    ids_b = {}
    a = Partition([ids_a.setdefault(pa[v], len(ids_a)) for v in order])
    b = Partition([ids_b.setdefault(pb[v], len(ids_b)) for v in order])
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["nmi", "rand", "jaccard"])
    writer.writerow(
        [f"{nmi(a, b):.6f}", f"{rand_index(a, b):.6f}", f"{jaccard_index(a, b):.6f}"]
    )
    return EXIT_OK


def _sweep_cell(task):
    """One (mu, repeat, model, strategy) run; returns a RunRecord dict."""
    (mu, rep, model, strategy, lfr_kwargs, seed) = task
    record = RunRecord(
        dataset=f"lfr(mu={mu},rep={rep})",
        model=model,
        strategy=strategy,
        seed=seed,
    )
    try:
        config = LfrConfig(mu_target=mu, seed=seed, **lfr_kwargs)
        graph, planted, _ = generate(config)
        partition, fields = _detect_once(graph, model, strategy, None, seed)
        stats = compute_stats(graph, partition)
        record.params = fields.get("params", {})
        record.loglik = fields.get("loglik")
        record.evaluations = fields.get("evaluations", 0)
        record.stop_reason = fields.get("stop_reason", "")
        record.modularity = modularity(stats, 1.0)
        record.k = partition.k
        record.nmi = nmi(partition, planted)
        record.rand = rand_index(partition, planted)
        record.jaccard = jaccard_index(partition, planted)
    except Exception as exc:  # recorded, sweep continues
        record.error = f"{type(exc).__name__}: {exc}"
    return asdict(record)


_SWEEP_COLUMNS = [
    "dataset",
    "model",
    "strategy",
    "seed",
    "params",
    "loglik",
    "modularity",
    "k",
    "nmi",
    "rand",
    "jaccard",
    "evaluations",
    "stop_reason",
    "wall_time_s",
    "error",
]


def cmd_sweep(args):
    if args.repeats < 1:
        raise _UsageError("--repeats must be >= 1")
    mus = [float(x) for x in args.mu_list.split(",") if x]
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for m in models:
        if m not in _MODEL_CHOICES:
            raise _UsageError(f"unknown model {m!r}")
    for s in strategies:
        if s not in _STRATEGY_CHOICES or s == "fixed":
            raise _UsageError(f"sweep supports strategies iterative/max, not {s!r}")
    lfr_kwargs = dict(
        n=args.n,
        degree_exponent=args.gamma_d,
        mean_degree=args.dbar,
        size_exponent=args.beta,
        s_min=args.smin,
        s_max=args.smax,
        d_max=args.dmax,
    )
    tasks = []
    for mi, mu in enumerate(mus):
        for rep in range(args.repeats):
            seed = args.seed + 1000 * mi + rep
            for model in models:
                for strategy in strategies:
                    tasks.append((mu, rep, model, strategy, lfr_kwargs, seed))
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_sweep_cell, tasks))
    else:
        records = [_sweep_cell(t) for t in tasks]
    records.sort(key=lambda r: (r["dataset"], r["model"], r["strategy"], r["seed"]))

    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=_SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        rec = dict(rec)
        rec["params"] = json.dumps(rec["params"], sort_keys=True)
        if not args.timing:
            rec["wall_time_s"] = None
        writer.writerow(
            {k: ("" if rec.get(k) is None else rec.get(k)) for k in _SWEEP_COLUMNS}
        )
    text = out.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _build_parser():
    parser = _Parser(
        prog="lognull",
        description="Fit random-graph null models to networks by likelihood "
        "maximization and evaluate the detected communities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect communities in an edge-list file")
    p.add_argument("graph")
    p.add_argument("--model", required=True, choices=_MODEL_CHOICES)
    p.add_argument("--strategy", default="iterative", choices=_STRATEGY_CHOICES)
    p.add_argument("--param", type=float, help="fixed gamma or mu (strategy=fixed)")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="write the partition to this file")
    p.add_argument("--ground-truth", help="partition file to score against")
    p.add_argument("--timing", action="store_true", help="include wall time")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("loglik", help="score a given partition under every model")
    p.add_argument("graph")
    p.add_argument("partition")
    p.set_defaults(func=cmd_loglik)

    p = sub.add_parser("generate", help="generate a synthetic benchmark graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--gamma-d", type=float, default=2.5, help="degree exponent")
    p.add_argument("--dbar", type=float, default=30.0, help="mean degree")
    p.add_argument("--beta", type=float, default=1.5, help="community size exponent")
    p.add_argument("--smin", type=int, default=50)
    p.add_argument("--smax", type=int, default=600)
    p.add_argument("--mu", type=float, required=True, help="target mixing fraction")
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="compare two partition files")
    p.add_argument("partition_a")
    p.add_argument("partition_b")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="benchmark models over generated graphs")
    p.add_argument("--mu-list", required=True, help="comma-separated mixing values")
    p.add_argument("--models", default="ppm,dcppm,ilfr,ilfrs")
    p.add_argument("--strategies", default="iterative,max")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--gamma-d", type=float, default=2.5)
    p.add_argument("--dbar", type=float, default=30.0)
    p.add_argument("--beta", type=float, default=1.5)
    p.add_argument("--smin", type=int, default=50)
    p.add_argument("--smax", type=int, default=200)
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, LfrConfigError, DegeneratePartitionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
