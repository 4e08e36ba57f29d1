"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 generation failure, 4 I/O error.
Relative output paths resolve against ``$UUMCGEN_OUTPUT_DIR`` when it is set.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._rng import make_rng
from .dataset import STATIC, TIMESERIES, read_csv, write_csv
from .errors import (
    DegenerateDataError,
    DegenerateDrawError,
    GenerationError,
    ParameterError,
    StructuralError,
    UnstableError,
)
from .experiments import ExperimentConfig, run_experiment
from .graph import (
    Dag,
    TsGraph,
    dag_to_dict,
    gen_er_dag,
    gen_er_ts_graph,
    graph_from_dict,
    summary_graph,
    ts_graph_to_dict,
)
from .scmgen import METHODS, SAMPLE_COUPLED, generate, scm_from_dict, scm_to_dict
from .simulate import simulate_static, simulate_svar, standardize_sample
from .sortability import (
    pairwise_sortability,
    r2_metric,
    r2_ts_metric,
    r2star_ts_metric,
    report_dict,
    ts_sortability,
    var_metric,
)
from .svargen import gen_uumc_svar, svar_from_dict, svar_to_dict

EXIT_OK, EXIT_VALIDATION, EXIT_GENERATION, EXIT_IO = 0, 2, 3, 4
OUTPUT_DIR_ENV = "UUMCGEN_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _out_path(path: str | None, default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    p = Path(path) if path else Path(default_name)
    return p if p.is_absolute() else base / p


def _write_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", EXIT_VALIDATION) from None


def _load_graph(path: str) -> Dag | TsGraph:
    return graph_from_dict(_read_json(path))


def _load_model(path: str):
    d = _read_json(path)
    return svar_from_dict(d) if "tau_max" in d else scm_from_dict(d)


def _check_support(model, graph) -> None:
    """Model weights must live on the graph's edges."""
    weights = model.weights
    adj = graph.adj
    if weights.shape[0] != adj.shape[0]:
        raise CliError(
            f"model has n={weights.shape[0]} variables but graph has n={adj.shape[0]}", EXIT_VALIDATION
        )
    if weights.ndim == 3:
        if not isinstance(graph, TsGraph) or weights.shape[2] != adj.shape[2]:
            raise CliError("time-series model needs a time-series graph with the same tau_max", EXIT_VALIDATION)
    elif isinstance(graph, TsGraph):
        raise CliError("static model given a time-series graph", EXIT_VALIDATION)
    if ((weights != 0) & ~adj).any():
        raise CliError("model has nonzero weights on edges absent from the graph", EXIT_VALIDATION)


def cmd_gen_graph(args) -> str:
    rng = make_rng(args.seed)
    if args.tau_max is None:
        g = gen_er_dag(args.nodes, args.edge_prob, rng)
        payload, desc = dag_to_dict(g), f"DAG n={g.n} edges={g.n_edges}"
    else:
        g = gen_er_ts_graph(args.nodes, args.edge_prob, args.auto_prob, args.tau_max, rng)
        payload = ts_graph_to_dict(g)
        desc = f"time-series graph n={g.n} tau_max={g.tau_max} lagged edges={len(payload['lagged_edges'])}"
    out = _out_path(args.out, "graph.json")
    _write_json(payload, out)
    return f"wrote {desc} to {out}"


def cmd_gen_scm(args) -> str:
    graph = _load_graph(args.graph)
    if not isinstance(graph, Dag):
        raise CliError("gen-scm needs a static graph; use gen-svar for time-series graphs", EXIT_VALIDATION)
    rng = make_rng(args.seed)
    bounds = {} if args.method == "uumc" else {"coef_low": args.coef_low, "coef_high": args.coef_high}
    if args.method in SAMPLE_COUPLED:
        if args.samples is None or args.emit_data is None:
            raise CliError(
                f"method {args.method!r} generates its data jointly; pass --samples and --emit-data",
                EXIT_VALIDATION,
            )
        scm, ds = generate(args.method, graph, rng, n_samples=args.samples, **bounds)
        data_out = _out_path(args.emit_data, "data.csv")
        data_out.parent.mkdir(parents=True, exist_ok=True)
        write_csv(ds, data_out)
    else:
        scm = generate(args.method, graph, rng, **bounds)
    out = _out_path(args.out, "scm.json")
    _write_json(scm_to_dict(scm, seed=args.seed), out)
    return f"wrote {args.method} SCM n={scm.n} to {out}"


def cmd_gen_svar(args) -> str:
    graph = _load_graph(args.graph)
    if not isinstance(graph, TsGraph):
        raise CliError("gen-svar needs a time-series graph (lagged_edges)", EXIT_VALIDATION)
    svar = gen_uumc_svar(graph, make_rng(args.seed), max_retries=args.max_retries)
    out = _out_path(args.out, "svar.json")
    _write_json(svar_to_dict(svar, seed=args.seed), out)
    return (
        f"wrote SVAR n={svar.n} tau_max={svar.tau_max} delta={svar.delta:.4f} "
        f"spectral radius={svar.spectral_radius:.4f} to {out}"
    )


def cmd_simulate(args) -> str:
    model = _load_model(args.model)
    if args.graph:
        _check_support(model, _load_graph(args.graph))
    rng = make_rng(args.seed)
    if model.weights.ndim == 3:
        if args.t_len is None:
            raise CliError("time-series model needs --t-len", EXIT_VALIDATION)
        ds = simulate_svar(model, args.t_len, rng, init=args.init.replace("-", "_"), burn_in=args.burn_in)
    else:
        if model.sample_coupled:
            raise CliError(
                f"method {model.method!r} is sample-coupled; its data comes from gen-scm --emit-data",
                EXIT_VALIDATION,
            )
        if args.samples is None:
            raise CliError("static model needs --samples", EXIT_VALIDATION)
        ds = simulate_static(model, args.samples, rng)
    if args.standardize:
        ds = standardize_sample(ds)
    out = _out_path(args.out, "data.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(ds, out)
    return f"wrote {ds.n_rows} rows x {ds.n_vars} variables to {out}"


_METRICS = {"var", "r2", "r2star", "r2ts"}


def cmd_sortability(args) -> str:
    graph = _load_graph(args.graph)
    ts_metric = args.metric in ("r2star", "r2ts")
    if ts_metric and args.tau_max is None:
        raise CliError(f"--metric {args.metric} requires --tau-max", EXIT_VALIDATION)
    kind = TIMESERIES if (ts_metric or isinstance(graph, TsGraph)) else STATIC
    try:
        ds = read_csv(args.data, kind=kind, tau_max=args.tau_max)
    except OSError as exc:
        raise CliError(f"cannot read {args.data}: {exc.strerror}", EXIT_IO) from None
    if ds.n_vars != graph.n:
        raise CliError(
            f"dimension mismatch: data has {ds.n_vars} columns, graph has {graph.n} nodes", EXIT_VALIDATION
        )
    if args.metric == "var":
        metric = var_metric(ds)
    elif args.metric == "r2":
        metric = r2_metric(ds)
    elif args.metric == "r2star":
        metric = r2star_ts_metric(ds, args.tau_max)
    else:
        metric = r2_ts_metric(ds, args.tau_max)
    if isinstance(graph, TsGraph):
        result = ts_sortability(metric, graph, tol=args.tol)
    else:
        result = pairwise_sortability(metric, graph.adj, tol=args.tol)
    report = report_dict(metric, result)
    out = _out_path(args.out, "sortability.json")
    _write_json(report, out)
    return f"{args.metric}-sortability = {result.score:.4f} over {result.n_pairs} pairs; wrote {out}"


def cmd_experiment(args) -> str:
    common = dict(seed=args.seed, replicates=args.replicates)
    if args.experiment == "sortability-dist":
        reports = []
        for p in args.edge_probs:
            cfg = ExperimentConfig(
                "sortability-dist", method=args.method, n=args.nodes, p=p,
                samples=args.samples, standardize=args.standardize, **common,
            )
            reports.append(run_experiment(cfg).to_dict())
        payload = {"reports": reports, "version": __version__}
        lines = [
            f"p={r['config']['p']}: mean var={r['results']['var']['mean']:.4f} "
            f"mean r2={r['results']['r2']['mean']:.4f} skew r2={r['results']['r2']['skew']:.4f}"
            for r in reports
        ]
    else:
        if args.experiment == "triples":
            cfg = ExperimentConfig("triples", triple=args.kind, samples=args.samples, **common)
        elif args.experiment == "hub":
            cfg = ExperimentConfig("hub", max_degree=args.max_degree, samples=args.samples, **common)
        else:
            cfg = ExperimentConfig("ts-pair", t_len=args.t_len, **common)
        payload = run_experiment(cfg).to_dict()
        lines = [_experiment_line(payload)]
    out = _out_path(args.out, f"{args.experiment}.json")
    _write_json(payload, out)
    return "\n".join(lines + [f"wrote {out}"])


def _experiment_line(rep: dict) -> str:
    res, kind = rep["results"], rep["config"]["kind"]
    if kind == "triples":
        return f"hub R2 mean={res['hub']['mean']:.4f}, noise bound mean={res['hub_bound_mean']:.4f}"
    if kind == "hub":
        return "collider means " + str(np.round(res["collider_mean"], 4).tolist()) + \
            "; confounder means " + str(np.round(res["confounder_mean"], 4).tolist())
    return f"source R2 mean={res['source']['mean']:.4f}, target R2 mean={res['target']['mean']:.4f}"


def _prob(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1], got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uumcgen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="sample an Erdos-Renyi DAG or time-series graph")
    p.add_argument("--nodes", type=_positive, required=True)
    p.add_argument("--edge-prob", type=_prob, required=True, help="edge (cross-edge) probability")
    p.add_argument("--tau-max", type=int, help="sample a time-series graph with this maximum lag")
    p.add_argument("--auto-prob", type=_prob, default=0.8, help="self-edge probability (time series)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("gen-scm", help="sample a static SCM over a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--method", choices=METHODS, default="uumc")
    p.add_argument("--coef-low", type=float, default=0.5)
    p.add_argument("--coef-high", type=float, default=2.0)
    p.add_argument("--samples", type=_positive, help="sample size for sample-coupled methods")
    p.add_argument("--emit-data", help="CSV path for data of sample-coupled methods")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_scm)

    p = sub.add_parser("gen-svar", help="sample a standardized SVAR over a time-series graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-retries", type=_positive, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_svar)

    p = sub.add_parser("simulate", help="draw data from an SCM or SVAR model file")
    p.add_argument("--model", required=True)
    p.add_argument("--graph", help="check the model against this graph")
    p.add_argument("--samples", type=_positive)
    p.add_argument("--t-len", type=_positive)
    p.add_argument("--init", choices=("stationary", "burn-in"), default="stationary")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sortability", help="score a dataset against its graph")
    p.add_argument("--data", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--metric", choices=sorted(_METRICS), default="var")
    p.add_argument("--tau-max", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sortability)

    p = sub.add_parser("experiment", help="run a Monte-Carlo experiment")
    esub = p.add_subparsers(dest="experiment", required=True)
    for name, help_ in (
        ("sortability-dist", "var/R2-sortability distributions on ER graphs"),
        ("triples", "per-node R2 in unshielded triples"),
        ("hub", "hub R2 of colliders and confounders versus degree"),
        ("ts-pair", "time-series R2 of the two-process SVAR"),
    ):
        e = esub.add_parser(name, help=help_)
        e.add_argument("--seed", type=int, required=True)
        e.add_argument("--replicates", type=_positive, default=500)
        e.add_argument("--out")
        e.set_defaults(func=cmd_experiment)
        if name == "sortability-dist":
            e.add_argument("--method", choices=METHODS, default="uumc")
            e.add_argument("--nodes", type=_positive, default=20)
            e.add_argument("--edge-probs", type=_prob, nargs="+", default=[0.1, 0.3, 0.5])
            e.add_argument("--samples", type=_positive, default=100)
            e.add_argument("--standardize", action="store_true")
        elif name == "triples":
            e.add_argument("--kind", choices=("collider", "chain", "confounder"), required=True)
            e.add_argument("--samples", type=_positive, default=500)
        elif name == "hub":
            e.add_argument("--max-degree", type=int, default=5)
            e.add_argument("--samples", type=_positive, default=500)
        else:
            e.add_argument("--t-len", type=_positive, default=1000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        print(args.func(args))
        return EXIT_OK
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (GenerationError, UnstableError, DegenerateDrawError) as exc:
        rho = getattr(exc, "spectral_radius", None)
        extra = f" (spectral radius {rho:.6g})" if rho is not None else ""
        print(f"generation failed: {exc}{extra}", file=sys.stderr)
        return EXIT_GENERATION
    except (ParameterError, StructuralError, DegenerateDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
