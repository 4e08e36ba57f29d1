"""Monte-Carlo experiments on sortability and R^2 asymmetries.

Every replicate draws from its own stream ``replicate_rng(seed, ...)``, so
results do not depend on execution order and any replicate can be rerun in
isolation. Reports carry a fixed 25-bin histogram on [0, 1], the mean, and
the adjusted Fisher-Pearson sample skewness of each score distribution.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import __version__
from ._rng import replicate_rng
from .dataset import Dataset
from .errors import ParameterError, UUMCError
from .graph import Dag, TsGraph, gen_er_dag
from .scmgen import METHODS, SAMPLE_COUPLED, Scm, gen_uumc, generate
from .simulate import simulate_static, simulate_svar, standardize_sample
from .sortability import pairwise_sortability, r2_metric, r2_ts_metric, var_metric
from .svargen import gen_uumc_svar

log = logging.getLogger(__name__)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentReport",
    "summarize",
    "collider_graph",
    "confounder_graph",
    "chain_graph",
    "ts_pair_graph",
    "experiment_sortability_distribution",
    "experiment_triples",
    "experiment_hub",
    "experiment_ts_pair",
    "confounder_scm",
    "run_experiment",
]

EXPERIMENTS = ("sortability-dist", "triples", "hub", "ts-pair")
N_BINS = 25
SKEW_ESTIMATOR = "adjusted Fisher-Pearson (scipy.stats.skew, bias=False)"
FAILURE_BUDGET = 0.01


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    replicates: int = 500
    samples: int = 100
    method: str = "uumc"
    n: int = 20
    p: float = 0.5
    standardize: bool = False
    triple: str = "collider"
    max_degree: int = 5
    t_len: int = 1000

    def __post_init__(self):
        if self.kind not in EXPERIMENTS:
            raise ParameterError(f"unknown experiment {self.kind!r}; expected one of {EXPERIMENTS}")
        if self.seed is None:
            raise ParameterError("seed is required")
        for name in ("replicates", "samples", "n", "t_len"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be positive")
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.triple not in ("collider", "chain", "confounder"):
            raise ParameterError(f"triple must be collider, chain or confounder, got {self.triple!r}")
        if self.max_degree < 2 and self.kind == "hub":
            raise ParameterError("max_degree must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise ParameterError(f"p must be a probability, got {self.p}")


@dataclass
class ExperimentReport:
    config: dict
    results: dict
    n_succeeded: int
    n_skipped: int
    version: str = __version__
    skew_estimator: str = SKEW_ESTIMATOR

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(scores, bins: int = N_BINS) -> dict:
    """Histogram on [0, 1], mean and sample skewness of a score list."""
    x = np.asarray(scores, dtype=float)
    counts, _ = np.histogram(np.clip(x, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    skew = float(stats.skew(x, bias=False)) if x.size > 2 and np.ptp(x) > 0 else 0.0
    return {
        "scores": x.tolist(),
        "histogram": counts.tolist(),
        "mean": float(x.mean()) if x.size else float("nan"),
        "skew": skew,
    }


def collider_graph(k: int) -> Dag:
    """``k`` parents ``0..k-1`` pointing into hub ``k``."""
    return Dag.from_edges(k + 1, [(j, k) for j in range(k)])


def confounder_graph(k: int) -> Dag:
    """Hub ``0`` pointing into ``k`` children ``1..k``."""
    return Dag.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def chain_graph(length: int) -> Dag:
    return Dag.from_edges(length, [(i, i + 1) for i in range(length - 1)])


TRIPLE_HUB = {"collider": 2, "chain": 1, "confounder": 0}


def _triple_graph(kind: str) -> Dag:
    if kind == "collider":
        return collider_graph(2)
    if kind == "confounder":
        return confounder_graph(2)
    return chain_graph(3)


def ts_pair_graph() -> TsGraph:
    """Two processes with lag-1 auto-dependence and ``X0(t) -> X1(t)``."""
    return TsGraph.from_edges(2, 1, [(0, 0, 1), (1, 1, 1), (0, 1, 0)])


def _run_replicates(fn, replicates: int):
    """Call ``fn(r)`` for each replicate, skipping generation failures within budget."""
    out, skipped = [], 0
    budget = int(np.floor(FAILURE_BUDGET * replicates))
    for r in range(replicates):
        try:
            out.append(fn(r))
        except UUMCError as exc:
            skipped += 1
            log.warning("replicate %d failed: %s", r, exc)
            if skipped > budget:
                raise
    return out, skipped


def _static_data(method: str, dag: Dag, samples: int, rng) -> tuple[Scm, Dataset]:
    if method in SAMPLE_COUPLED:
        return generate(method, dag, rng, n_samples=samples)
    scm = generate(method, dag, rng)
    return scm, simulate_static(scm, samples, rng)


def experiment_sortability_distribution(cfg: ExperimentConfig) -> ExperimentReport:
    """ER graph -> model -> data -> var- and R^2-sortability, per replicate."""

    def one(r):
        rng = replicate_rng(cfg.seed, r)
        dag = gen_er_dag(cfg.n, cfg.p, rng)
        _, ds = _static_data(cfg.method, dag, cfg.samples, rng)
        if cfg.standardize:
            ds = standardize_sample(ds)
        return (
            pairwise_sortability(var_metric(ds), dag.adj).score,
            pairwise_sortability(r2_metric(ds), dag.adj).score,
        )

    rows, skipped = _run_replicates(one, cfg.replicates)
    var_scores = [v for v, _ in rows]
    r2_scores = [r for _, r in rows]
    return ExperimentReport(
        config=asdict(cfg),
        results={"var": summarize(var_scores), "r2": summarize(r2_scores)},
        n_succeeded=len(rows),
        n_skipped=skipped,
    )


def experiment_triples(cfg: ExperimentConfig) -> ExperimentReport:
    """Per-node R^2 of UUMC models on one unshielded triple.

    Besides the three per-node distributions the report holds the hub
    node's R^2, its noise bound ``1 - s_hub**2`` (collider upper bound) or
    ``1 - min(s_leaf**2)`` (confounder lower bound), and the R^2 of the
    highest- and lowest-scoring node of each replicate.
    """
    dag = _triple_graph(cfg.triple)
    hub = TRIPLE_HUB[cfg.triple]
    leaves = [i for i in range(3) if i != hub]

    def one(r):
        rng = replicate_rng(cfg.seed, r)
        scm = gen_uumc(dag, rng)
        r2 = r2_metric(simulate_static(scm, cfg.samples, rng)).values
        s2 = scm.noise_std**2
        bound = 1.0 - (s2[hub] if cfg.triple == "collider" else s2[leaves].min())
        return r2, bound

    rows, skipped = _run_replicates(one, cfg.replicates)
    r2 = np.array([v for v, _ in rows])
    bounds = np.array([b for _, b in rows])
    results = {f"node{i}": summarize(r2[:, i]) for i in range(3)}
    results["hub"] = summarize(r2[:, hub])
    results["hub_index"] = hub
    results["hub_bound"] = bounds.tolist()
    results["hub_bound_mean"] = float(bounds.mean())
    results["highest"] = summarize(r2.max(axis=1))
    results["lowest"] = summarize(r2.min(axis=1))
    results["highest_node_counts"] = np.bincount(r2.argmax(axis=1), minlength=3).tolist()
    return ExperimentReport(asdict(cfg), results, len(rows), skipped)


def experiment_hub(cfg: ExperimentConfig) -> ExperimentReport:
    """Hub R^2 for stars with ``k = 1..max_degree`` parents (collider) or children (confounder).

    Both orientations of replicate ``r`` at degree ``k`` share one stream,
    so at ``k = 1`` they see the identical two-node model.
    """
    results = {"k": list(range(1, cfg.max_degree + 1)), "collider": [], "confounder": []}
    skipped = succeeded = 0
    for k in results["k"]:
        for kind, dag, hub in (
            ("collider", collider_graph(k), k),
            ("confounder", confounder_graph(k), 0),
        ):
            def one(r, dag=dag, hub=hub, k=k):
                rng = replicate_rng(cfg.seed, k, r)
                scm = gen_uumc(dag, rng)
                return r2_metric(simulate_static(scm, cfg.samples, rng)).values[hub]

            vals, sk = _run_replicates(one, cfg.replicates)
            results[kind].append(summarize(vals))
            skipped += sk
            succeeded += len(vals)
    results["collider_mean"] = [s["mean"] for s in results["collider"]]
    results["confounder_mean"] = [s["mean"] for s in results["confounder"]]
    return ExperimentReport(asdict(cfg), results, succeeded, skipped)


def experiment_ts_pair(cfg: ExperimentConfig) -> ExperimentReport:
    """Time-series R^2 of source and target in the two-process SVAR."""
    g = ts_pair_graph()

    def one(r):
        rng = replicate_rng(cfg.seed, r)
        svar = gen_uumc_svar(g, rng)
        ds = simulate_svar(svar, cfg.t_len, rng)
        return r2_ts_metric(ds, g.tau_max).values

    rows, skipped = _run_replicates(one, cfg.replicates)
    r2 = np.array(rows).reshape(-1, 2)
    results = {"source": summarize(r2[:, 0]), "target": summarize(r2[:, 1])}
    results["target_minus_source_mean"] = results["target"]["mean"] - results["source"]["mean"]
    return ExperimentReport(asdict(cfg), results, len(rows), skipped)


def confounder_scm(a: float, c: float) -> Scm:
    """Standardized confounder ``A <- B -> C`` with fixed coefficients.

    Node order is ``B, A, C``; the children keep noise std ``sqrt(1 - coef**2)``.
    """
    weights = np.zeros((3, 3))
    weights[0, 1], weights[0, 2] = a, c
    noise = np.array([1.0, np.sqrt(1.0 - a * a), np.sqrt(1.0 - c * c)])
    return Scm(weights, noise, "uumc")


_RUNNERS = {
    "sortability-dist": experiment_sortability_distribution,
    "triples": experiment_triples,
    "hub": experiment_hub,
    "ts-pair": experiment_ts_pair,
}


def run_experiment(cfg: ExperimentConfig | dict) -> ExperimentReport:
    """Run any experiment; accepts the ``config`` echo of an earlier report."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig(**cfg)
    return _RUNNERS[cfg.kind](cfg)
