"""Node-level metrics and pair-counting sortability scores.

A sortability score is the fraction of causally ordered node pairs along
which a metric (variance, R^2, ...) strictly increases, with ties counted
as one half. Each connected pair is counted once no matter how many path
lengths join it, and pairs inside a common cycle are never compared, so
the score also applies to cyclic summary graphs of time series.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import TIMESERIES, Dataset
from .errors import ParameterError
from .graph import TsGraph, summary_graph

__all__ = [
    "METRIC_KINDS",
    "MetricVector",
    "SortabilityResult",
    "pairwise_sortability",
    "var_metric",
    "r2_metric",
    "r2star_ts_metric",
    "r2_ts_metric",
    "ts_sortability",
    "ols_r2",
    "report_dict",
]

METRIC_KINDS = ("var", "r2", "r2star_ts", "r2_ts")
RIDGE_COND = 1e12


@dataclass
class MetricVector:
    values: np.ndarray
    metric_kind: str
    flags: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.metric_kind not in METRIC_KINDS:
            raise ParameterError(f"unknown metric kind {self.metric_kind!r}")

    def __len__(self):
        return self.values.size


@dataclass
class SortabilityResult:
    score: float
    n_pairs: int
    n_correct: float
    tol: float


def pairwise_sortability(metric, adj_w, tol: float = 1e-9) -> SortabilityResult:
    """Score how well ``metric`` increases along directed paths of ``adj_w``.

    ``adj_w[j, i] != 0`` is the edge ``j -> i``. A pair counts 1 if
    ``metric[i] / metric[j] > 1 + tol``, one half if the ratio lies within
    ``[1 - tol, 1 + tol]``, and 0 otherwise. Returns 0.5 when no pair is
    comparable.
    """
    M = np.asarray(getattr(metric, "values", metric), dtype=float).reshape(1, -1)
    E = np.asarray(adj_w) != 0
    if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape[0] != M.shape[1]:
        raise ParameterError(
            f"metric of length {M.shape[1]} does not match adjacency of shape {E.shape}"
        )
    n = E.shape[0]

    Ek = E.copy()
    anc = np.zeros_like(E)
    for _ in range(n):
        anc = anc | Ek
        Ek = Ek @ E
    Ek = E.copy()

    n_paths = 0
    n_correct = 0.0
    checked = np.zeros_like(E)
    for _ in range(n - 1):
        check_now = Ek & ~checked & ~anc.T
        with np.errstate(divide="ignore", invalid="ignore"):
            r = check_now * M / M.T
        n_paths += int(check_now.sum())
        n_correct += float((r > 1 + tol).sum())
        n_correct += 0.5 * float(((r <= 1 + tol) & (r >= 1 - tol)).sum())
        checked = checked | check_now
        Ek = Ek @ E

    if n_paths == 0:
        return SortabilityResult(0.5, 0, 0.0, tol)
    return SortabilityResult(n_correct / n_paths, n_paths, n_correct, tol)


def ols_r2(X: np.ndarray, y: np.ndarray) -> tuple[float, bool]:
    """In-sample R^2 of an OLS fit of ``y`` on ``X`` with intercept.

    Falls back to ridge with penalty ``1e-8 * trace(X'X) / cols`` when the
    centered Gram matrix is numerically singular; the second return value
    reports whether that happened.
    """
    yc = y - y.mean()
    sst = yc @ yc
    if X.shape[1] == 0 or sst == 0.0:
        return 0.0, False
    Xc = X - X.mean(axis=0)
    gram = Xc.T @ Xc
    rhs = Xc.T @ yc
    ridge = not np.linalg.cond(gram) < RIDGE_COND
    if ridge:
        gram = gram + (1e-8 * np.trace(gram) / gram.shape[0]) * np.eye(gram.shape[0])
    beta = np.linalg.solve(gram, rhs)
    resid = yc - Xc @ beta
    return 1.0 - (resid @ resid) / sst, ridge


def var_metric(ds: Dataset) -> MetricVector:
    """Per-column sample variance (``ddof=1``)."""
    if ds.n_rows < 2:
        raise ParameterError("variance needs at least two rows")
    return MetricVector(ds.data.var(axis=0, ddof=1), "var")


def r2_metric(ds: Dataset) -> MetricVector:
    """R^2 of each column regressed on all other columns (OLS with intercept)."""
    X = ds.data
    if X.shape[0] <= X.shape[1]:
        raise ParameterError(f"R^2 needs more rows than columns, got {X.shape}")
    vals = np.empty(X.shape[1])
    flags = []
    for i in range(X.shape[1]):
        others = np.delete(X, i, axis=1)
        vals[i], ridged = ols_r2(others, X[:, i])
        if ridged:
            flags.append(f"ridge:X{i}")
    return MetricVector(vals, "r2", flags)


def _lag_stack(ds: Dataset, tau_max: int) -> np.ndarray:
    """``S[t, j, tau] = X_j(t + tau_max - tau)`` for targets ``t = tau_max..T-1``."""
    X = ds.data
    T = X.shape[0]
    return np.stack([X[tau_max - tau:T - tau] for tau in range(tau_max + 1)], axis=2)


def _check_ts(ds: Dataset, tau_max: int) -> int:
    if ds.kind != TIMESERIES:
        raise ParameterError("time-series metrics need a time-series dataset")
    if int(tau_max) != tau_max or tau_max < 0:
        raise ParameterError(f"tau_max must be a non-negative integer, got {tau_max}")
    tau_max = int(tau_max)
    if ds.n_rows - tau_max <= ds.n_vars * (tau_max + 1):
        raise ParameterError(
            f"series of length {ds.n_rows} is too short for {ds.n_vars} processes at tau_max={tau_max}"
        )
    return tau_max


def _ts_r2(ds: Dataset, tau_max: int, own_past: bool, kind: str) -> MetricVector:
    tau_max = _check_ts(ds, tau_max)
    S = _lag_stack(ds, tau_max)
    n, L = ds.n_vars, tau_max + 1
    vals = np.empty(n)
    flags = []
    for i in range(n):
        keep = np.ones((n, L), dtype=bool)
        if own_past:
            keep[i, 0] = False
        else:
            keep[i, :] = False
        design = S[:, keep]
        if design.shape[1] == 0:
            vals[i] = 0.0
            flags.append(f"empty-design:X{i}")
            continue
        vals[i], ridged = ols_r2(design, S[:, i, 0])
        if ridged:
            flags.append(f"ridge:X{i}")
    return MetricVector(vals, kind, flags)


def r2star_ts_metric(ds: Dataset, tau_max: int) -> MetricVector:
    """R^2 of ``X_i(t)`` on ``{X_j(t - tau) : j != i, 0 <= tau <= tau_max}``.

    The target's own past is excluded. A single-process system has an empty
    design and gets 0.
    """
    return _ts_r2(ds, tau_max, own_past=False, kind="r2star_ts")


def r2_ts_metric(ds: Dataset, tau_max: int) -> MetricVector:
    """R^2 of ``X_i(t)`` on every lagged value of the system except ``X_i(t)`` itself."""
    return _ts_r2(ds, tau_max, own_past=True, kind="r2_ts")


def ts_sortability(metric, g: TsGraph, tol: float = 1e-9) -> SortabilityResult:
    """Pair-counting sortability on the summary graph of ``g`` without self-loops."""
    H = summary_graph(g).copy()
    np.fill_diagonal(H, False)
    return pairwise_sortability(metric, H, tol)


def report_dict(metric: MetricVector, result: SortabilityResult) -> dict:
    return {
        "metric": metric.metric_kind,
        "values": metric.values.tolist(),
        "score": result.score,
        "n_pairs": result.n_pairs,
        "n_correct": result.n_correct,
        "tol": result.tol,
        "flags": list(metric.flags),
    }
