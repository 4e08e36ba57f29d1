"""Static DAGs and lagged time-series graphs in topological index order.

Indices always follow a topological order: ``adj[j, i]`` (static) or
``adj[j, i, tau]`` (time series) means an edge from node ``j`` to node
``i``. There is no permutation layer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .errors import ParameterError, StructuralError

__all__ = [
    "Dag",
    "TsGraph",
    "gen_er_dag",
    "gen_er_ts_graph",
    "summary_graph",
    "ancestral_closure",
    "dag_to_dict",
    "dag_from_dict",
    "ts_graph_to_dict",
    "ts_graph_from_dict",
    "graph_from_dict",
]


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0 or np.isnan(p):
        raise ParameterError(f"{name} must be a probability in [0, 1], got {p}")
    return p


def _check_nodes(n: int) -> int:
    if int(n) != n or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n}")
    return int(n)


@dataclass(frozen=True, eq=False)
class Dag:
    """Directed acyclic graph; ``adj[j, i]`` is the edge ``j -> i``."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise StructuralError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
        if np.tril(adj).any():
            raise StructuralError("adjacency must be strictly upper triangular (edges j->i need j<i)")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.adj.sum())

    def parents(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[:, i])

    def edges(self) -> list[tuple[int, int]]:
        return [(int(j), int(i)) for j, i in zip(*np.nonzero(self.adj))]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Dag":
        adj = np.zeros((_check_nodes(n),) * 2, dtype=bool)
        for j, i in edges:
            adj[j, i] = True
        return cls(adj)

    def __eq__(self, other):
        return isinstance(other, Dag) and np.array_equal(self.adj, other.adj)

    def __repr__(self):
        return f"Dag(n={self.n}, edges={self.n_edges})"


@dataclass(frozen=True, eq=False)
class TsGraph:
    """Lagged causal graph; ``adj[j, i, tau]`` is the edge ``X_j(t - tau) -> X_i(t)``."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adj, dtype=bool)
        if adj.ndim != 3 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1 or adj.shape[2] < 1:
            raise StructuralError(f"adjacency must have shape (n, n, tau_max+1), got {adj.shape}")
        if np.tril(adj[:, :, 0]).any():
            raise StructuralError("contemporaneous slice must be strictly upper triangular")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def tau_max(self) -> int:
        return self.adj.shape[2] - 1

    def lagged_edges(self) -> list[tuple[int, int, int]]:
        return [(int(j), int(i), int(t)) for j, i, t in zip(*np.nonzero(self.adj))]

    @classmethod
    def from_edges(cls, n: int, tau_max: int, lagged_edges) -> "TsGraph":
        if int(tau_max) != tau_max or tau_max < 0:
            raise ParameterError(f"tau_max must be a non-negative integer, got {tau_max}")
        adj = np.zeros((_check_nodes(n), n, int(tau_max) + 1), dtype=bool)
        for j, i, tau in lagged_edges:
            adj[j, i, tau] = True
        return cls(adj)

    def __eq__(self, other):
        return isinstance(other, TsGraph) and np.array_equal(self.adj, other.adj)

    def __repr__(self):
        return f"TsGraph(n={self.n}, tau_max={self.tau_max}, edges={int(self.adj.sum())})"


def gen_er_dag(n: int, p: float, rng) -> Dag:
    """Erdős–Rényi DAG: every pair ``j < i`` carries an edge with probability ``p``.

    One uniform is drawn per pair in row-major order over ``(j, i)``.
    """
    n = _check_nodes(n)
    p = _check_prob("p", p)
    rng = make_rng(rng)
    rows, cols = np.triu_indices(n, k=1)
    adj = np.zeros((n, n), dtype=bool)
    adj[rows, cols] = rng.random(rows.size) < p
    return Dag(adj)


def gen_er_ts_graph(n: int, p_cross: float, p_auto: float, tau_max: int, rng) -> TsGraph:
    """Random lagged graph with independent Bernoulli edges.

    Cross edges ``j != i`` appear with probability ``p_cross`` at every lag
    (contemporaneous ones only for ``j < i``); self edges appear at lags
    ``tau >= 1`` with probability ``p_auto``. A uniform is drawn for every
    ``(j, i, tau)`` cell in row-major order, including forbidden cells, so
    the stream layout does not depend on the probabilities.
    """
    n = _check_nodes(n)
    p_cross = _check_prob("p_cross", p_cross)
    p_auto = _check_prob("p_auto", p_auto)
    if int(tau_max) != tau_max or tau_max < 0:
        raise ParameterError(f"tau_max must be a non-negative integer, got {tau_max}")
    tau_max = int(tau_max)
    rng = make_rng(rng)
    u = rng.random((n, n, tau_max + 1))
    thresh = np.full((n, n, tau_max + 1), p_cross)
    diag = np.arange(n)
    thresh[diag, diag, :] = p_auto
    thresh[:, :, 0] = np.where(np.triu(np.ones((n, n), dtype=bool), k=1), p_cross, -1.0)
    return TsGraph(u < thresh)


def summary_graph(g: TsGraph) -> np.ndarray:
    """Collapse lags: ``(j, i)`` is set iff ``X_j(t - tau) -> X_i(t)`` for some tau.

    The result may contain self-loops and 2-cycles.
    """
    return np.asarray(g.adj).any(axis=2)


def ancestral_closure(adj_w) -> np.ndarray:
    """Boolean reachability through directed paths of length >= 1.

    Accumulates ``E | E^2 | ... | E^n`` with boolean matrix powers.
    """
    E = np.asarray(adj_w) != 0
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {E.shape}")
    Ek = E.copy()
    anc = np.zeros_like(E)
    for _ in range(E.shape[0]):
        anc |= Ek
        Ek = Ek @ E
    return anc


def dag_to_dict(dag: Dag) -> dict:
    return {"n": dag.n, "edges": [list(e) for e in sorted(dag.edges())]}


def dag_from_dict(d: dict) -> Dag:
    try:
        return Dag.from_edges(d["n"], [tuple(e) for e in d["edges"]])
    except KeyError as exc:
        raise StructuralError(f"graph JSON is missing field {exc}") from None


def ts_graph_to_dict(g: TsGraph) -> dict:
    return {
        "n": g.n,
        "tau_max": g.tau_max,
        "lagged_edges": [list(e) for e in sorted(g.lagged_edges())],
    }


def ts_graph_from_dict(d: dict) -> TsGraph:
    try:
        return TsGraph.from_edges(d["n"], d["tau_max"], [tuple(e) for e in d["lagged_edges"]])
    except KeyError as exc:
        raise StructuralError(f"time-series graph JSON is missing field {exc}") from None


def graph_from_dict(d: dict) -> Dag | TsGraph:
    """Parse either graph schema, dispatching on the ``lagged_edges`` key."""
    return ts_graph_from_dict(d) if "lagged_edges" in d else dag_from_dict(d)
