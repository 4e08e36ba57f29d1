"""Standardized SVAR models sampled over a lagged graph.

The sampler draws a sampling interval ``delta ~ F(100, 100)``, per-process
auto-dependence ``b_ii = (b'_ii)**delta`` with ``b'_ii ~ U(0, 1)``, and
cross-process contributions on a ``d``-ball scaled by the noise left over
after auto-dependence. Lagged coefficients are spread over lags in
proportion to raw Gaussian draws so that they sum to the drawn
contribution. The stationary covariance of the resulting process is then
solved and every variable rescaled to unit variance.

Weight tensors use ``weights[j, i, tau]`` for the effect ``X_j(t-tau) -> X_i(t)``.
Lagged correlations use ``lagged_corr[j, k, w] = E[X_j(t-w) X_k(t)]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import make_rng
from .errors import (
    DegenerateDrawError,
    GenerationError,
    ParameterError,
    QueryError,
    StructuralError,
    UnstableError,
)
from .graph import TsGraph, summary_graph

__all__ = [
    "Svar",
    "SvarDraw",
    "gen_uumc_svar",
    "draw_svar_parameters",
    "assemble_svar",
    "cross_contribution_factor",
    "reduced_form",
    "companion_matrix",
    "solve_discrete_lyapunov",
    "stationary_covariance",
    "stability_check",
    "parent_contribution",
    "standardization_residual",
    "confounding_bound",
    "svar_to_dict",
    "svar_from_dict",
]

MAX_RETRIES = 20
F_DOF = 100


@dataclass(eq=False)
class Svar:
    """Standardized structural VAR.

    ``X_i(t) = sum_{j,tau} weights[j, i, tau] X_j(t - tau) + U_i(t)``,
    ``U_i ~ N(0, noise_std[i]**2)``.
    """

    weights: np.ndarray
    noise_std: np.ndarray
    delta: float = 1.0
    lagged_corr: np.ndarray | None = None
    contributions: np.ndarray | None = None
    spectral_radius: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.noise_std = np.asarray(self.noise_std, dtype=float)
        if self.weights.ndim != 3 or self.weights.shape[0] != self.weights.shape[1]:
            raise StructuralError(f"weights must have shape (n, n, tau_max+1), got {self.weights.shape}")
        if np.tril(self.weights[:, :, 0]).any():
            raise StructuralError("contemporaneous weights must be strictly upper triangular")
        if self.noise_std.shape != (self.n,) or not (self.noise_std > 0).all():
            raise ParameterError("noise_std must be a strictly positive vector of length n")
        if self.spectral_radius is None:
            self.spectral_radius = stability_check(self.weights)[1]

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def tau_max(self) -> int:
        return self.weights.shape[2] - 1

    def graph(self) -> TsGraph:
        return TsGraph(self.weights != 0)


@dataclass
class SvarDraw:
    """Raw random inputs of one SVAR draw, before any deterministic assembly.

    Attributes
    ----------
    delta : float
        Sampling interval.
    lag_shape : array (n, n, tau_max+1)
        Gaussian draws that distribute each edge's contribution over lags;
        zero outside the graph.
    auto : array (n,)
        Pre-interval auto-dependence ``b'_ii`` in (0, 1); 0 where a process
        has no self-edge.
    cross : array (n, n)
        Gaussian direction draws for cross-process contributions; zero off
        the summary graph and on the diagonal.
    radius : array (n,)
        Ball radius per process; ignored for processes without cross parents.
    """

    delta: float
    lag_shape: np.ndarray
    auto: np.ndarray
    cross: np.ndarray
    radius: np.ndarray


def cross_contribution_factor(b_parent: float, b_child: float, delta: float) -> float:
    """Interval adjustment of a cross contribution between two processes.

    ``(b_parent**delta - b_child**delta) / (b_parent - b_child)`` with the
    removable singularity filled by ``delta * b**(delta - 1)``. When neither
    process has auto-dependence (both ``b`` are 0) there are no dynamics to
    rescale and the factor is 1.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if b_parent == 0.0 and b_child == 0.0:
        return 1.0
    gap = b_parent - b_child
    if abs(gap) < 1e-12:
        b = 0.5 * (b_parent + b_child)
        return float(delta * b ** (delta - 1.0))
    lo = min(b_parent, b_child)
    if lo == 0.0:
        return float(max(b_parent, b_child) ** (delta - 1.0))
    # b_p**d - b_c**d without cancellation for nearby b
    g = abs(gap)
    return float(lo**delta * np.expm1(delta * np.log1p(g / lo)) / g)


def reduced_form(weights) -> tuple[np.ndarray, np.ndarray]:
    """Lag-only form ``X(t) = sum_tau B[tau-1] X(t-tau) + M U(t)``.

    Returns
    -------
    lag_coefs : array (tau_max, n, n)
        ``B(tau) = (I - A(0)^T)^{-1} A(tau)^T`` for ``tau = 1..tau_max``.
    mixing : array (n, n)
        ``M = (I - A(0)^T)^{-1}``.
    """
    W = np.asarray(weights, dtype=float)
    if W.ndim == 2:
        W = W[:, :, None]
    n = W.shape[0]
    if np.tril(W[:, :, 0]).any():
        raise StructuralError("contemporaneous slice must be strictly upper triangular")
    mixing = np.linalg.solve(np.eye(n) - W[:, :, 0].T, np.eye(n))
    lag_coefs = np.stack([mixing @ W[:, :, t].T for t in range(1, W.shape[2])]) if W.shape[2] > 1 \
        else np.zeros((0, n, n))
    return lag_coefs, mixing


def companion_matrix(lag_coefs, n_blocks: int | None = None) -> np.ndarray:
    """Block companion matrix of a lag-only VAR, optionally padded to ``n_blocks`` lags."""
    lag_coefs = np.asarray(lag_coefs, dtype=float)
    p, n = lag_coefs.shape[0], lag_coefs.shape[-1]
    k = max(p, 1) if n_blocks is None else n_blocks
    if k < p:
        raise ParameterError(f"n_blocks={k} is smaller than the VAR order {p}")
    C = np.zeros((n * k, n * k))
    for t in range(p):
        C[:n, t * n:(t + 1) * n] = lag_coefs[t]
    C[n:, :-n] = np.eye(n * (k - 1))
    return C


def _spectral_radius(C: np.ndarray) -> float:
    if C.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(C))))


def stability_check(weights) -> tuple[bool, float]:
    """Whether the reduced-form companion matrix has spectral radius < 1."""
    lag_coefs, _ = reduced_form(weights)
    rho = _spectral_radius(companion_matrix(lag_coefs))
    return rho < 1.0, rho


def solve_discrete_lyapunov(C, Q, tol: float = 1e-12, max_doublings: int = 200) -> np.ndarray:
    """Solve ``S = C S C^T + Q`` for stable ``C``.

    Uses the doubling form of the fixed-point iteration: after ``k`` steps
    ``S`` holds the first ``2**k`` terms of ``sum_m C^m Q (C^m)^T``.
    """
    C = np.asarray(C, dtype=float)
    S = np.array(Q, dtype=float)
    Ck = C.copy()
    for _ in range(max_doublings):
        incr = Ck @ S @ Ck.T
        S = S + incr
        Ck = Ck @ Ck
        if np.max(np.abs(incr)) <= tol * max(1.0, np.max(np.abs(S))):
            break
    else:
        raise UnstableError("Lyapunov doubling iteration did not converge", _spectral_radius(C))
    return 0.5 * (S + S.T)


def stationary_covariance(lag_coefs, noise_cov, n_lags: int | None = None) -> np.ndarray:
    """Autocovariances ``Gamma[w] = E[X(t) X(t-w)^T]`` for ``w = 0..n_lags``.

    ``n_lags`` defaults to the VAR order. The companion system is padded to
    ``n_lags + 1`` blocks so that every requested lag is a block of its
    stationary covariance.
    """
    lag_coefs = np.asarray(lag_coefs, dtype=float)
    noise_cov = np.asarray(noise_cov, dtype=float)
    n = noise_cov.shape[0]
    p = lag_coefs.shape[0]
    n_lags = p if n_lags is None else int(n_lags)
    k = max(p, n_lags + 1)
    C = companion_matrix(lag_coefs, k)
    rho = _spectral_radius(C)
    if rho >= 1.0:
        raise UnstableError(f"process is not stable (spectral radius {rho:.6g})", rho)
    Q = np.zeros((n * k, n * k))
    Q[:n, :n] = noise_cov
    S = solve_discrete_lyapunov(C, Q)
    return np.stack([S[:n, w * n:(w + 1) * n] for w in range(n_lags + 1)])


def _noise_cov(mixing, noise_std):
    return mixing @ np.diag(np.asarray(noise_std) ** 2) @ mixing.T


def _lagged_cov_toeplitz(lagged: np.ndarray) -> np.ndarray:
    """``G[(tau, j), (nu, k)] = E[X_j(t-tau) X_k(t-nu)]`` from ``lagged[j, k, w]``."""
    n, _, L = lagged.shape
    G = np.zeros((L * n, L * n))
    for tau in range(L):
        for nu in range(L):
            block = lagged[:, :, tau - nu] if tau >= nu else lagged[:, :, nu - tau].T
            G[tau * n:(tau + 1) * n, nu * n:(nu + 1) * n] = block
    return G


def standardization_residual(svar: Svar) -> np.ndarray:
    """Per-node ``sum a_ji(tau) a_ki(nu) rho_jk(tau - nu) + s_i**2 - 1``.

    Evaluated from the stored structural weights and lagged correlations;
    zero for a correctly standardized model.
    """
    if svar.lagged_corr is None:
        raise ParameterError("model carries no lagged correlations")
    G = _lagged_cov_toeplitz(svar.lagged_corr)
    out = np.empty(svar.n)
    for i in range(svar.n):
        w = svar.weights[:, i, :].T.ravel()
        out[i] = w @ G @ w + svar.noise_std[i] ** 2 - 1.0
    return out


def draw_svar_parameters(g: TsGraph, rng) -> SvarDraw:
    """Draw the raw random inputs for one SVAR.

    Stream order: ``delta``, then per process in index order the lag-shape
    Gaussians (if it has any parent or self-edge), the auto-dependence
    uniform (if self-dependent), and the cross directions plus radius
    uniform (if it has cross parents).
    """
    rng = make_rng(rng)
    n, L = g.n, g.tau_max + 1
    H = summary_graph(g)
    delta = float(rng.f(F_DOF, F_DOF))
    lag_shape = np.zeros((n, n, L))
    auto = np.zeros(n)
    cross = np.zeros((n, n))
    radius = np.zeros(n)
    for i in range(n):
        cross_pa = np.flatnonzero(H[:, i] & (np.arange(n) != i))
        if cross_pa.size or H[i, i]:
            lag_shape[:, i, :] = rng.standard_normal((n, L)) * g.adj[:, i, :]
        if H[i, i]:
            auto[i] = rng.random()
        if cross_pa.size:
            cross[cross_pa, i] = rng.standard_normal(cross_pa.size)
            radius[i] = rng.random() ** (1.0 / cross_pa.size)
    return SvarDraw(delta, lag_shape, auto, cross, radius)


def _spread_over_lags(shape_row: np.ndarray, total: float) -> np.ndarray:
    s = shape_row.sum()
    if s == 0.0:
        raise DegenerateDrawError("lag-shape draws sum to zero")
    return shape_row * (total / s)


def assemble_svar(g: TsGraph, draw: SvarDraw) -> Svar:
    """Deterministically turn a raw draw into a standardized :class:`Svar`.

    Raises
    ------
    UnstableError
        If the pre-standardization process is not stable.
    DegenerateDrawError
        On measure-zero draws (zero-sum lag shapes, zero-norm directions).
    """
    n, L = g.n, g.tau_max + 1
    H = summary_graph(g)
    delta = draw.delta
    pre = np.zeros((n, n, L))
    contrib = np.zeros((n, n))
    s_prime = np.ones(n)
    auto_eff = np.where(H[np.arange(n), np.arange(n)], draw.auto, 0.0)

    for i in range(n):
        if H[i, i]:
            b_ii = auto_eff[i] ** delta
            pre[i, i, :] = _spread_over_lags(draw.lag_shape[i, i, :], b_ii)
            contrib[i, i] = b_ii
            s_prime[i] = np.sqrt(1.0 - b_ii**2)
        cross_pa = np.flatnonzero(H[:, i] & (np.arange(n) != i))
        if cross_pa.size == 0:
            continue
        direction = draw.cross[cross_pa, i]
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise DegenerateDrawError(f"cross direction for process {i} has zero norm")
        r = draw.radius[i]
        b_ball = (r * s_prime[i] / norm) * direction
        s_prime[i] *= np.sqrt(1.0 - r**2)
        for j, bj in zip(cross_pa, b_ball):
            b_ji = bj * cross_contribution_factor(auto_eff[j], auto_eff[i], delta)
            pre[j, i, :] = _spread_over_lags(draw.lag_shape[j, i, :], b_ji)
            contrib[j, i] = b_ji

    lag_coefs, mixing = reduced_form(pre)
    gamma = stationary_covariance(lag_coefs, _noise_cov(mixing, s_prime), n_lags=g.tau_max)
    C = np.sqrt(np.diag(gamma[0]))
    ratio = C[:, None] / C[None, :]
    weights = pre * ratio[:, :, None]
    noise_std = s_prime / C
    # gamma[w][k, j] = E[X_k(t) X_j(t-w)]
    lagged_corr = np.transpose(gamma, (2, 1, 0)) / (C[:, None, None] * C[None, :, None])
    _, rho = stability_check(weights)
    return Svar(
        weights,
        noise_std,
        delta=delta,
        lagged_corr=lagged_corr,
        contributions=contrib * ratio,
        spectral_radius=rho,
    )


def gen_uumc_svar(g: TsGraph, rng, max_retries: int = MAX_RETRIES) -> Svar:
    """Sample a unit-variance SVAR over ``g``, redrawing unstable parameter sets.

    Raises
    ------
    GenerationError
        If ``max_retries`` consecutive draws are unstable or degenerate; the
        last spectral radius is attached.
    """
    rng = make_rng(rng)
    last_rho = None
    for attempt in range(max_retries):
        draw = draw_svar_parameters(g, rng)
        try:
            svar = assemble_svar(g, draw)
        except UnstableError as exc:
            last_rho = exc.spectral_radius
            continue
        except DegenerateDrawError:
            continue
        if not svar.spectral_radius < 1.0:
            last_rho = svar.spectral_radius
            continue
        svar.params["attempts"] = attempt + 1
        return svar
    raise GenerationError(
        f"no stable SVAR after {max_retries} draws (last spectral radius {last_rho})", last_rho
    )


def parent_contribution(svar: Svar, j: int, i: int) -> float:
    """Summed coefficient ``sum_tau a_ji(tau)`` of parent process ``j`` on ``i``."""
    if j == i:
        raise QueryError(f"({j}, {i}) is an auto-dependence, not a parent contribution")
    if not (svar.weights[j, i, :] != 0).any():
        raise QueryError(f"no edge {j} -> {i} in the summary graph")
    return float(svar.weights[j, i, :].sum())


def confounding_bound(kappa: float, kappa12_mag: float, p: float, tol: float = 1e-12) -> float:
    """Largest sampling interval keeping subsampling confounding below ``p``.

    For the bivariate Ornstein-Uhlenbeck process with equal mean reversion
    ``kappa`` and cross term ``kappa12``, the confounding magnitude
    ``(|kappa12| / 2 kappa) (1 - (2 kappa delta + 1) exp(-2 kappa delta))``
    increases monotonically from 0 towards ``|kappa12| / 2 kappa``. The root is
    found by bisection. Returns ``inf`` when the bound is never reached.
    """
    if not (kappa > 0 and kappa12_mag > 0 and p > 0):
        raise ParameterError("kappa, |kappa12| and p must all be positive")
    ceiling = kappa12_mag / (2.0 * kappa)
    if p >= ceiling:
        return float("inf")

    def excess(delta):
        x = 2.0 * kappa * delta
        return ceiling * -np.expm1(-x) - ceiling * x * np.exp(-x) - p

    lo, hi = 0.0, 1.0 / kappa
    while excess(hi) < 0:
        hi *= 2.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def svar_to_dict(svar: Svar, seed: int | None = None) -> dict:
    out = {
        "n": svar.n,
        "tau_max": svar.tau_max,
        "delta": svar.delta,
        "weights": np.transpose(svar.weights, (2, 0, 1)).tolist(),
        "noise_std": svar.noise_std.tolist(),
        "lagged_corr": None if svar.lagged_corr is None else np.transpose(svar.lagged_corr, (2, 0, 1)).tolist(),
        "spectral_radius": svar.spectral_radius,
        "seed": seed,
    }
    if svar.contributions is not None:
        out["contributions"] = svar.contributions.tolist()
    return out


def svar_from_dict(d: dict) -> Svar:
    try:
        weights = np.transpose(np.array(d["weights"], dtype=float), (1, 2, 0))
        lagged = d.get("lagged_corr")
        svar = Svar(
            weights,
            np.array(d["noise_std"], dtype=float),
            delta=float(d["delta"]),
            lagged_corr=None if lagged is None else np.transpose(np.array(lagged, dtype=float), (1, 2, 0)),
            contributions=None if d.get("contributions") is None else np.array(d["contributions"], dtype=float),
            spectral_radius=d.get("spectral_radius"),
        )
    except KeyError as exc:
        raise StructuralError(f"SVAR JSON is missing field {exc}") from None
    if svar.n != d["n"] or svar.tau_max != d["tau_max"]:
        raise StructuralError("SVAR JSON header (n, tau_max) disagrees with its weight tensor")
    return svar
