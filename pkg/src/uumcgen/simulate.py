"""Finite samples from SCM and SVAR models, and sample standardization."""
from __future__ import annotations

import numpy as np

from ._rng import make_rng
from .dataset import STATIC, TIMESERIES, Dataset, read_csv, write_csv
from .errors import DegenerateDataError, ParameterError, UnstableError
from .scmgen import Scm
from .svargen import (
    Svar,
    _noise_cov,
    _spectral_radius,
    companion_matrix,
    reduced_form,
    stationary_covariance,
)

__all__ = [
    "Dataset",
    "simulate_static",
    "simulate_svar",
    "standardize_sample",
    "read_csv",
    "write_csv",
]


def _check_count(name, value, minimum=1):
    if int(value) != value or value < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


def simulate_static(scm: Scm, m: int, rng) -> Dataset:
    """Ancestral sampling of ``m`` iid rows from a population SCM."""
    if scm.sample_coupled:
        raise ParameterError(
            f"method {scm.method!r} is coupled to its own sample; use the data returned at generation"
        )
    m = _check_count("m", m)
    rng = make_rng(rng)
    U = rng.standard_normal((m, scm.n)) * scm.noise_std + scm.noise_mean
    X = np.zeros_like(U)
    for i in range(scm.n):
        X[:, i] = X[:, :i] @ scm.weights[:i, i] + U[:, i]
    return Dataset(X, kind=STATIC)


def _stationary_window(lag_coefs, noise_cov, p, rng):
    """Draw ``X(t-p+1..t)`` jointly from the stationary law; rows oldest first."""
    n = noise_cov.shape[0]
    gamma = stationary_covariance(lag_coefs, noise_cov, n_lags=p - 1)
    # block (a, b) = E[X(t-a) X(t-b)^T] = gamma[b-a] for b >= a
    S = np.zeros((n * p, n * p))
    for a in range(p):
        for b in range(p):
            S[a * n:(a + 1) * n, b * n:(b + 1) * n] = gamma[b - a] if b >= a else gamma[a - b].T
    S = 0.5 * (S + S.T)
    evals, evecs = np.linalg.eigh(S)
    root = evecs * np.sqrt(np.clip(evals, 0.0, None))
    z = root @ rng.standard_normal(n * p)
    return z.reshape(p, n)[::-1]


def simulate_svar(
    svar: Svar,
    t_len: int,
    rng,
    init: str = "stationary",
    burn_in: int = 1000,
) -> Dataset:
    """Simulate ``t_len`` time steps.

    ``init="stationary"`` draws the initial lag window from the exact
    stationary distribution; ``init="burn_in"`` starts from zeros and
    discards the first ``burn_in`` steps. Contemporaneous effects are
    resolved through the reduced form, equivalent to evaluating the
    structural equations in index order.
    """
    t_len = _check_count("t_len", t_len)
    if init not in ("stationary", "burn_in"):
        raise ParameterError(f"init must be 'stationary' or 'burn_in', got {init!r}")
    if init == "burn_in":
        burn_in = _check_count("burn_in", burn_in, minimum=0)
    rng = make_rng(rng)
    lag_coefs, mixing = reduced_form(svar.weights)
    p, n = lag_coefs.shape[0], svar.n
    if p:
        rho = _spectral_radius(companion_matrix(lag_coefs))
        if rho >= 1.0:
            raise UnstableError(f"refusing to simulate an unstable process (spectral radius {rho:.6g})", rho)
    skip = burn_in if init == "burn_in" else 0
    total = t_len + skip
    if p and init == "stationary":
        window = _stationary_window(lag_coefs, _noise_cov(mixing, svar.noise_std), p, rng)
    else:
        window = np.zeros((p, n))
    E = (rng.standard_normal((total, n)) * svar.noise_std) @ mixing.T
    if p == 0:
        return Dataset(E[skip:], kind=TIMESERIES, tau_max=svar.tau_max)

    # X[p + t] = sum_tau B(tau) X[p + t - tau] + E[t]; stack lags newest first
    stacked = np.concatenate(list(lag_coefs), axis=1)
    X = np.empty((total + p, n))
    X[:p] = window
    for t in range(total):
        past = X[t:t + p][::-1].ravel()
        X[p + t] = stacked @ past + E[t]
    return Dataset(X[p + skip:], kind=TIMESERIES, tau_max=svar.tau_max)


def standardize_sample(ds: Dataset) -> Dataset:
    """Center each column and divide by its sample std (``ddof=1``)."""
    X = ds.data
    if X.shape[0] < 2:
        raise DegenerateDataError("need at least two rows to standardize", column=0)
    sd = X.std(axis=0, ddof=1)
    bad = np.flatnonzero(~(sd > 0))
    if bad.size:
        raise DegenerateDataError(f"column X{bad[0]} has zero sample variance", column=int(bad[0]))
    return Dataset((X - X.mean(axis=0)) / sd, kind=ds.kind, tau_max=ds.tau_max)
