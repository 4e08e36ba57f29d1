"""Random linear-Gaussian SCMs over a fixed DAG.

Five samplers share the :class:`Scm` container:

``uumc``
    Unit-ball draw of standardized coefficients and noise per node, followed
    by exact population standardization against the running correlation
    matrix. Unitless, unrestricted and Markov-consistent.
``uvn``
    Uniform coefficient magnitudes, unit noise.
``ipa``
    UVN followed by division by the std a node would have with
    independent parents.
``fifty-fifty``
    Sample-coupled: half explained variance, half fresh noise.
``iscm``
    Sample-coupled: every column rescaled to unit sample std.

The two sample-coupled methods return their own data alongside the model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import make_rng
from .dataset import Dataset
from .errors import DegenerateDrawError, ParameterError, StructuralError
from .graph import Dag

__all__ = [
    "METHODS",
    "SAMPLE_COUPLED",
    "Scm",
    "gen_uumc",
    "gen_uvn",
    "gen_ipa",
    "gen_fifty_fifty",
    "gen_iscm",
    "generate",
    "uumc_node",
    "update_correlation",
    "analytic_moments",
    "scm_to_dict",
    "scm_from_dict",
]

METHODS = ("uumc", "uvn", "ipa", "fifty-fifty", "iscm")
SAMPLE_COUPLED = frozenset({"fifty-fifty", "iscm"})


@dataclass(eq=False)
class Scm:
    """Linear-Gaussian SCM ``X_i := sum_j weights[j, i] X_j + U_i``.

    ``U_i ~ N(noise_mean[i], noise_std[i]**2)``. ``corr`` is the analytic
    correlation matrix for methods that track it (``uumc``), else ``None``.
    """

    weights: np.ndarray
    noise_std: np.ndarray
    method: str
    corr: np.ndarray | None = None
    noise_mean: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.noise_std = np.asarray(self.noise_std, dtype=float)
        n = self.weights.shape[0]
        if self.weights.shape != (n, n):
            raise StructuralError(f"weights must be square, got {self.weights.shape}")
        if np.tril(self.weights).any():
            raise StructuralError("weights must be strictly upper triangular")
        if self.noise_std.shape != (n,) or not (self.noise_std > 0).all():
            raise ParameterError("noise_std must be a strictly positive vector of length n")
        if self.noise_mean is None:
            self.noise_mean = np.zeros(n)
        self.noise_mean = np.asarray(self.noise_mean, dtype=float)
        if self.corr is not None:
            self.corr = np.asarray(self.corr, dtype=float)
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}; expected one of {METHODS}")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def sample_coupled(self) -> bool:
        return self.method in SAMPLE_COUPLED

    def graph(self) -> Dag:
        return Dag(self.weights != 0)


def _check_bounds(coef_low: float, coef_high: float) -> None:
    if not (0 < coef_low <= coef_high) or not np.isfinite(coef_high):
        raise ParameterError(
            f"coefficient bounds need 0 < coef_low <= coef_high, got ({coef_low}, {coef_high})"
        )


def _check_samples(n_samples: int) -> int:
    if int(n_samples) != n_samples or n_samples < 2:
        raise ParameterError(f"n_samples must be an integer >= 2, got {n_samples}")
    return int(n_samples)


def _uniform_signed(rng, size, coef_low, coef_high):
    mags = rng.uniform(coef_low, coef_high, size=size)
    signs = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    return signs * mags


def uumc_node(direction, radius: float, corr) -> tuple[np.ndarray, float]:
    """Standardized parameters of one node from its unit-ball draw.

    Parameters
    ----------
    direction : array, shape (d,)
        Raw Gaussian draw over the node's parents. Only its direction is used.
    radius : float
        ``r`` in [0, 1); the explained share of the pre-standardization
        variance is ``r**2`` and the noise std is ``sqrt(1 - r**2)``.
    corr : array, shape (d, d)
        Correlation matrix of the parents.

    Returns
    -------
    coefs : array, shape (d,)
    noise_std : float
        Chosen so that ``coefs @ corr @ coefs + noise_std**2 == 1``.
    """
    direction = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(direction)
    if norm == 0.0:
        raise DegenerateDrawError("parent direction draw has zero norm")
    coefs = (radius / norm) * direction
    noise = np.sqrt(1.0 - radius**2)
    sigma = np.sqrt(coefs @ np.asarray(corr) @ coefs + noise**2)
    return coefs / sigma, noise / sigma


def update_correlation(corr: np.ndarray, coefs_col: np.ndarray, i: int) -> None:
    """Fill row/column ``i`` of ``corr`` in place: ``rho_ji = sum_k a_ki rho_jk`` for ``j < i``."""
    col = corr[:i, :i] @ coefs_col[:i]
    corr[:i, i] = col
    corr[i, :i] = col


def gen_uumc(dag: Dag, rng) -> Scm:
    """Sample a unitless, unrestricted, Markov-consistent SCM over ``dag``.

    For each non-root node the parent coefficients are the direction of an
    iid standard-normal vector scaled to radius ``r ~ U(0,1)**(1/d)``, the
    noise std is ``sqrt(1 - r**2)``, and both are divided by the resulting
    population std given the parents' correlation. Root nodes keep unit noise.
    The running correlation matrix is returned in ``Scm.corr``.
    """
    rng = make_rng(rng)
    n = dag.n
    weights = np.zeros((n, n))
    noise_std = np.ones(n)
    corr = np.eye(n)
    for i in range(n):
        pa = dag.parents(i)
        d = pa.size
        if d == 0:
            continue
        for attempt in range(2):
            direction = rng.standard_normal(d)
            radius = rng.random() ** (1.0 / d)
            try:
                coefs, s = uumc_node(direction, radius, corr[np.ix_(pa, pa)])
                break
            except DegenerateDrawError:
                if attempt:
                    raise
        weights[pa, i] = coefs
        noise_std[i] = s
        update_correlation(corr, weights[:, i], i)
    return Scm(weights, noise_std, "uumc", corr=corr)


def gen_uvn(dag: Dag, rng, coef_low: float = 0.5, coef_high: float = 2.0) -> Scm:
    """Coefficients uniform on ``±[coef_low, coef_high]``, unit noise std."""
    _check_bounds(coef_low, coef_high)
    rng = make_rng(rng)
    weights = _uniform_signed(rng, dag.adj.shape, coef_low, coef_high) * dag.adj
    return Scm(weights, np.ones(dag.n), "uvn", params={"bounds": [coef_low, coef_high]})


def gen_ipa(dag: Dag, rng, coef_low: float = 0.5, coef_high: float = 2.0) -> Scm:
    """UVN draw with column ``i`` and ``s_i = 1`` divided by ``sqrt(1 + sum_j a_ji**2)``."""
    base = gen_uvn(dag, rng, coef_low, coef_high)
    scale = np.sqrt(1.0 + (base.weights**2).sum(axis=0))
    return Scm(
        base.weights / scale,
        1.0 / scale,
        "ipa",
        params={"bounds": [coef_low, coef_high], "base_distribution": "uvn-default"},
    )


def gen_fifty_fifty(
    dag: Dag, n_samples: int, rng, coef_low: float = 0.5, coef_high: float = 2.0
) -> tuple[Scm, Dataset]:
    """Generate a model and data with an even explained/noise variance split.

    Each non-root column is first built without noise from its parents' final
    columns, then column and coefficients are divided by ``sqrt(2)`` times
    its sample std, and fresh noise with std ``sqrt(2)/2`` is added. Roots
    are unit-std noise.
    """
    _check_bounds(coef_low, coef_high)
    m = _check_samples(n_samples)
    rng = make_rng(rng)
    n = dag.n
    X = np.zeros((m, n))
    weights = np.zeros((n, n))
    noise_std = np.ones(n)
    half = np.sqrt(2.0) / 2.0
    for i in range(n):
        pa = dag.parents(i)
        if pa.size == 0:
            X[:, i] = rng.standard_normal(m)
            continue
        for attempt in range(2):
            coefs = _uniform_signed(rng, pa.size, coef_low, coef_high)
            noiseless = X[:, pa] @ coefs
            sd = noiseless.std(ddof=1)
            if sd > 0:
                break
            if attempt:
                raise DegenerateDrawError(f"noiseless column {i} has zero sample std")
        scale = 1.0 / (np.sqrt(2.0) * sd)
        weights[pa, i] = coefs * scale
        noise_std[i] = half
        X[:, i] = noiseless * scale + half * rng.standard_normal(m)
    scm = Scm(weights, noise_std, "fifty-fifty", params={"bounds": [coef_low, coef_high], "n_samples": m})
    return scm, Dataset(X)


def gen_iscm(
    dag: Dag, n_samples: int, rng, coef_low: float = 0.5, coef_high: float = 2.0
) -> tuple[Scm, Dataset]:
    """Internally standardized SCM: every column has sample std exactly 1.

    Coefficients and unit noise are drawn UVN-style, the column is formed from
    the parents' already-standardized columns, and column, coefficients and
    noise std are all divided by the column's sample std.
    """
    _check_bounds(coef_low, coef_high)
    m = _check_samples(n_samples)
    rng = make_rng(rng)
    n = dag.n
    X = np.zeros((m, n))
    weights = np.zeros((n, n))
    noise_std = np.ones(n)
    for i in range(n):
        pa = dag.parents(i)
        for attempt in range(2):
            coefs = _uniform_signed(rng, pa.size, coef_low, coef_high)
            col = X[:, pa] @ coefs + rng.standard_normal(m)
            sd = col.std(ddof=1)
            if sd > 0:
                break
            if attempt:
                raise DegenerateDrawError(f"column {i} has zero sample std")
        weights[pa, i] = coefs / sd
        noise_std[i] = 1.0 / sd
        X[:, i] = col / sd
    scm = Scm(weights, noise_std, "iscm", params={"bounds": [coef_low, coef_high], "n_samples": m})
    return scm, Dataset(X)


def generate(method: str, dag: Dag, rng, n_samples: int | None = None, **bounds):
    """Dispatch by method tag.

    Returns an :class:`Scm` for population methods and ``(Scm, Dataset)``
    for sample-coupled ones, which need ``n_samples``.
    """
    if method == "uumc":
        return gen_uumc(dag, rng)
    if method == "uvn":
        return gen_uvn(dag, rng, **bounds)
    if method == "ipa":
        return gen_ipa(dag, rng, **bounds)
    if method in SAMPLE_COUPLED:
        if n_samples is None:
            raise ParameterError(f"method {method!r} generates its own data and needs n_samples")
        fn = gen_fifty_fifty if method == "fifty-fifty" else gen_iscm
        return fn(dag, n_samples, rng, **bounds)
    raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")


def analytic_moments(scm: Scm) -> tuple[np.ndarray, np.ndarray]:
    """Population variances and covariance matrix by forward recursion.

    ``Cov_ii = sum_jk a_ji a_ki Cov_jk + s_i**2`` and
    ``Cov_ji = sum_k a_ki Cov_jk`` for ``j < i``.
    """
    if scm.sample_coupled:
        raise ParameterError(
            f"method {scm.method!r} is coupled to a finite sample; it has no population moments"
        )
    A = scm.weights
    n = scm.n
    cov = np.zeros((n, n))
    for i in range(n):
        a = A[:i, i]
        prev = cov[:i, :i]
        col = prev @ a
        cov[:i, i] = col
        cov[i, :i] = col
        cov[i, i] = a @ prev @ a + scm.noise_std[i] ** 2
    return np.diag(cov).copy(), cov


def scm_to_dict(scm: Scm, seed: int | None = None) -> dict:
    params = dict(scm.params)
    if seed is not None:
        params["seed"] = seed
    out = {
        "n": scm.n,
        "method": scm.method,
        "weights": scm.weights.tolist(),
        "noise_std": scm.noise_std.tolist(),
        "noise_mean": scm.noise_mean.tolist(),
        "params": params,
    }
    if scm.corr is not None:
        out["corr"] = scm.corr.tolist()
    return out


def scm_from_dict(d: dict) -> Scm:
    try:
        scm = Scm(
            np.array(d["weights"], dtype=float),
            np.array(d["noise_std"], dtype=float),
            d["method"],
            corr=None if d.get("corr") is None else np.array(d["corr"], dtype=float),
            noise_mean=np.array(d.get("noise_mean", [0.0] * d["n"]), dtype=float),
            params=dict(d.get("params", {})),
        )
    except KeyError as exc:
        raise StructuralError(f"SCM JSON is missing field {exc}") from None
    if scm.n != d["n"]:
        raise StructuralError(f"SCM JSON declares n={d['n']} but weights are {scm.n}x{scm.n}")
    return scm
