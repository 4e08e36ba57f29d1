import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uumcgen.dataset import Dataset
from uumcgen.errors import ParameterError
from uumcgen.graph import TsGraph
from uumcgen.scmgen import Scm
from uumcgen.simulate import simulate_static, simulate_svar, standardize_sample
from uumcgen.sortability import (
    MetricVector,
    ols_r2,
    pairwise_sortability,
    r2_metric,
    r2_ts_metric,
    r2star_ts_metric,
    report_dict,
    ts_sortability,
    var_metric,
)
from uumcgen.svargen import Svar


def brute_sortability(M, E, tol=1e-9):
    """Every ordered pair (j, i) with i reachable from j but not vice versa, scored once."""
    E = np.asarray(E) != 0
    n = len(M)
    reach = np.zeros((n, n), bool)
    for s in range(n):
        stack = list(np.flatnonzero(E[s]))
        while stack:
            v = stack.pop()
            if not reach[s, v]:
                reach[s, v] = True
                stack.extend(np.flatnonzero(E[v]))
    pairs = correct = 0
    for j in range(n):
        for i in range(n):
            if reach[j, i] and not reach[i, j]:
                pairs += 1
                r = M[i] / M[j]
                correct += 1.0 if r > 1 + tol else (0.5 if r >= 1 - tol else 0.0)
    return 0.5 if pairs == 0 else correct / pairs, pairs


def reverse_r2_model():
    """Strong AR source feeding a chain: reverse-varsortable, R2*-sortable, reverse R2-sortable."""
    W = np.zeros((3, 3, 2))
    W[0, 0, 1], W[0, 1, 1], W[1, 2, 1] = 0.95, 0.3, 0.9
    return Svar(W, np.ones(3))


class TestListingExamples:
    def test_multi_length_path_counted_once(self):
        E = np.zeros((3, 3))
        E[0, 1] = E[1, 2] = E[0, 2] = 1
        res = pairwise_sortability(MetricVector(np.array([1.0, 2.0, 3.0]), "var"), E)
        assert res.score == 1.0 and res.n_pairs == 3 and res.n_correct == 3.0

    def test_tie(self):
        res = pairwise_sortability([1.0, 1.0], [[0, 1], [0, 0]])
        assert res.score == 0.5 and res.n_pairs == 1

    def test_cycle_exclusion(self):
        E = np.zeros((3, 3))
        E[0, 1] = E[1, 0] = E[0, 2] = 1
        res = pairwise_sortability([1.0, 1.0, 2.0], E)
        assert res.score == 1.0 and res.n_pairs == 2

    def test_weighted_adjacency_uses_support(self):
        E = np.array([[0, -0.3], [0, 0]])
        assert pairwise_sortability([2.0, 1.0], E).score == 0.0

    def test_no_pairs(self):
        res = pairwise_sortability([1.0, 2.0], np.zeros((2, 2)))
        assert res.score == 0.5 and res.n_pairs == 0

    def test_shape_mismatch(self):
        with pytest.raises(ParameterError):
            pairwise_sortability([1.0, 2.0, 3.0], np.zeros((2, 2)))


class TestProperties:
    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**32), st.booleans())
    def test_matches_brute_force(self, n, seed, ties):
        rng = np.random.default_rng(seed)
        E = rng.random((n, n)) < 0.35
        np.fill_diagonal(E, False)
        M = rng.integers(1, 4, n).astype(float) if ties else rng.random(n) + 0.1
        res = pairwise_sortability(M, E)
        score, pairs = brute_sortability(M, E)
        assert res.n_pairs == pairs
        assert res.score == pytest.approx(score, abs=1e-12)
        assert 0 <= res.n_correct <= res.n_pairs

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**32))
    def test_increasing_transform_and_reversal(self, n, seed):
        rng = np.random.default_rng(seed)
        E = np.triu(rng.random((n, n)) < 0.5, 1)
        M = rng.permutation(n) + 1.0
        base = pairwise_sortability(M, E).score
        assert pairwise_sortability(M**3 + 2 * M, E).score == pytest.approx(base)
        assert pairwise_sortability(np.exp(M), E).score == pytest.approx(base)
        if pairwise_sortability(M, E).n_pairs:
            assert base + pairwise_sortability(1 / M, E).score == pytest.approx(1.0)


class TestStaticMetrics:
    def test_var_metric(self):
        X = np.random.default_rng(0).normal(size=(50, 3)) * [1, 2, 3]
        np.testing.assert_allclose(var_metric(Dataset(X)).values, X.var(axis=0, ddof=1))
        with pytest.raises(ParameterError):
            var_metric(Dataset(X[:1]))

    def test_var_metric_constant_column(self):
        X = np.column_stack([np.arange(10.0), np.ones(10)])
        assert var_metric(Dataset(X)).values[1] == 0.0

    def test_r2_precision_identity(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            A = rng.normal(size=(5, 5))
            X = rng.normal(size=(200, 5)) @ A + rng.normal(size=5)
            S = np.cov(X.T)
            oracle = 1 - 1 / (np.diag(S) * np.diag(np.linalg.inv(S)))
            vals = r2_metric(Dataset(X)).values
            np.testing.assert_allclose(vals, oracle, atol=1e-10)
            assert (vals >= -1e-9).all() and (vals <= 1).all()

    def test_r2_standardization_invariant(self):
        X = np.random.default_rng(2).normal(size=(100, 4)) @ np.triu(np.ones((4, 4)))
        ds = Dataset(X * [1, 10, 0.1, 5] + 3)
        np.testing.assert_allclose(
            r2_metric(ds).values, r2_metric(standardize_sample(ds)).values, atol=1e-9
        )

    def test_independent_columns(self):
        X = np.random.default_rng(3).normal(size=(10_000, 4))
        assert (r2_metric(Dataset(X)).values < 5 * 4 / 10_000).all()

    def test_bivariate(self):
        scm = Scm(np.array([[0, 0.6], [0, 0]]), np.array([1.0, 0.8]), "uumc")
        vals = r2_metric(simulate_static(scm, 10_000, 4)).values
        np.testing.assert_allclose(vals, 0.36, atol=0.02)

    def test_collider_hub(self):
        W = np.zeros((3, 3))
        W[0, 2] = W[1, 2] = 0.6
        scm = Scm(W, np.array([1.0, 1.0, np.sqrt(0.28)]), "uumc")
        assert r2_metric(simulate_static(scm, 100_000, 5)).values[2] == pytest.approx(0.72, abs=0.01)

    def test_duplicate_columns_ridge(self):
        x = np.random.default_rng(6).normal(size=(50, 1))
        X = np.hstack([x, x, np.random.default_rng(7).normal(size=(50, 1))])
        r2, ridged = ols_r2(X[:, :2], X[:, 2])
        assert ridged and np.isfinite(r2)
        mv = r2_metric(Dataset(X))
        assert any(f.startswith("ridge") for f in mv.flags)

    def test_too_few_rows(self):
        with pytest.raises(ParameterError):
            r2_metric(Dataset(np.ones((3, 3))))


class TestTimeSeriesMetrics:
    @staticmethod
    def lstsq_r2(design, y):
        D = np.column_stack([np.ones(len(y)), design])
        beta, *_ = np.linalg.lstsq(D, y, rcond=None)
        resid = y - D @ beta
        return 1 - resid.var() / y.var()

    def test_ar1_r2ts(self):
        W = np.zeros((1, 1, 2))
        W[0, 0, 1] = 0.5
        ds = simulate_svar(Svar(W, np.array([np.sqrt(0.75)])), 10_000, 0)
        assert r2_ts_metric(ds, 1).values[0] == pytest.approx(0.25, abs=0.02)
        star = r2star_ts_metric(ds, 1)
        assert star.values[0] == 0.0 and "empty-design:X0" in star.flags

    def test_ar_pair_without_cross(self):
        W = np.zeros((2, 2, 2))
        W[0, 0, 1] = W[1, 1, 1] = 0.7
        ds = simulate_svar(Svar(W, np.sqrt([0.51, 0.51])), 10_000, 1)
        assert (r2star_ts_metric(ds, 1).values < 0.01).all()

    def test_white_noise(self):
        ds = Dataset(np.random.default_rng(2).normal(size=(5000, 3)), "timeseries", 2)
        assert (r2_ts_metric(ds, 2).values < 0.01).all()

    def test_against_lstsq(self):
        ds = simulate_svar(reverse_r2_model(), 2000, 3)
        X, T = ds.data, ds.n_rows
        lags = {tau: X[2 - tau:T - tau] for tau in range(3)}
        y = lags[0][:, 1]
        full = np.column_stack([lags[0][:, [0, 2]], lags[1], lags[2]])
        star = np.column_stack([lags[t][:, [0, 2]] for t in range(3)])
        assert r2_ts_metric(ds, 2).values[1] == pytest.approx(self.lstsq_r2(full, y), abs=1e-10)
        assert r2star_ts_metric(ds, 2).values[1] == pytest.approx(self.lstsq_r2(star, y), abs=1e-10)

    def test_lag_alignment(self):
        x = np.random.default_rng(4).normal(size=500)
        X = np.column_stack([x[1:], x[:-1]])  # X1(t) = X0(t-1)
        ds = Dataset(X, "timeseries", 1)
        assert r2star_ts_metric(ds, 1).values[1] == pytest.approx(1.0, abs=1e-9)

    def test_requires_timeseries(self):
        with pytest.raises(ParameterError):
            r2_ts_metric(Dataset(np.ones((10, 2))), 1)
        with pytest.raises(ParameterError):
            r2_ts_metric(Dataset(np.ones((4, 2)), "timeseries"), 1)


class TestTsSortability:
    def test_acyclic_chain(self):
        g = TsGraph.from_edges(3, 1, [(0, 1, 1), (1, 2, 0), (0, 0, 1)])
        assert ts_sortability([1.0, 2.0, 3.0], g).score == 1.0

    def test_cyclic_pair(self):
        g = TsGraph.from_edges(2, 1, [(0, 1, 1), (1, 0, 1)])
        res = ts_sortability([1.0, 2.0], g)
        assert res.score == 0.5 and res.n_pairs == 0

    def test_reverse_r2_model(self):
        svar = reverse_r2_model()
        g = svar.graph()
        ds = simulate_svar(svar, 20_000, 0)
        var = ts_sortability(var_metric(ds), g).score
        star = ts_sortability(r2star_ts_metric(ds, 1), g).score
        full = ts_sortability(r2_ts_metric(ds, 1), g).score
        assert var < 0.5
        assert (star - 0.5) * (full - 0.5) < 0
        assert star > 0.5 > full

    def test_report(self):
        mv = MetricVector(np.array([1.0, 2.0]), "var")
        d = report_dict(mv, pairwise_sortability(mv, [[0, 1], [0, 0]]))
        assert set(d) == {"metric", "values", "score", "n_pairs", "n_correct", "tol", "flags"}
        assert d["score"] == 1.0
