import numpy as np
import pytest
from scipy import stats

from uumcgen.errors import DegenerateDrawError, ParameterError
from uumcgen.experiments import chain_graph, collider_graph
from uumcgen.graph import Dag, gen_er_dag
from uumcgen.scmgen import (
    Scm,
    analytic_moments,
    gen_fifty_fifty,
    gen_ipa,
    gen_iscm,
    gen_uumc,
    gen_uvn,
    generate,
    scm_from_dict,
    scm_to_dict,
    update_correlation,
    uumc_node,
)


def closed_form_cov(scm):
    """Cov = (I - A)^-T diag(s^2) (I - A)^-1 for row-vector samples X = X A + U."""
    inv = np.linalg.inv(np.eye(scm.n) - scm.weights)
    return inv.T @ np.diag(scm.noise_std**2) @ inv


def cov_to_corr(cov):
    sd = np.sqrt(np.diag(cov))
    return cov / np.outer(sd, sd)


class TestUumcNode:
    def test_single_edge_forced_radius(self):
        coefs, s = uumc_node([-1.7], 0.6, np.eye(1))
        assert abs(coefs[0]) == pytest.approx(0.6, abs=1e-15)
        assert s == pytest.approx(0.8, abs=1e-15)
        assert coefs[0] ** 2 + s**2 == pytest.approx(1.0, abs=1e-15)

    def test_two_independent_parents(self):
        coefs, s = uumc_node([3.0, 4.0], 0.5, np.eye(2))
        np.testing.assert_allclose(coefs, [0.3, 0.4], atol=1e-15)
        assert s == pytest.approx(np.sqrt(0.75), abs=1e-15)
        assert s == pytest.approx(0.8660, abs=1e-4)

    def test_correlated_parents_unit_variance(self):
        R = np.array([[1.0, 0.5], [0.5, 1.0]])
        coefs, s = uumc_node([1.0, 1.0], 0.9, R)
        assert coefs @ R @ coefs + s**2 == pytest.approx(1.0, abs=1e-14)

    def test_zero_direction(self):
        with pytest.raises(DegenerateDrawError):
            uumc_node([0.0, 0.0], 0.5, np.eye(2))

    def test_chain_correlation_update(self):
        corr = np.eye(3)
        A = np.zeros((3, 3))
        A[0, 1], A[1, 2] = 0.6, 0.7
        update_correlation(corr, A[:, 1], 1)
        update_correlation(corr, A[:, 2], 2)
        assert corr[0, 2] == pytest.approx(0.42, abs=1e-15)
        assert corr[1, 2] == pytest.approx(0.7, abs=1e-15)


class TestGenUumc:
    def test_invariants(self):
        for s in range(100):
            dag = gen_er_dag(10, 0.4, s)
            scm = gen_uumc(dag, s)
            assert not ((scm.weights != 0) & ~dag.adj).any()
            assert (scm.noise_std > 0).all()
            A, R = scm.weights, scm.corr
            lhs = np.einsum("ji,ki,jk->i", A, A, R) + scm.noise_std**2
            np.testing.assert_allclose(lhs, 1.0, atol=1e-10)
            np.testing.assert_allclose(R, R.T, atol=0)
            np.testing.assert_allclose(np.diag(R), 1.0)
            assert np.linalg.eigvalsh(R).min() > -1e-10

    def test_unitless_and_corr_match_moments(self):
        for s in range(200):
            scm = gen_uumc(gen_er_dag(10, 0.3, s), s)
            var, cov = analytic_moments(scm)
            np.testing.assert_allclose(var, 1.0, atol=1e-10)
            np.testing.assert_allclose(scm.corr, cov_to_corr(cov), atol=1e-10)

    def test_roots_have_unit_noise(self):
        scm = gen_uumc(Dag.from_edges(4, [(0, 3), (1, 3)]), 5)
        np.testing.assert_array_equal(scm.noise_std[:3], 1.0)

    def test_unrestricted(self):
        dag = chain_graph(2)
        ratios = []
        for s in range(10_000):
            scm = gen_uumc(dag, s)
            ratios.append(scm.weights[0, 1] ** 2 / scm.noise_std[1] ** 2)
        ratios = np.array(ratios)
        assert (ratios < 0.01).any()
        assert (ratios > 100).any()

    @staticmethod
    def _radius_pow(scm, i):
        d = np.count_nonzero(scm.weights[:, i])
        q = (scm.weights[:, i] ** 2).sum() / scm.noise_std[i] ** 2
        return (q / (1 + q)) ** (d / 2)

    @pytest.mark.parametrize("d", [1, 2, 5])
    def test_markov_consistent_radius_uniform(self, d):
        star = collider_graph(d)
        # same in-degree, different remote structure: parents form a chain
        edges = [(j, d) for j in range(d)] + [(j, j + 1) for j in range(d - 1)]
        chained = Dag.from_edges(d + 1, edges)
        for dag in (star, chained):
            u = [self._radius_pow(gen_uumc(dag, s), d) for s in range(10_000)]
            assert stats.kstest(u, "uniform").pvalue > 0.001

    def test_direction_uniform_on_circle(self):
        dag = collider_graph(2)
        angles = []
        for s in range(10_000):
            a = gen_uumc(dag, s).weights[:2, 2]
            angles.append(np.arctan2(a[1], a[0]))
        assert stats.kstest(angles, stats.uniform(-np.pi, 2 * np.pi).cdf).pvalue > 0.001

    def test_direction_coordinate_symmetry(self):
        dag = collider_graph(3)
        A = np.array([gen_uumc(dag, s).weights[:3, 3] for s in range(5000)])
        signs = (A > 0).sum(axis=0)
        for c in signs:
            assert stats.binomtest(int(c), 5000, 0.5).pvalue > 0.001
        mags = np.abs(A)
        assert stats.ks_2samp(mags[:, 0], mags[:, 2]).pvalue > 0.001

    def test_deterministic(self):
        dag = gen_er_dag(10, 0.5, 0)
        a, b = gen_uumc(dag, 42), gen_uumc(dag, 42)
        assert np.array_equal(a.weights, b.weights) and np.array_equal(a.corr, b.corr)


class TestBaselines:
    def test_uvn_ranges(self):
        dag = gen_er_dag(10, 0.5, 1)
        scm = gen_uvn(dag, 3)
        w = np.abs(scm.weights[dag.adj])
        assert ((w >= 0.5) & (w <= 2.0)).all()
        assert (scm.weights[~dag.adj] == 0).all()
        np.testing.assert_array_equal(scm.noise_std, 1.0)
        assert scm.corr is None

    def test_uvn_signs_balanced(self):
        dag = gen_er_dag(20, 1.0, 0)
        w = gen_uvn(dag, 4).weights[dag.adj]
        assert stats.binomtest(int((w > 0).sum()), w.size, 0.5).pvalue > 0.001

    def test_uvn_empty_graph(self):
        var, _ = analytic_moments(gen_uvn(Dag(np.zeros((4, 4), bool)), 0))
        np.testing.assert_array_equal(var, 1.0)

    def test_uvn_point_mass_toy_model(self):
        scm = gen_uvn(chain_graph(3), 0, coef_low=1.0, coef_high=1.0)
        np.testing.assert_array_equal(np.abs(scm.weights[[0, 1], [1, 2]]), 1.0)

    @pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (2.0, 1.0), (-1.0, 2.0)])
    def test_bad_bounds(self, lo, hi):
        with pytest.raises(ParameterError):
            gen_uvn(chain_graph(2), 0, lo, hi)

    @pytest.mark.parametrize(
        "a,expected_a,expected_s",
        [(1.0, 0.7071067811865475, 0.7071067811865475), (1.5, 0.8320502943378437, 0.5547001962252291)],
    )
    def test_ipa_single_parent(self, a, expected_a, expected_s):
        scm = gen_ipa(chain_graph(2), 0, coef_low=a, coef_high=a)
        assert abs(scm.weights[0, 1]) == pytest.approx(expected_a, abs=1e-12)
        assert scm.noise_std[1] == pytest.approx(expected_s, abs=1e-12)
        assert scm.weights[0, 1] ** 2 + scm.noise_std[1] ** 2 == pytest.approx(1.0, abs=1e-12)
        assert scm.noise_std[0] == 1.0

    def test_ipa_matches_uvn_draw(self):
        dag = gen_er_dag(8, 0.5, 2)
        uvn, ipa = gen_uvn(dag, 9), gen_ipa(dag, 9)
        scale = np.sqrt(1 + (uvn.weights**2).sum(axis=0))
        np.testing.assert_allclose(ipa.weights * scale, uvn.weights)
        np.testing.assert_allclose(ipa.noise_std * scale, 1.0)

    def test_fifty_fifty(self):
        dag = gen_er_dag(6, 0.6, 3)
        scm, ds = gen_fifty_fifty(dag, 100_000, 5)
        roots = ~dag.adj.any(axis=0)
        np.testing.assert_array_equal(scm.noise_std[roots], 1.0)
        np.testing.assert_allclose(scm.noise_std[~roots], np.sqrt(2) / 2)
        X = ds.data
        for i in np.flatnonzero(~roots):
            explained = X @ scm.weights[:, i]
            assert explained.var(ddof=1) == pytest.approx(0.5, rel=1e-9)
        np.testing.assert_allclose(X.var(axis=0, ddof=1), 1.0, rtol=0.05)

    def test_fifty_fifty_data_consistent_with_model(self):
        dag = gen_er_dag(5, 0.7, 1)
        scm, ds = gen_fifty_fifty(dag, 50, 2)
        resid = ds.data - ds.data @ scm.weights
        for i in range(5):
            assert resid[:, i].std() > 0

    def test_iscm(self):
        dag = gen_er_dag(10, 0.5, 4)
        scm, ds = gen_iscm(dag, 200, 6)
        np.testing.assert_allclose(ds.data.std(axis=0, ddof=1), 1.0, atol=1e-9)
        ratio = np.abs(scm.weights[dag.adj]) / scm.noise_std[np.nonzero(dag.adj)[1]]
        assert ((ratio >= 0.5 - 1e-12) & (ratio <= 2.0 + 1e-12)).all()
        # residual of the stored model reproduces scaled unit noise exactly
        resid = ds.data - ds.data @ scm.weights
        np.testing.assert_allclose((resid / scm.noise_std).std(axis=0, ddof=1), 1.0, rtol=0.3)

    def test_iscm_root_is_standardized_noise(self):
        scm, ds = gen_iscm(Dag(np.zeros((3, 3), bool)), 100, 0)
        np.testing.assert_allclose(ds.data.std(axis=0, ddof=1), 1.0, atol=1e-12)

    def test_sample_coupled_need_samples(self):
        with pytest.raises(ParameterError):
            generate("iscm", chain_graph(2), 0)
        with pytest.raises(ParameterError):
            gen_iscm(chain_graph(2), 1, 0)


class TestAnalyticMoments:
    def test_toy_chain(self):
        scm = Scm(np.diag([1.0, 1.0], 1), np.ones(3), "uvn")
        var, _ = analytic_moments(scm)
        np.testing.assert_allclose(var, [1, 2, 3])

    def test_collider_diamond(self):
        # Z=0, X1=1, X2=2, Y=3 with Z->X1, X1->Y, X2->Y, unit parameters
        dag = Dag.from_edges(4, [(0, 1), (1, 3), (2, 3)])
        scm = Scm(dag.adj.astype(float), np.ones(4), "uvn")
        var, _ = analytic_moments(scm)
        assert var[3] == pytest.approx(4.0)
        assert 1 - scm.noise_std[3] ** 2 / var[3] == pytest.approx(0.75)

    def test_matches_closed_form(self):
        for s in range(20):
            scm = gen_uvn(gen_er_dag(8, 0.5, s), s)
            _, cov = analytic_moments(scm)
            np.testing.assert_allclose(cov, closed_form_cov(scm), rtol=1e-12)

    def test_rejects_sample_coupled(self):
        scm, _ = gen_iscm(chain_graph(3), 10, 0)
        with pytest.raises(ParameterError):
            analytic_moments(scm)

    @pytest.mark.parametrize("c", [2.0, -0.5, 3.7])
    def test_scaling_product(self, c):
        scm = gen_uumc(gen_er_dag(6, 0.6, 1), 1)
        i = 4
        w = scm.weights.copy()
        w[:, i] *= c
        scaled = Scm(w, scm.noise_std * np.where(np.arange(6) == i, abs(c), 1.0), "uumc",
                     noise_mean=scm.noise_mean * np.where(np.arange(6) == i, c, 1.0))
        before, _ = analytic_moments(scm)
        after, _ = analytic_moments(scaled)
        assert np.sqrt(after[i]) == pytest.approx(abs(c) * np.sqrt(before[i]), rel=1e-12)
        np.testing.assert_allclose(after[:i], before[:i])


def test_scm_json_roundtrip():
    scm = gen_uumc(gen_er_dag(6, 0.5, 0), 0)
    d = scm_to_dict(scm, seed=7)
    back = scm_from_dict(d)
    np.testing.assert_array_equal(back.weights, scm.weights)
    np.testing.assert_array_equal(back.corr, scm.corr)
    assert d["params"]["seed"] == 7
    assert back.method == "uumc"
