import math

import numpy as np
import pytest

from _oracles import snr_moment_analytic, snr_pdf_bruteforce
from thzaf import snrstats
from thzaf.errors import ConsistencyError, DomainError
from thzaf.mcsim import SimConfig, simulate
from thzaf.snrstats import build_model, link_config, moment_window, snr_cdf, snr_mgf, snr_moment, snr_pdf

FIG2 = dict(alpha=3.0, mu=3.0, m=1.5, beta=3.0, delta=2.0, R_M=50.0, topology="1D")
SMOOTH3D = dict(alpha=2.5, mu=3.0, m=1.5, beta=4.0, delta=2.0, R_M=10.0, topology="3D")


def make(params, gamma_bar=1e13, N=30):
    return build_model(link_config(**params, gamma_bar=gamma_bar), N=N)


@pytest.fixture(scope="module")
def fig2():
    return make(FIG2)


@pytest.fixture(scope="module")
def pdf_grid(fig2):
    """Composite Gauss-Legendre rule in u = ln(gamma) and the pdf on it."""
    x, w = np.polynomial.legendre.leggauss(16)
    lg0 = math.log(fig2.gamma0)
    edges = np.linspace(lg0 - 40, lg0 + 40, 9)
    u = np.concatenate([(a + b) / 2 + (b - a) / 2 * x for a, b in zip(edges[:-1], edges[1:])])
    wt = np.concatenate([(b - a) / 2 * w for a, b in zip(edges[:-1], edges[1:])])
    g = np.exp(u)
    return g, wt * g, snr_pdf(fig2, g)


class TestPdf:
    def test_integrates_to_one(self, pdf_grid):
        g, wg, f = pdf_grid
        assert float(np.sum(wg * f)) == pytest.approx(1.0, abs=1e-4)

    def test_positive(self, fig2):
        g = fig2.gamma0 * np.geomspace(1e-8, 1e8, 50)
        assert np.all(snr_pdf(fig2, g) > 0)

    def test_scalar_and_domain(self, fig2):
        assert isinstance(snr_pdf(fig2, fig2.gamma0), float)
        with pytest.raises(DomainError):
            snr_pdf(fig2, 0.0)

    def test_bruteforce_low_snr(self, fig2):
        # below gamma0 the distance integrand is smooth and N = 30 nodes are plenty
        g = 0.01 * fig2.gamma0
        assert snr_pdf(fig2, g) == pytest.approx(snr_pdf_bruteforce(g, fig2), rel=1e-7)

    def test_bruteforce_at_gamma0(self, fig2):
        g = fig2.gamma0
        ref = snr_pdf_bruteforce(g, fig2)
        # N = 30 leaves the near-field (d -> 1) part of the mobility average under-resolved
        assert snr_pdf(fig2, g) == pytest.approx(ref, rel=1e-2)
        fine = make(FIG2, N=200)
        assert snr_pdf(fine, g) == pytest.approx(ref, rel=1e-5)

    def test_bruteforce_3d(self):
        m = make(SMOOTH3D, gamma_bar=1e12)
        g = m.gamma0
        assert snr_pdf(m, g) == pytest.approx(snr_pdf_bruteforce(g, m), rel=1e-6)


class TestCdf:
    def test_derivative_matches_pdf(self, fig2):
        g = fig2.gamma0 * np.geomspace(1e-4, 1e3, 10)
        h = 1e-3
        hi = snr_cdf(fig2, g * math.exp(h))
        lo = snr_cdf(fig2, g * math.exp(-h))
        fd = (hi - lo) / (g * (math.exp(h) - math.exp(-h)))
        assert np.allclose(fd, snr_pdf(fig2, g), rtol=1e-3, atol=0)

    def test_monotone_and_limits(self, fig2):
        g = fig2.gamma0 * np.geomspace(1e-10, 1e10, 50)
        F = snr_cdf(fig2, g)
        # flat at 1 up to roundoff once the CDF saturates
        assert np.all(np.diff(F) >= -1e-12)
        # lower tail ~ gamma^{beta/2} times a squared log; tiny but not negligible
        assert 0 < F[0] < 1e-8
        assert F[-1] == pytest.approx(1.0, abs=1e-5)

    def test_scale_covariance(self, fig2):
        k = 1e3
        other = make(FIG2, gamma_bar=1e13 * k)
        g = fig2.gamma0 * np.array([1e-3, 0.2, 5.0])
        assert np.allclose(snr_cdf(other, k * g), snr_cdf(fig2, g), rtol=1e-8, atol=1e-15)
        assert np.allclose(snr_cdf(fig2.with_gamma_bar(1e16), k * g), snr_cdf(fig2, g), rtol=1e-8, atol=1e-15)

    def test_consistency_band(self, fig2, monkeypatch):
        monkeypatch.setattr(snrstats, "node_sum", lambda *a, **k: np.array([1.0 + 1e-7]))
        assert snr_cdf(fig2, 1.0) == 1.0
        monkeypatch.setattr(snrstats, "node_sum", lambda *a, **k: np.array([1.01]))
        with pytest.raises(ConsistencyError):
            snr_cdf(fig2, 1.0)
        assert snr_cdf(fig2, 1.0, strict=False) == pytest.approx(1.01)
        monkeypatch.setattr(snrstats, "node_sum", lambda *a, **k: np.array([-1e-3]))
        with pytest.raises(ConsistencyError):
            snr_cdf(fig2, 1.0)


class TestMgf:
    def test_small_s(self, fig2):
        assert snr_mgf(fig2, 1e-9 / fig2.gamma0) == pytest.approx(1.0, abs=1e-5)

    def test_decreasing(self, fig2):
        s = np.geomspace(1e-6, 1e3, 20) / fig2.gamma0
        M = snr_mgf(fig2, s)
        assert np.all(np.diff(M) < 0)
        assert np.all((M > 0) & (M < 1))

    @pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("ref", ["gamma_bar", "gamma0"])
    def test_laplace_transform_of_pdf(self, fig2, pdf_grid, k, ref):
        g, wg, f = pdf_grid
        s = k / (fig2.config.gamma_bar if ref == "gamma_bar" else fig2.gamma0)
        lap = float(np.sum(wg * f * np.exp(-s * g)))
        assert snr_mgf(fig2, s) == pytest.approx(lap, rel=1e-4)

    def test_domain(self, fig2):
        with pytest.raises(DomainError):
            snr_mgf(fig2, 0.0)


class TestMoments:
    def test_zeroth(self, fig2):
        assert snr_moment(fig2, 0.0) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("n", [-0.9, -0.3, 0.5, 1.0])
    def test_analytic_oracle(self, n):
        m = make(SMOOTH3D, gamma_bar=1e12)
        assert snr_moment(m, n) == pytest.approx(snr_moment_analytic(m, n), rel=1e-8)

    def test_singular_distance_average_converges_in_N(self):
        # delta*n = 2.4 leaves an integrable u^-0.4 at the near end, so GL converges only algebraically
        errs = []
        for N in (30, 100, 200):
            m = make(SMOOTH3D, gamma_bar=1e12, N=N)
            errs.append(abs(snr_moment(m, 1.2) / snr_moment_analytic(m, 1.2) - 1))
        assert errs[0] > errs[1] > errs[2]
        assert errs[0] < 1e-2 and errs[2] < 1e-3

    def test_window_regimes(self, fig2):
        # beta = alpha*mu here, so the lower bound is -alpha*mu/2 = -beta/2
        assert moment_window(fig2) == (-4.5 / 3 * 1.0, 3.0 * 1.5 / 2)
        weak = make(dict(FIG2, beta=12.0))
        assert moment_window(weak)[0] == -4.5
        strong = make(dict(FIG2, beta=2.5))
        assert moment_window(strong)[0] == -1.25

    def test_divergent_distance_average_warns(self):
        m = make(SMOOTH3D, gamma_bar=1e12)
        with pytest.warns(RuntimeWarning, match="infinite"):
            snr_moment(m, 1.5)

    @pytest.mark.parametrize("n", [2.25, 3.0, -1.5, -2.0])
    def test_outside_window(self, fig2, n):
        with pytest.raises(DomainError):
            snr_moment(fig2, n)

    @pytest.mark.slow
    def test_monte_carlo_mean(self):
        m = make(SMOOTH3D, gamma_bar=1e12)
        batch = simulate(m, SimConfig(10**7, seed=11))
        assert float(batch.snr.mean()) == pytest.approx(snr_moment(m, 1.0), rel=1e-2)

    def test_monte_carlo_fractional(self, fig2):
        batch = simulate(fig2, SimConfig(10**6, seed=5))
        assert float(np.mean(batch.snr**0.5)) == pytest.approx(snr_moment(fig2, 0.5), rel=1e-2)


def ks_statistic(model, seed, samples=10**6, probes=80):
    """sup |F_emp - F| over a set of sample quantiles (both one-sided gaps)."""
    snr = np.sort(simulate(model, SimConfig(samples, seed=seed)).snr)
    idx = np.unique(np.linspace(0, samples - 1, probes).astype(int))
    F = snr_cdf(model, snr[idx])
    upper = (idx + 1) / samples - F
    lower = F - idx / samples
    return float(max(upper.max(), lower.max()))


@pytest.mark.slow
class TestMonteCarlo:
    def test_ks_fig2(self, fig2):
        assert ks_statistic(fig2, seed=21) < 0.005

    def test_ks_3d(self):
        m = make(dict(alpha=2.5, mu=3.0, m=1.01, beta=4.0, delta=2.5, R_M=10.0, topology="3D"), gamma_bar=1e12)
        assert ks_statistic(m, seed=22) < 0.005
