"""Independent reference computations used across the test modules.

Nothing here touches the contour integrator: every oracle is either a
closed form or a direct real-line quadrature of the model densities.
"""

import math

import numpy as np
from scipy import integrate, special

# --- Fox H pdf kernel H^{3,1}_{3,3} --------------------------------------------------


def pdf_kernel_1d(z, alpha, mu, m, beta):
    """Gamma(mu+m) * int_0^inf u e^{-b u} (1 + z e^{alpha u})^{-(mu+m)} du, b = beta - alpha mu."""
    b = beta - alpha * mu
    rho = mu + m
    lz = math.log(z)

    def f(u):
        if u <= 0:
            return 0.0
        return math.exp(math.log(u) - b * u - rho * np.logaddexp(0.0, lz + alpha * u))

    peak = max(-lz / alpha, 1.0)
    cuts = [0.0, peak / 2, peak, 1.5 * peak, peak + 20.0]
    val = sum(
        integrate.quad(f, cuts[i], cuts[i + 1], limit=500, epsabs=0, epsrel=1e-12)[0]
        for i in range(len(cuts) - 1)
    )
    val += integrate.quad(f, cuts[-1], np.inf, limit=500, epsabs=0, epsrel=1e-12)[0]
    return special.gamma(rho) * val


# --- model densities written out directly ------------------------------------------


def pointing_pdf(z, beta):
    return -(beta**2 / 4.0) * math.log(z) * z ** (beta / 2.0 - 1.0)


def fading_pdf(x, alpha, mu, m, c2):
    lb = special.betaln(mu, m)
    return math.exp(
        math.log(alpha / 2.0) - lb + m * math.log(c2) + (alpha * mu / 2.0 - 1.0) * math.log(x)
        - (m + mu) * np.logaddexp(alpha / 2.0 * math.log(x), math.log(c2))
    )


def fading_cdf(x, alpha, mu, m, c2):
    """X^{alpha/2}/c2 is beta-prime(mu, m), so P(X <= x) = I_{w/(1+w)}(mu, m), w = x^{alpha/2}/c2."""
    w = np.asarray(x, dtype=float) ** (alpha / 2.0) / c2
    return special.betainc(mu, m, w / (1.0 + w))


def rwp_density(d, B, e, d0, R_M):
    r = d0 / R_M
    return sum(Bi * r ** (ei + 1.0) * (d - 1.0) ** ei for Bi, ei in zip(B, e))


def snr_pdf_bruteforce(gamma, model):
    """f_Gamma(gamma) by nested quadrature over distance and pointing loss.

    Given d and z the SNR is linear in the fading power X, so the fading
    variable is integrated out through the change of variables
    x = gamma / (gamma0 g(d) z).
    """
    cfg = model.config
    f = model.fading
    g0, kap, dl = model.gamma0, model.kappa, cfg.delta
    topo = model.topo
    dmax = 1.0 + cfg.R_M / cfg.d0

    def path(d):
        return (d - 1.0) ** (-dl) * math.exp(-kap * cfg.d0 * d)

    def over_z(d):
        log_scale = math.log(g0) - dl * math.log(d - 1.0) - kap * cfg.d0 * d
        lg = math.log(gamma)
        h2 = f.beta / 2.0

        def h(u):  # z = exp(-u); dz/z and the 1/(scale z) Jacobian leave 1/scale
            if u <= 0:
                return 0.0
            lx = lg - log_scale + u
            log_fz = math.log(f.beta**2 / 4.0) + math.log(u) - (h2 - 1.0) * u
            log_fx = (
                math.log(f.alpha / 2.0) - special.betaln(f.mu, f.m) + f.m * math.log(f.c2)
                + (f.alpha * f.mu / 2.0 - 1.0) * lx
                - (f.m + f.mu) * np.logaddexp(f.alpha / 2.0 * lx, math.log(f.c2))
            )
            return math.exp(log_fz + log_fx - log_scale)

        # the fading factor switches from growth to decay near x^{alpha/2} = c2
        knee = max(math.log(f.c2) * 2.0 / f.alpha - (lg - log_scale), 0.0)
        cuts = sorted({0.0, knee, knee + 5.0, knee + 40.0})
        val = sum(integrate.quad(h, cuts[i], cuts[i + 1], epsabs=0, epsrel=1e-10, limit=400)[0]
                  for i in range(len(cuts) - 1))
        return val + integrate.quad(h, cuts[-1], np.inf, epsabs=0, epsrel=1e-10, limit=400)[0]

    def outer(d):
        return rwp_density(d, topo.B, topo.beta_exp, cfg.d0, cfg.R_M) * over_z(d)

    edges = 1.0 + (dmax - 1.0) * np.array([0.0, 1e-4, 1e-2, 0.1, 0.5, 1.0])
    return sum(
        integrate.quad(outer, edges[i], edges[i + 1], epsabs=0, epsrel=1e-9, limit=200)[0]
        for i in range(len(edges) - 1)
    )


# --- analytic moments ----------------------------------------------------------------


def snr_moment_analytic(model, n):
    """E[Gamma^n] = gamma0^n E[Z^n] E[X^n] E[path(D)^n], the last by quadrature."""
    cfg, f, topo = model.config, model.fading, model.topo
    al, mu, m, be, c2 = f.alpha, f.mu, f.m, f.beta, f.c2
    ez = be**2 / (be + 2 * n) ** 2
    ex = math.exp(
        (2 * n / al) * math.log(c2) + special.gammaln(mu + 2 * n / al) + special.gammaln(m - 2 * n / al)
        - special.gammaln(mu) - special.gammaln(m)
    )
    R = cfg.R_M / cfg.d0

    def g(u):  # u = d - 1 in (0, R)
        d = 1.0 + u
        return rwp_density(d, topo.B, topo.beta_exp, cfg.d0, cfg.R_M) * (
            u ** (-cfg.delta) * math.exp(-model.kappa * cfg.d0 * d)
        ) ** n

    ed = integrate.quad(g, 0, R, epsabs=0, epsrel=1e-11, limit=400, points=[1e-6 * R, 1e-3 * R, 0.1 * R])[0]
    return model.gamma0**n * ez * ex * ed


def product_pdf_2d(y, fading):
    """Density of Y = V1 V2 X with V_i = U_i^{2/beta}, by 2-D quadrature over t_i = -ln V_i.

    Neither the pointing-loss density nor any H-function enters; each V_i
    contributes its own exponential density (beta/2) e^{-beta t/2}.
    """
    al, mu, m, be, c2 = fading.alpha, fading.mu, fading.m, fading.beta, fading.c2
    ly = math.log(y)
    lb = special.betaln(mu, m)

    def log_fx(lx):
        return (
            math.log(al / 2.0) - lb + m * math.log(c2) + (al * mu / 2.0 - 1.0) * lx
            - (m + mu) * np.logaddexp(al / 2.0 * lx, math.log(c2))
        )

    def g(t2, t1):
        s = t1 + t2
        return math.exp(log_fx(ly + s) + s + 2 * math.log(be / 2.0) - be * s / 2.0)

    # split each axis where X = y e^{s} crosses its knee x^{alpha/2} = c2
    knee = max(2.0 * math.log(c2) / al - ly, 0.0)
    cuts = sorted({0.0, knee / 2, knee, knee + 10.0, knee + 80.0})
    total = 0.0
    for a1, b1 in zip(cuts[:-1], cuts[1:]):
        for a2, b2 in zip(cuts[:-1], cuts[1:]):
            total += integrate.dblquad(g, a1, b1, a2, b2, epsabs=0, epsrel=1e-10)[0]
    return total
