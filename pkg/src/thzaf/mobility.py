"""Random-waypoint distance statistics and Gauss-Legendre mobility averaging.

The normalized distance D = (R_t + d0)/d0 lives on (1, 1 + R_M/d0).  The
mobility average over D is mapped onto [-1, 1] through
d = 1 + (R_M / (2 d0)) (x + 1) and evaluated with an N-point
Gauss-Legendre rule, which turns every SNR statistic into a finite sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "TopologyParams",
    "PRESETS",
    "topology",
    "rwp_pdf",
    "rwp_unit_cdf",
    "QuadratureRule",
    "gauss_legendre",
    "phi_kernel",
    "log_phi_kernel",
    "kernel_vectors",
]


@dataclass(frozen=True)
class TopologyParams:
    """Polynomial RWP density coefficients: f(u) = sum_i B_i u^{beta_i} on u in [0, 1]."""

    name: str
    B: tuple[float, ...]
    beta_exp: tuple[float, ...]

    @property
    def l(self) -> int:
        return len(self.B)

    def __post_init__(self):
        if len(self.B) != len(self.beta_exp) or not self.B:
            raise DomainError("topology needs equal-length, non-empty B and beta_exp")
        total = sum(b / (e + 1.0) for b, e in zip(self.B, self.beta_exp))
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"topology coefficients integrate to {total}, not 1")


PRESETS = {
    "1D": TopologyParams("1D", (6.0, -6.0), (1.0, 2.0)),
    "2D": TopologyParams("2D", (324.0 / 73.0, -420.0 / 73.0, 96.0 / 73.0), (1.0, 3.0, 5.0)),
    "3D": TopologyParams("3D", (735.0 / 72.0, -1190.0 / 72.0, 455.0 / 72.0), (2.0, 4.0, 6.0)),
}


def topology(name: str) -> TopologyParams:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise DomainError(f"unknown topology {name!r}; expected one of {sorted(PRESETS)}") from None


def rwp_pdf(d, topo: TopologyParams, d0: float, R_M: float):
    """RWP density of the normalized distance, f_D(d) = sum_i B_i (d0/R_M)^{beta_i+1} (d-1)^{beta_i}."""
    d = np.asarray(d, dtype=float)
    if np.any((d <= 1.0) | (d >= 1.0 + R_M / d0)):
        raise DomainError("rwp_pdf is supported on (1, 1 + R_M/d0)")
    r = d0 / R_M
    out = sum(B * r ** (e + 1.0) * (d - 1.0) ** e for B, e in zip(topo.B, topo.beta_exp))
    return float(out) if np.ndim(out) == 0 else out


def rwp_unit_cdf(u, topo: TopologyParams):
    """CDF of u = (d-1) d0 / R_M: sum_i B_i u^{beta_i+1} / (beta_i+1)."""
    u = np.asarray(u, dtype=float)
    return sum(B * u ** (e + 1.0) / (e + 1.0) for B, e in zip(topo.B, topo.beta_exp))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def N(self) -> int:
        return int(self.nodes.size)


@lru_cache(maxsize=None)
def _legendre_roots(N: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, N + 1)
    x = np.cos(np.pi * (k - 0.25) / (N + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for j in range(2, N + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        if N == 1:
            p0, p1 = np.ones_like(x), x.copy()
        dp = N * (x * p1 - p0) / (x * x - 1.0)
        step = p1 / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-14:
            break
    # final derivative at the converged roots
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, N + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = N * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


def gauss_legendre(N: int) -> QuadratureRule:
    """N-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_N.

    Chebyshev-type initial guesses, tolerance 1e-14, 1 <= N <= 200.
    """
    if not isinstance(N, (int, np.integer)) or not 1 <= N <= 200:
        raise DomainError(f"quadrature order must be an integer in [1, 200], got {N!r}")
    x, w = _legendre_roots(int(N))
    x = x.copy()
    w = w.copy()
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


def log_phi_kernel(x_k, a):
    """log Phi(x_k; a) = a2 log(a1 (x_k+1)) + a3 (a1 (x_k+1) + 1)."""
    a1, a2, a3 = a
    y = a1 * (np.asarray(x_k, dtype=float) + 1.0)
    return a2 * np.log(y) + a3 * (y + 1.0)


def phi_kernel(x_k, a):
    """Phi(x_k; a) = [a1 (x_k+1)]^{a2} exp{a3 [a1 (x_k+1) + 1]}."""
    out = np.exp(log_phi_kernel(x_k, a))
    return float(out) if np.ndim(out) == 0 else out


def kernel_vectors(i: int, config, kappa: float):
    """Kernel parameter triples for topology term ``i`` (0-based).

    v1(i) = [R_M/(2 d0), beta_i + alpha mu delta / 2, (alpha/2) kappa mu d0]
    v2    = [R_M/(2 d0), alpha delta / 2,          (alpha/2) kappa d0]
    """
    topo = topology(config.topology)
    if not 0 <= i < topo.l:
        raise IndexError(f"topology term {i} out of range for {topo.name} (l={topo.l})")
    fad = config.fading
    a1 = config.R_M / (2.0 * config.d0)
    v1 = (
        a1,
        topo.beta_exp[i] + fad.alpha * fad.mu * config.delta / 2.0,
        fad.alpha / 2.0 * kappa * fad.mu * config.d0,
    )
    v2 = (a1, fad.alpha * config.delta / 2.0, fad.alpha / 2.0 * kappa * config.d0)
    return v1, v2
