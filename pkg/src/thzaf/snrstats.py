"""First-order statistics of the end-to-end SNR.

All statistics share one structure: a prefactor times a sum over
Gauss-Legendre nodes x_k (mobility average) of a node weight
``mix_k = w_k * sum_i B_i (d0/R_M)^{beta_i+1} Phi(x_k; v1(i))`` multiplying a
Fox H-function evaluated at an argument proportional to Phi(x_k; v2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import (
    AbsorptionTable,
    FadingParams,
    LinkConfig,
    MisalignmentParams,
    default_absorption_table,
    derive_constants,
    gamma0_of,
    kappa_of_f,
)
from .errors import ConsistencyError, DomainError
from .foxh import DEFAULT_CONTOUR, ContourConfig, FoxHSpec, evaluate_many, make_spec
from .mobility import QuadratureRule, TopologyParams, gauss_legendre, kernel_vectors, log_phi_kernel, topology
from .specfun import log_gamma_complex

__all__ = [
    "SnrModel",
    "link_config",
    "build_model",
    "snr_pdf",
    "snr_cdf",
    "snr_mgf",
    "snr_moment",
    "moment_window",
    "CDF_SLACK",
]

CDF_SLACK = 1e-6


def _lg(x: float) -> float:
    return float(log_gamma_complex(x).real)


def link_config(
    alpha: float,
    mu: float,
    m: float,
    beta: float,
    delta: float,
    R_M: float,
    topology: str = "1D",
    gamma_bar: float = 1e12,
    frequency: float = 300e9,
    d0: float = 1.0,
) -> LinkConfig:
    """Assemble a validated :class:`LinkConfig` from scalar parameters (gamma_bar linear)."""
    return LinkConfig(
        frequency=frequency,
        d0=d0,
        delta=delta,
        R_M=R_M,
        topology=topology.upper(),
        gamma_bar=gamma_bar,
        misalignment=MisalignmentParams(beta),
        fading=derive_constants(alpha, mu, m, beta),
    )


@dataclass(frozen=True)
class SnrModel:
    """Everything needed to evaluate the SNR statistics of one link.

    ``log_phi2[k] = log Phi(x_k; v2)`` and ``log_mix[k]`` is the log of the
    mobility weight of node k (sum over topology terms already taken).
    """

    config: LinkConfig
    fading: FadingParams
    topo: TopologyParams
    rule: QuadratureRule
    kappa: float
    gamma0: float
    log_phi2: np.ndarray = field(repr=False)
    log_mix: np.ndarray = field(repr=False)
    contour: ContourConfig = field(default=DEFAULT_CONTOUR, repr=False)

    def with_gamma_bar(self, gamma_bar: float) -> "SnrModel":
        """Same link at a different reference SNR (gamma0 scales linearly)."""
        cfg = LinkConfig(**{**self.config.__dict__, "gamma_bar": gamma_bar})
        return SnrModel(
            cfg, self.fading, self.topo, self.rule, self.kappa,
            self.gamma0 * gamma_bar / self.config.gamma_bar,
            self.log_phi2, self.log_mix, self.contour,
        )

    @property
    def regime_gt(self) -> bool:
        """True when beta > alpha*mu (pointing error less severe than fading)."""
        f = self.fading
        return f.beta > f.alpha * f.mu

    @property
    def radial_factor(self) -> float:
        """R_M / d0, the length of the normalized distance support."""
        return self.config.R_M / self.config.d0


def build_model(
    config: LinkConfig,
    table: AbsorptionTable | None = None,
    N: int = 30,
    kappa: float | None = None,
    contour: ContourConfig = DEFAULT_CONTOUR,
) -> SnrModel:
    """Bind a link configuration to its quadrature rule and absorption value."""
    if kappa is None:
        kappa = kappa_of_f(table if table is not None else default_absorption_table(), config.frequency)
    topo = topology(config.topology)
    rule = gauss_legendre(N)
    x = rule.nodes
    _, v2 = kernel_vectors(0, config, kappa)
    log_phi2 = log_phi_kernel(x, v2)
    r = config.d0 / config.R_M
    logs = np.array([log_phi_kernel(x, kernel_vectors(i, config, kappa)[0]) for i in range(topo.l)])
    ref = logs.max(axis=0)
    acc = sum(B * r ** (e + 1.0) * np.exp(logs[i] - ref) for i, (B, e) in enumerate(zip(topo.B, topo.beta_exp)))
    if np.any(acc <= 0):
        raise ConsistencyError("non-positive mobility weight at a quadrature node")
    log_mix = np.log(rule.weights) + ref + np.log(acc)
    gamma0 = gamma0_of(config, kappa=kappa)
    for arr in (log_phi2, log_mix):
        arr.setflags(write=False)
    return SnrModel(config, config.fading, topo, rule, kappa, gamma0, log_phi2, log_mix, contour)


# --- Fox H kernels, cached on the fading/misalignment parameters -----------------

@lru_cache(maxsize=256)
def pdf_spec(alpha: float, mu: float, m: float, beta: float) -> FoxHSpec:
    b = beta - alpha * mu
    return make_spec(
        (3, 1, 3, 3),
        [(1 - mu - m, 1), (1 + b, alpha), (1 + b, alpha)],
        [(0, 1), (b, alpha), (b, alpha)],
    )


@lru_cache(maxsize=256)
def cdf_spec(alpha: float, mu: float, m: float, beta: float) -> FoxHSpec:
    b = beta - alpha * mu
    return make_spec(
        (3, 2, 4, 4),
        [(1 - mu - m, 1), (1 - mu, 1), (1 + b, alpha), (1 + b, alpha)],
        [(0, 1), (b, alpha), (b, alpha), (-mu, 1)],
    )


@lru_cache(maxsize=256)
def mgf_spec(alpha: float, mu: float, m: float, beta: float) -> FoxHSpec:
    return make_spec(
        (3, 2, 4, 3),
        [(1, alpha / 2), (1 - m, 1), (1 + beta, alpha), (1 + beta, alpha)],
        [(mu, 1), (beta, alpha), (beta, alpha)],
    )


def _params(model: SnrModel) -> tuple[float, float, float, float]:
    f = model.fading
    return f.alpha, f.mu, f.m, f.beta


def _log_c1(f: FadingParams) -> float:
    return math.log(f.c1)


def node_sum(model: SnrModel, spec: FoxHSpec, log_z: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """sum_k exp(log_scale[..., k]) * H(exp(log_z[..., k])), batched over leading axes."""
    z = np.exp(log_z)
    h = evaluate_many(spec, z.ravel(), model.contour).reshape(z.shape)
    return np.sum(np.exp(log_scale) * h, axis=-1)


def snr_pdf(model: SnrModel, gamma):
    """SNR density f_Gamma(gamma), vectorized over ``gamma``."""
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise DomainError("snr_pdf requires gamma > 0")
    al, mu, m, be = _params(model)
    f = model.fading
    lr = np.log(np.atleast_1d(g) / model.gamma0)[:, None]
    log_pref = (
        math.log(2 * model.radial_factor) + _log_c1(f) - (mu + m) * math.log(f.c2)
        - math.log(model.gamma0) - _lg(mu + m)
    )
    log_z = model.log_phi2[None, :] - math.log(f.c2) + (al / 2) * lr
    log_scale = log_pref + (al * mu / 2 - 1) * lr + model.log_mix[None, :]
    out = node_sum(model, pdf_spec(al, mu, m, be), log_z, log_scale)
    return float(out[0]) if g.ndim == 0 else out


def snr_cdf(model: SnrModel, gamma, *, strict: bool = True):
    """SNR CDF F_Gamma(gamma).

    Values within ``CDF_SLACK`` of [0, 1] are clipped; anything further out
    raises :class:`ConsistencyError` (``strict=False`` returns the raw value).
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise DomainError("snr_cdf requires gamma > 0")
    al, mu, m, be = _params(model)
    f = model.fading
    lr = np.log(np.atleast_1d(g) / model.gamma0)[:, None]
    log_pref = (
        math.log(4 * model.radial_factor / al) + _log_c1(f) - (mu + m) * math.log(f.c2) - _lg(mu + m)
    )
    log_z = model.log_phi2[None, :] - math.log(f.c2) + (al / 2) * lr
    log_scale = log_pref + (al * mu / 2) * lr + model.log_mix[None, :]
    raw = node_sum(model, cdf_spec(al, mu, m, be), log_z, log_scale)
    if strict:
        bad = (raw < -CDF_SLACK) | (raw > 1 + CDF_SLACK)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ConsistencyError(f"CDF value {raw[i]:.3e} at gamma={np.atleast_1d(g)[i]:.6g} outside [0, 1]")
        raw = np.clip(raw, 0.0, 1.0)
    return float(raw[0]) if g.ndim == 0 else raw


def snr_mgf(model: SnrModel, s):
    """Moment generating function M_Gamma(s) = E[exp(-s Gamma)] for real s > 0."""
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 0)):
        raise DomainError("snr_mgf requires s > 0")
    al, mu, m, be = _params(model)
    f = model.fading
    lsg = np.log(np.atleast_1d(s) * model.gamma0)[:, None]
    log_pref = math.log(2 * model.radial_factor) + _log_c1(f) - m * math.log(f.c2) - _lg(mu + m)
    log_z = model.log_phi2[None, :] - math.log(f.c2) - (al / 2) * lsg
    log_scale = log_pref + model.log_mix[None, :] - mu * model.log_phi2[None, :] + 0 * lsg
    out = node_sum(model, mgf_spec(al, mu, m, be), log_z, log_scale)
    return float(out[0]) if s.ndim == 0 else out


def moment_window(model: SnrModel) -> tuple[float, float]:
    """Open interval of real orders n for which the closed-form moment holds."""
    f = model.fading
    am = f.alpha * f.mu
    lo = -am / 2 if f.beta >= am else -f.beta / 2
    return lo, f.alpha * f.m / 2


def log_moment_terms(model: SnrModel, n: float) -> tuple[float, np.ndarray]:
    """(log prefactor, per-node log terms) of E[Gamma^n]; their log-sum-exp is log E[Gamma^n]."""
    f = model.fading
    al, mu, m, be = f.alpha, f.mu, f.m, f.beta
    e = 2 * n / al
    log_pref = (
        math.log(4 * model.radial_factor / al) + _log_c1(f) + n * math.log(model.gamma0)
        - (m - e) * math.log(f.c2)
        + _lg(e + mu) + 2 * _lg(be + 2 * n) + _lg(m - e) - _lg(mu + m) - 2 * _lg(1 + be + 2 * n)
    )
    return log_pref, model.log_mix - (e + mu) * model.log_phi2


def snr_moment(model: SnrModel, n: float) -> float:
    """Closed-form real-order moment E[Gamma^n].

    Raises
    ------
    DomainError
        Outside the validity window returned by :func:`moment_window`.

    Warns
    -----
    RuntimeWarning
        When ``delta * n`` reaches the near-field integrability limit of the
        topology. The window above only accounts for the fading.
    """
    lo, hi = moment_window(model)
    if not lo < n < hi:
        raise DomainError(f"moment order {n} outside validity window ({lo:g}, {hi:g})")
    near = min(model.topo.beta_exp) + 1.0
    if model.config.delta * n >= near:
        # the distance average diverges at d -> 1; GL still returns a finite, meaningless sum
        warnings.warn(
            f"E[Gamma^{n:g}] is infinite for delta={model.config.delta:g} on this topology "
            f"(needs delta*n < {near:g}); the returned value is a quadrature artifact",
            RuntimeWarning,
            stacklevel=2,
        )
    log_pref, terms = log_moment_terms(model, n)
    top = terms.max()
    return float(math.exp(log_pref + top) * np.exp(terms - top).sum())
