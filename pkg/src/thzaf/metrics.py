"""Outage probability, average SEP and average capacity: exact and high-SNR forms.

The asymptotes keep only the dominant residue of the Mellin-Barnes
integrand.  For beta > alpha*mu that is the simple pole of Gamma(s) at
s = 0 (diversity order alpha*mu/2); for beta < alpha*mu it is the double
pole at s0 = mu - beta/alpha, which contributes a logarithmic factor and
diversity order beta/2.  beta == alpha*mu is rejected.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateError, DomainError
from .foxh import FoxHSpec, make_spec
from .snrstats import SnrModel, _lg, node_sum, snr_cdf
from .specfun import digamma, log_beta

__all__ = [
    "ModulationCoeffs",
    "BPSK",
    "Regime",
    "MetricResult",
    "outage",
    "outage_asymptotic",
    "asep",
    "asep_asymptotic",
    "capacity",
    "capacity_asymptotic",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModulationCoeffs:
    """Binary-constellation coefficients (a, b): conditional SEP a Q(sqrt(b gamma))."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("modulation coefficients a, b must be positive")


BPSK = ModulationCoeffs(1.0, 2.0)


class Regime(str, enum.Enum):
    BETA_GT_ALPHAMU = "beta_gt_alphamu"
    BETA_LE_ALPHAMU = "beta_le_alphamu"


@dataclass(frozen=True)
class MetricResult:
    exact: float | None
    asymptotic: float | None
    regime: Regime

    @property
    def ratio(self) -> float:
        """exact / asymptotic."""
        return self.exact / self.asymptotic


def _regime(model: SnrModel) -> Regime:
    f = model.fading
    if f.beta == f.alpha * f.mu:
        raise DegenerateError("beta == alpha*mu: residues collide, asymptote undefined")
    return Regime.BETA_GT_ALPHAMU if f.beta > f.alpha * f.mu else Regime.BETA_LE_ALPHAMU


@lru_cache(maxsize=256)
def asep_spec(alpha: float, mu: float, m: float, beta: float) -> FoxHSpec:
    b = beta - alpha * mu
    return make_spec(
        (3, 3, 5, 4),
        [(1 - mu - m, 1), (1 - mu, 1), (0.5 - alpha * mu / 2, alpha / 2), (1 + b, alpha), (1 + b, alpha)],
        [(0, 1), (b, alpha), (b, alpha), (-mu, 1)],
    )


@lru_cache(maxsize=256)
def capacity_spec(alpha: float, mu: float, m: float, beta: float) -> FoxHSpec:
    b = beta - alpha * mu
    h = alpha / 2
    return make_spec(
        (5, 2, 5, 5),
        [(1 - mu - m, 1), (-alpha * mu / 2, h), (1 + b, alpha), (1 + b, alpha), (1 - alpha * mu / 2, h)],
        [(0, 1), (b, alpha), (b, alpha), (-alpha * mu / 2, h), (-alpha * mu / 2, h)],
    )


def _params(model: SnrModel):
    f = model.fading
    return f.alpha, f.mu, f.m, f.beta


def _log_common(model: SnrModel) -> float:
    """log(R_M c1 c2^{-(mu+m)} / d0)."""
    f = model.fading
    return math.log(model.radial_factor) + math.log(f.c1) - (f.mu + f.m) * math.log(f.c2)


def _logsumexp(v: np.ndarray) -> float:
    top = float(np.max(v))
    return top + math.log(float(np.exp(v - top).sum()))


def outage(model: SnrModel, gamma_th):
    """Outage probability P(Gamma < gamma_th) = F_Gamma(gamma_th)."""
    return snr_cdf(model, gamma_th)


def _log_double_pole_factor(model: SnrModel, extra_upper_gamma: bool) -> float:
    """log of Gamma(s0) Gamma(mu+m-s0) / (mu - s0) [* Gamma(1/2 + alpha(mu - s0)/2)], s0 = mu - beta/alpha."""
    al, mu, m, be = _params(model)
    s0 = mu - be / al
    out = _lg(s0) + _lg(mu + m - s0) - math.log(mu - s0)
    if extra_upper_gamma:
        out += _lg(0.5 + al * (mu - s0) / 2)
    return out


def outage_asymptotic(model: SnrModel, gamma_th: float, *, with_exact: bool = True) -> MetricResult:
    """High-SNR outage asymptote from the dominant residue."""
    if not gamma_th > 0:
        raise DomainError("gamma_th must be positive")
    regime = _regime(model)
    al, mu, m, be = _params(model)
    f = model.fading
    lr = math.log(gamma_th / model.gamma0)
    if regime is Regime.BETA_GT_ALPHAMU:
        log_val = (
            math.log(4.0) + _log_common(model) - math.log(al * mu) - 2 * math.log(be - al * mu)
            + (al * mu / 2) * lr + _logsumexp(model.log_mix)
        )
        asym = math.exp(log_val)
    else:
        log_z = model.log_phi2 - math.log(f.c2) + (al / 2) * lr
        log_pref = (
            math.log(4.0) + _log_common(model) - 3 * math.log(al) - _lg(mu + m)
            + _log_double_pole_factor(model, False) + (al * mu / 2) * lr
        )
        terms = np.exp(log_pref + model.log_mix + (be / al - mu) * log_z) * (-log_z)
        asym = float(terms.sum())
    exact = outage(model, gamma_th) if with_exact else None
    return MetricResult(exact, asym, regime)


def _asep_log_arg(model: SnrModel, coeffs: ModulationCoeffs) -> float:
    """log(b gamma0 / 2)."""
    return math.log(coeffs.b * model.gamma0 / 2.0)


def asep(model: SnrModel, coeffs: ModulationCoeffs = BPSK) -> float:
    """Average symbol error probability for a binary constellation (a, b)."""
    al, mu, m, be = _params(model)
    f = model.fading
    lg0 = _asep_log_arg(model, coeffs)
    log_pref = (
        math.log(2 * coeffs.a / (math.sqrt(math.pi) * al)) + _log_common(model) - _lg(mu + m)
        - (al * mu / 2) * lg0
    )
    log_z = model.log_phi2 - math.log(f.c2) - (al / 2) * lg0
    return float(node_sum(model, asep_spec(al, mu, m, be), log_z[None, :], (log_pref + model.log_mix)[None, :])[0])


def asep_asymptotic(model: SnrModel, coeffs: ModulationCoeffs = BPSK, *, with_exact: bool = True) -> MetricResult:
    """High-SNR ASEP asymptote from the dominant residue."""
    regime = _regime(model)
    al, mu, m, be = _params(model)
    f = model.fading
    lg0 = _asep_log_arg(model, coeffs)
    if regime is Regime.BETA_GT_ALPHAMU:
        log_val = (
            math.log(2 * coeffs.a / (math.sqrt(math.pi) * al * mu)) + _log_common(model)
            - 2 * math.log(be - al * mu) + _lg(0.5 + al * mu / 2) - (al * mu / 2) * lg0
            + _logsumexp(model.log_mix)
        )
        asym = math.exp(log_val)
    else:
        log_z = model.log_phi2 - math.log(f.c2) - (al / 2) * lg0
        log_pref = (
            math.log(2 * coeffs.a / (math.sqrt(math.pi) * al**3)) + _log_common(model) - _lg(mu + m)
            - (al * mu / 2) * lg0 + _log_double_pole_factor(model, True)
        )
        terms = np.exp(log_pref + model.log_mix + (be / al - mu) * log_z) * (-log_z)
        asym = float(terms.sum())
    exact = asep(model, coeffs) if with_exact else None
    return MetricResult(exact, asym, regime)


def capacity(model: SnrModel) -> float:
    """Average channel capacity E[log2(1 + Gamma)] in bits/s/Hz."""
    al, mu, m, be = _params(model)
    f = model.fading
    lg0 = math.log(model.gamma0)
    log_pref = _log_common(model) + math.log(2.0 / _LN2) - _lg(mu + m) - (al * mu / 2) * lg0
    log_z = model.log_phi2 - math.log(f.c2) - (al / 2) * lg0
    return float(node_sum(model, capacity_spec(al, mu, m, be), log_z[None, :], (log_pref + model.log_mix)[None, :])[0])


def capacity_asymptotic(model: SnrModel) -> float:
    """High-SNR capacity, (1/ln 2) d/dn E[Gamma^n] at n = 0, i.e. E[log2 Gamma]."""
    al, mu, m, be = _params(model)
    f = model.fading
    log_pref = (
        math.log(4 * model.radial_factor / al) + log_beta(mu, m) + math.log(f.c1)
        - 2 * math.log(be) - m * math.log(f.c2)
    )
    weights = np.exp(log_pref + model.log_mix - mu * model.log_phi2)
    bracket = (
        (2 / al) * (digamma(mu) - digamma(m)) - 4 / be
        + (2 / al) * math.log(f.c2) + math.log(model.gamma0) - (2 / al) * model.log_phi2
    )
    return float((weights * bracket).sum() / _LN2)
