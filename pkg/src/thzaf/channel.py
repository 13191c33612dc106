"""Physical-layer parameterization of the THz link.

alpha-F fading constants, pointing-error statistics, path loss and
molecular absorption.  The fading scale ``lambda_scale`` is fixed so that
the fading power has mean (beta+2)^2/beta^2, which together with the
pointing-error mean beta^2/(beta+2)^2 normalizes E[H_p^2 H_f^2] to one.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError, RangeError
from .specfun import beta_fn, log_beta

__all__ = [
    "SPEED_OF_LIGHT",
    "FadingParams",
    "MisalignmentParams",
    "AbsorptionTable",
    "LinkConfig",
    "TOPOLOGIES",
    "fading_constants",
    "derive_constants",
    "kappa_of_f",
    "pointing_pdf",
    "pointing_cdf",
    "alphaf_power_pdf",
    "gamma0_of",
    "default_absorption_table",
    "ABSORPTION_ENV",
]

SPEED_OF_LIGHT = 299_792_458.0
TOPOLOGIES = ("1D", "2D", "3D")
ABSORPTION_ENV = "THZAF_ABSORPTION_TABLE"
_DEFAULT_TABLE = "kappa0_standard_atmosphere.csv"


@dataclass(frozen=True)
class FadingParams:
    """alpha-F fading parameters plus the derived constants c1, c2.

    ``beta`` is carried along because both constants depend on the
    misalignment factor through the normalization.
    """

    alpha: float
    mu: float
    m: float
    beta: float
    lambda_scale: float
    c1: float
    c2: float

    @property
    def mean_power(self) -> float:
        """E[H_f^2] implied by the joint normalization."""
        return (self.beta + 2.0) ** 2 / self.beta**2


@dataclass(frozen=True)
class MisalignmentParams:
    beta: float

    def __post_init__(self):
        if not self.beta > 2:
            raise DomainError(f"misalignment factor beta must exceed 2, got {self.beta}")


def fading_constants(alpha: float, mu: float, m: float, beta: float, lambda_scale: float) -> tuple[float, float]:
    """Return (c1, c2) for an explicit fading scale, without regime checks.

    c2 = (m-1)(beta+2)^alpha / (lambda^{alpha/2} mu beta^alpha)
    c1 = beta^2 alpha / (8 B(mu, m)) * c2^m
    """
    c2 = (m - 1.0) * (beta + 2.0) ** alpha / (lambda_scale ** (alpha / 2.0) * mu * beta**alpha)
    c1 = beta**2 * alpha / (8.0 * beta_fn(mu, m)) * c2**m
    return c1, c2


def _normalized_lambda(alpha: float, mu: float, m: float) -> float:
    return ((m - 1.0) / mu) ** (2.0 / alpha) * math.exp(
        log_beta(mu + 2.0 / alpha, m - 2.0 / alpha) - log_beta(mu, m)
    )


def derive_constants(alpha: float, mu: float, m: float, beta: float) -> FadingParams:
    """Fading constants for the normalized alpha-F / pointing-error model.

    Raises
    ------
    DomainError
        If m <= max(2/alpha, 1), beta <= 2, or alpha, mu are not positive.
    """
    if not (alpha > 0 and mu > 0):
        raise DomainError("alpha and mu must be positive")
    if not m > max(2.0 / alpha, 1.0):
        raise DomainError(f"shadowing m={m} must exceed max(2/alpha, 1)={max(2.0 / alpha, 1.0):g}")
    if not beta > 2:
        raise DomainError(f"misalignment factor beta must exceed 2, got {beta}")
    lam = _normalized_lambda(alpha, mu, m)
    # (m-1) cancels inside c2 once lambda is substituted; compute it in that form
    c2 = ((beta + 2.0) / beta) ** alpha * math.exp(
        (alpha / 2.0) * (log_beta(mu, m) - log_beta(mu + 2.0 / alpha, m - 2.0 / alpha))
    )
    c1 = beta**2 * alpha / (8.0 * beta_fn(mu, m)) * c2**m
    return FadingParams(alpha, mu, m, beta, lam, c1, c2)


def pointing_pdf(z, beta: float):
    """Pointing-error power density f_Z(z) = -(beta^2/4) ln(z) z^{beta/2 - 1} on (0, 1)."""
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0) | (z >= 1)):
        raise DomainError("pointing_pdf is supported on the open interval (0, 1)")
    out = -(beta**2 / 4.0) * np.log(z) * z ** (beta / 2.0 - 1.0)
    return float(out) if out.ndim == 0 else out


def pointing_cdf(z, beta: float):
    """Closed-form CDF of the pointing-error power: z^{b}(1 - b ln z), b = beta/2."""
    z = np.asarray(z, dtype=float)
    h = beta / 2.0
    zc = np.clip(z, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(zc > 0, zc**h * (1.0 - h * np.log(np.where(zc > 0, zc, 1.0))), 0.0)
    return float(out) if out.ndim == 0 else out


def alphaf_power_pdf(x, fading: FadingParams):
    """Density of the alpha-F fading power X = H_f^2 at the normalized mean power.

    f_X(x) = alpha/(2B(mu,m)) c2^m x^{alpha mu/2 - 1} (x^{alpha/2} + c2)^{-(m+mu)}
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("alphaf_power_pdf requires x > 0")
    a, mu, m, c2 = fading.alpha, fading.mu, fading.m, fading.c2
    lx = np.log(x)
    logf = (
        math.log(a / 2.0)
        - log_beta(mu, m)
        + m * math.log(c2)
        + (a * mu / 2.0 - 1.0) * lx
        - (m + mu) * np.logaddexp(a / 2.0 * lx, math.log(c2))
    )
    out = np.exp(logf)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AbsorptionTable:
    """Tabulated specific attenuation kappa0(f) in dB/km, frequencies in Hz."""

    frequency_hz: np.ndarray
    kappa0_db_per_km: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        f = np.asarray(self.frequency_hz, dtype=float)
        k = np.asarray(self.kappa0_db_per_km, dtype=float)
        if f.ndim != 1 or f.shape != k.shape or f.size == 0:
            raise DomainError("absorption table needs equal-length, non-empty columns")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise DomainError("absorption table frequencies must be strictly increasing")
        if np.any(k < 0):
            raise DomainError("absorption coefficients must be non-negative")
        object.__setattr__(self, "frequency_hz", f)
        object.__setattr__(self, "kappa0_db_per_km", k)

    @classmethod
    def from_csv(cls, path) -> "AbsorptionTable":
        """Load a two-column CSV (frequency_GHz, kappa0_dB_per_km) with a header row."""
        path = Path(path)
        freqs, kappas = [], []
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 2:
                raise DomainError(f"{path}: missing header row")
            try:
                float(header[0])
            except ValueError:
                pass
            else:
                raise DomainError(f"{path}: first row must be a header, got numbers")
            for lineno, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                try:
                    freqs.append(float(row[0]) * 1e9)
                    kappas.append(float(row[1]))
                except (ValueError, IndexError) as exc:
                    raise DomainError(f"{path}:{lineno}: malformed row {row!r}") from exc
        return cls(np.array(freqs), np.array(kappas), source=str(path))

    @classmethod
    def constant(cls, kappa0_db_per_km: float, f_lo: float = 1e9, f_hi: float = 1e13) -> "AbsorptionTable":
        return cls(np.array([f_lo, f_hi]), np.array([kappa0_db_per_km] * 2), source="constant")


def default_absorption_table() -> AbsorptionTable:
    """Bundled standard-atmosphere table, or the file named by $THZAF_ABSORPTION_TABLE."""
    override = os.environ.get(ABSORPTION_ENV)
    if override:
        return AbsorptionTable.from_csv(override)
    ref = resources.files("thzaf") / "data" / _DEFAULT_TABLE
    with resources.as_file(ref) as p:
        return AbsorptionTable.from_csv(p)


def kappa_of_f(table: AbsorptionTable, f) -> float:
    """Absorption coefficient per metre, kappa = ln(10) 1e-5 kappa0(f).

    kappa0 is linearly interpolated in frequency.

    Raises
    ------
    RangeError
        If ``f`` (Hz) is outside the tabulated range.
    """
    f = np.asarray(f, dtype=float)
    fr = table.frequency_hz
    if np.any((f < fr[0]) | (f > fr[-1])):
        raise RangeError(f"frequency outside absorption table range [{fr[0]:g}, {fr[-1]:g}] Hz")
    k0 = np.interp(f, fr, table.kappa0_db_per_km)
    out = math.log(10.0) * 1e-5 * k0
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LinkConfig:
    """Link geometry, propagation and reference-SNR settings.

    ``gamma_bar`` is the linear reference SNR P_t G_0 / sigma_w^2.
    """

    frequency: float
    d0: float
    delta: float
    R_M: float
    topology: str
    gamma_bar: float
    misalignment: MisalignmentParams
    fading: FadingParams

    def __post_init__(self):
        if not 2.0 <= self.delta <= 6.0:
            raise DomainError(f"path-loss exponent delta must lie in [2, 6], got {self.delta}")
        if not self.R_M > 0 or not self.d0 > 0:
            raise DomainError("R_M and d0 must be positive")
        if not self.gamma_bar > 0:
            raise DomainError("gamma_bar must be positive")
        if not self.frequency > 0:
            raise DomainError("frequency must be positive")
        if self.topology not in TOPOLOGIES:
            raise DomainError(f"topology must be one of {TOPOLOGIES}, got {self.topology!r}")
        if abs(self.fading.beta - self.misalignment.beta) > 0:
            raise DomainError("fading constants were derived for a different beta")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


def gamma0_of(config: LinkConfig, table: AbsorptionTable | None = None, kappa: float | None = None) -> float:
    """gamma0 = gamma_bar (lambda0 / (4 pi d0))^2 exp(kappa d0)."""
    if kappa is None:
        kappa = kappa_of_f(table if table is not None else default_absorption_table(), config.frequency)
    fspl = (config.wavelength / (4.0 * math.pi * config.d0)) ** 2
    return config.gamma_bar * fspl * math.exp(kappa * config.d0)
