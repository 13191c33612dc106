"""Gamma-family special functions evaluated in the log domain.

Every gamma product in the Mellin-Barnes integrands is formed as a sum of
``log_gamma_complex`` terms and exponentiated once, so these routines are
vectorized over numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, PoleError

__all__ = ["log_gamma_complex", "digamma", "beta_fn", "log_beta", "POLE_TOL"]

POLE_TOL = 1e-12

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)
_LOG_2 = np.log(2.0)

# B_{2k} / (2k (2k-1)), k = 1..8
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
])
# B_{2k} / (2k), k = 1..8
_DIGAMMA_ASYM = np.array([
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
])

_STIRLING_MIN = 10.0
_SHIFT = 10


def _stirling(w: np.ndarray) -> np.ndarray:
    # valid for |w| >= 10 with |arg w| <= pi/2
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    return (w - 0.5) * np.log(w) - w + _HALF_LOG_2PI + series * inv


def _right_half(w: np.ndarray) -> np.ndarray:
    """ln Gamma for Re w >= 0.5, Im w >= 0."""
    out = np.empty_like(w)
    big = np.abs(w) >= _STIRLING_MIN
    out[big] = _stirling(w[big])
    small = ~big
    if np.any(small):
        ws = w[small]
        acc = _stirling(ws + _SHIFT)
        for k in range(_SHIFT):
            acc -= np.log(ws + k)
        out[small] = acc
    return out


def _log_sin_pi(w: np.ndarray) -> np.ndarray:
    # branch of log(sin(pi w)) continuous on Im w >= 0
    return -1j * np.pi * w + 0.5j * np.pi - _LOG_2 + np.log1p(-np.exp(2j * np.pi * w))


def _upper_half(w: np.ndarray) -> np.ndarray:
    out = np.empty_like(w)
    refl = w.real < 0.5
    if np.any(~refl):
        out[~refl] = _right_half(w[~refl])
    if np.any(refl):
        wr = w[refl]
        # 1 - w lies in the closed lower half plane; use conjugate symmetry
        lg_reflected = np.conj(_right_half(np.conj(1.0 - wr)))
        out[refl] = _LOG_PI - _log_sin_pi(wr) - lg_reflected
    return out


def log_gamma_complex(z):
    """Principal branch of ln Gamma(z) for complex (array) input.

    The branch is the analytic continuation from the positive real axis,
    continuous in the upper and lower half planes; on the negative real
    axis the limit from above is returned.

    Parameters
    ----------
    z : complex or array_like of complex

    Returns
    -------
    complex or numpy.ndarray of complex

    Raises
    ------
    PoleError
        If any element lies within ``POLE_TOL`` of a non-positive integer.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if not np.all(np.isfinite(z)):
        raise DomainError("log_gamma_complex requires finite arguments")
    nearest = np.round(z.real)
    at_pole = (nearest <= 0) & (np.abs(z - nearest) < POLE_TOL)
    if np.any(at_pole):
        raise PoleError(f"Gamma pole at z={z[at_pole][0]}")

    lower = z.imag < 0
    w = np.where(lower, np.conj(z), z)
    out = _upper_half(w)
    out = np.where(lower, np.conj(out), out)
    return out[0] if scalar else out


def digamma(x):
    """Digamma function psi(x) for real x > 0.

    Upward recurrence to x >= 10 followed by the asymptotic series.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(~(x > 0)):
        raise DomainError("digamma requires x > 0")
    acc = np.zeros_like(x)
    w = x.copy()
    for _ in range(10):
        low = w < 10.0
        if not np.any(low):
            break
        acc[low] -= 1.0 / w[low]
        w[low] += 1.0
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    for c in _DIGAMMA_ASYM[::-1]:
        series = series * inv2 + c
    out = acc + np.log(w) - 0.5 / w - series * inv2
    return float(out[0]) if scalar else out


def log_beta(a, b):
    """ln B(a, b) for real a, b > 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise DomainError("beta function requires positive arguments")
    lg = lambda v: log_gamma_complex(v).real  # noqa: E731
    out = lg(a) + lg(b) - lg(a + b)
    return float(out) if np.ndim(out) == 0 else out


def beta_fn(a, b):
    """Euler Beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b)."""
    out = np.exp(log_beta(a, b))
    return float(out) if np.ndim(out) == 0 else out
