"""Numerical Fox H-function via Mellin-Barnes contour integration.

Convention::

    H^{m,n}_{p,q}[z] = 1/(2 pi i) * Integral_L Theta(s) z^{-s} ds

    Theta(s) = prod_{j<m} Gamma(b_j + B_j s) * prod_{j<n} Gamma(1 - a_j - A_j s)
               / ( prod_{j>=m} Gamma(1 - b_j - B_j s) * prod_{j>=n} Gamma(a_j + A_j s) )

with L the vertical line Re s = c separating the poles of the first product
(to the left) from the poles of the second (to the right).  For real
coefficients Theta(conj s) = conj Theta(s), so

    H(z) = (1/pi) * Integral_0^inf Re[ Theta(c + i t) z^{-(c + i t)} ] dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, InvalidSpec, PoleOnContour
from .specfun import log_gamma_complex

__all__ = [
    "FoxHSpec",
    "ContourConfig",
    "make_spec",
    "evaluate",
    "evaluate_many",
    "log_theta",
]

_POLE_CLEARANCE = 1e-12
_BATCH = 64
# radians of integrand phase allowed per 16-point panel
_PHASE_PER_PANEL = 16.0


@dataclass(frozen=True)
class FoxHSpec:
    """Orders and coefficient pairs of one H^{m,n}_{p,q} instance.

    Build through :func:`make_spec`, which validates the shape and computes
    the admissible abscissa interval ``(strip_lo, strip_hi)``.
    """

    m: int
    n: int
    p: int
    q: int
    upper: tuple[tuple[float, float], ...]
    lower: tuple[tuple[float, float], ...]
    strip_lo: float = field(default=-math.inf)
    strip_hi: float = field(default=math.inf)

    @property
    def a(self) -> np.ndarray:
        return np.array([u[0] for u in self.upper], dtype=float)

    @property
    def A(self) -> np.ndarray:
        return np.array([u[1] for u in self.upper], dtype=float)

    @property
    def b(self) -> np.ndarray:
        return np.array([v[0] for v in self.lower], dtype=float)

    @property
    def B(self) -> np.ndarray:
        return np.array([v[1] for v in self.lower], dtype=float)

    @property
    def decay_rate(self) -> float:
        """a* = sum_{j<n} A_j - sum_{j>=n} A_j + sum_{j<m} B_j - sum_{j>=m} B_j."""
        A, B = self.A, self.B
        return float(A[: self.n].sum() - A[self.n:].sum() + B[: self.m].sum() - B[self.m:].sum())

    @property
    def coefficient_mass(self) -> float:
        return float(self.A.sum() + self.B.sum())


@dataclass(frozen=True)
class ContourConfig:
    """Contour placement and truncation settings.

    ``abscissa=None`` places the line automatically at the minimum of
    ``|Theta(c) z^{-c}|`` on the real axis inside the strip, which bounds
    the cancellation along the line.  ``placement="midpoint"`` selects the
    strip midpoint instead.  ``half_height=None`` derives the first
    truncation height from the exponential decay rate of the integrand.
    """

    abscissa: float | None = None
    half_height: float | None = None
    tail_tol: float = 1e-13
    max_height: float = 500.0
    panel_points: int = 16
    placement: str = "saddle"

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")
        if self.panel_points < 2:
            raise DomainError("panel_points must be at least 2")
        if self.placement not in ("saddle", "midpoint"):
            raise DomainError(f"unknown placement {self.placement!r}")


DEFAULT_CONTOUR = ContourConfig()


def make_spec(
    orders: Sequence[int],
    upper: Sequence[tuple[float, float]],
    lower: Sequence[tuple[float, float]],
) -> FoxHSpec:
    """Validate a Fox H specification and compute its pole-separating strip.

    Parameters
    ----------
    orders : (m, n, p, q)
    upper : p pairs (a_j, A_j)
    lower : q pairs (b_j, B_j)

    Raises
    ------
    InvalidSpec
        On shape mismatch, non-positive scale coefficients, or when the
        left and right pole families cannot be separated by a vertical line.
    """
    try:
        m, n, p, q = (int(v) for v in orders)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec("orders must be four integers (m, n, p, q)") from exc
    upper = tuple((float(a), float(A)) for a, A in upper)
    lower = tuple((float(b), float(B)) for b, B in lower)
    if min(m, n, p, q) < 0:
        raise InvalidSpec("orders must be non-negative")
    if len(upper) != p or len(lower) != q:
        raise InvalidSpec(f"expected {p} upper and {q} lower pairs, got {len(upper)} and {len(lower)}")
    if n > p or m > q:
        raise InvalidSpec(f"require n <= p and m <= q, got m={m}, n={n}, p={p}, q={q}")
    if any(A <= 0 for _, A in upper) or any(B <= 0 for _, B in lower):
        raise InvalidSpec("all scale coefficients A_j, B_j must be positive")
    if not all(math.isfinite(x) for pair in upper + lower for x in pair):
        raise InvalidSpec("coefficients must be finite")

    lo = max((-b / B for b, B in lower[:m]), default=-math.inf)
    hi = min(((1.0 - a) / A for a, A in upper[:n]), default=math.inf)
    if not lo < hi:
        raise InvalidSpec(f"no separating strip: left poles reach {lo}, right poles start at {hi}")
    return FoxHSpec(m, n, p, q, upper, lower, lo, hi)


def log_theta(spec: FoxHSpec, s) -> np.ndarray:
    """Logarithm of the Mellin-Barnes kernel Theta(s), summed in the log domain."""
    s = np.asarray(s, dtype=complex)
    out = np.zeros_like(s)
    for j, (b, B) in enumerate(spec.lower):
        if j < spec.m:
            out += log_gamma_complex(b + B * s)
        else:
            out -= log_gamma_complex(1.0 - b - B * s)
    for j, (a, A) in enumerate(spec.upper):
        if j < spec.n:
            out += log_gamma_complex(1.0 - a - A * s)
        else:
            out -= log_gamma_complex(a + A * s)
    return out


def _on_pole(spec: FoxHSpec, c: float) -> bool:
    for b, B in spec.lower[: spec.m]:
        k = -(b + B * c)
        if k > -_POLE_CLEARANCE and abs(k - round(k)) < _POLE_CLEARANCE:
            return True
    for a, A in spec.upper[: spec.n]:
        k = -(1.0 - a - A * c)
        if k > -_POLE_CLEARANCE and abs(k - round(k)) < _POLE_CLEARANCE:
            return True
    return False


def _candidate_abscissae(spec: FoxHSpec) -> np.ndarray:
    lo, hi = spec.strip_lo, spec.strip_hi
    rel = np.geomspace(1e-5, 0.5, 120)
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        grid = np.concatenate([lo + w * rel, hi - w * rel[::-1]])
    elif math.isfinite(lo):
        grid = lo + np.geomspace(1e-5, 400.0, 240)
    elif math.isfinite(hi):
        grid = hi - np.geomspace(1e-5, 400.0, 240)[::-1]
    else:
        grid = np.linspace(-200.0, 200.0, 801)
    grid = np.unique(grid)
    # denominator gammas put zeros of Theta inside the strip; keep the grid off them
    keep = np.ones(grid.shape, dtype=bool)
    for b, B in spec.lower[spec.m:]:
        arg = 1.0 - b - B * grid
        keep &= ~((arg < 0.5) & (np.abs(arg - np.round(arg)) < 1e-9))
    for a, A in spec.upper[spec.n:]:
        arg = a + A * grid
        keep &= ~((arg < 0.5) & (np.abs(arg - np.round(arg)) < 1e-9))
    return grid[keep]


def _midpoint(spec: FoxHSpec) -> float:
    lo, hi = spec.strip_lo, spec.strip_hi
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0
    return 0.0


def _abscissae(spec: FoxHSpec, logz: np.ndarray, cfg: ContourConfig) -> np.ndarray:
    if cfg.abscissa is not None:
        c = float(cfg.abscissa)
        if _on_pole(spec, c):
            raise PoleOnContour(f"abscissa {c} coincides with a pole")
        if not spec.strip_lo < c < spec.strip_hi:
            raise DomainError(f"abscissa {c} outside strip ({spec.strip_lo}, {spec.strip_hi})")
        return np.full(logz.shape, c)
    if cfg.placement == "midpoint":
        return np.full(logz.shape, _midpoint(spec))
    grid = _candidate_abscissae(spec)
    ridge = log_theta(spec, grid).real
    # minimize Re log Theta(c) - c log z over the grid for every z at once
    obj = ridge[None, :] - grid[None, :] * logz[:, None]
    return grid[np.argmin(obj, axis=1)]


def _pole_distance(spec: FoxHSpec, c: np.ndarray) -> np.ndarray:
    d = np.full(c.shape, np.inf)
    if math.isfinite(spec.strip_lo):
        d = np.minimum(d, c - spec.strip_lo)
    if math.isfinite(spec.strip_hi):
        d = np.minimum(d, spec.strip_hi - c)
    return np.minimum(d, 1.0)


def _panels(t0: float, t1: float, h_first: float, h_max: float) -> np.ndarray:
    edges = [t0]
    h = h_first
    while edges[-1] < t1:
        edges.append(min(edges[-1] + h, t1))
        h = min(2.0 * h, h_max)
    return np.asarray(edges)


class _Integrator:
    """Composite Gauss-Legendre integration of the contour integrand for one z."""

    def __init__(self, spec, c, logz, cfg, gl_nodes, gl_weights):
        self.spec = spec
        self.c = c
        self.logz = logz
        self.x, self.w = gl_nodes, gl_weights
        delta = float(_pole_distance(spec, np.array([c]))[0])
        freq = abs(logz) + spec.coefficient_mass * (1.0 + math.log1p(spec.coefficient_mass))
        self.h_max = min(1.0, _PHASE_PER_PANEL / freq)
        self.h_first = min(0.25 * delta, self.h_max)

    def nodes(self, t0, t1, first):
        edges = _panels(t0, t1, self.h_first if first else self.h_max, self.h_max)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        t = (mid[:, None] + half[:, None] * self.x[None, :]).ravel()
        wt = (half[:, None] * self.w[None, :]).ravel()
        return t, wt


def _integrand(spec, c, logz, t, full=False):
    s = c + 1j * t
    val = np.exp(log_theta(spec, s) - s * logz)
    return val if full else val.real


def _initial_height(spec: FoxHSpec, cfg: ContourConfig) -> float:
    if cfg.half_height is not None:
        return float(cfg.half_height)
    rate = spec.decay_rate
    if rate <= 0:
        raise ConvergenceError(f"integrand does not decay along the contour (a* = {rate})")
    return max(4.0, 2.2 * math.log(1.0 / cfg.tail_tol) / (math.pi * rate))


def evaluate_many(spec: FoxHSpec, z, cfg: ContourConfig = DEFAULT_CONTOUR, full_line: bool = False) -> np.ndarray:
    """Evaluate H(z) for an array of positive real arguments.

    The truncation height starts at ``cfg.half_height`` (or a decay-rate
    estimate) and doubles until the absolute integrand mass beyond the
    previous height is below ``cfg.tail_tol`` times the result.

    Parameters
    ----------
    spec : FoxHSpec
    z : array_like of positive float
    cfg : ContourConfig
    full_line : bool
        Integrate over the whole line t in [-T, T] instead of using
        conjugate symmetry; kept for cross-checking.

    Raises
    ------
    ConvergenceError
        When the tail criterion is not met before ``cfg.max_height``.
    PoleOnContour
        When a user-supplied abscissa sits on a pole.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~(z > 0)) or not np.all(np.isfinite(z)):
        raise DomainError("Fox H argument must be positive and finite")
    if z.size > _BATCH:
        # bound the size of the node arrays built in one pass
        return np.concatenate([
            evaluate_many(spec, z[i:i + _BATCH], cfg, full_line) for i in range(0, z.size, _BATCH)
        ])
    logz = np.log(z)
    cs = _abscissae(spec, logz, cfg)
    x, w = np.polynomial.legendre.leggauss(cfg.panel_points)
    T0 = _initial_height(spec, cfg)

    integrators = [_Integrator(spec, float(c), float(lz), cfg, x, w) for c, lz in zip(cs, logz)]
    heights = np.full(z.shape, T0)
    totals = np.zeros(z.shape)
    tails = np.zeros(z.shape)

    # first pass over [0, T0], batched across all z
    _accumulate(spec, integrators, range(len(z)), np.zeros(z.shape), heights, True, full_line, totals, tails)
    pending = [i for i in range(len(z)) if not _tail_ok(tails[i], totals[i], cfg.tail_tol)]
    while pending:
        idx = np.array(pending)
        lo = heights[idx].copy()
        hi = 2.0 * lo
        if np.any(hi > cfg.max_height):
            bad = idx[hi > cfg.max_height][0]
            raise ConvergenceError(
                f"contour tail did not fall below {cfg.tail_tol:g} before height {cfg.max_height:g} (z={z[bad]:.6g})"
            )
        sub_lo = np.zeros(z.shape)
        sub_lo[idx] = lo
        heights[idx] = hi
        tails[idx] = 0.0
        _accumulate(spec, integrators, pending, sub_lo, heights, False, full_line, totals, tails)
        pending = [i for i in pending if not _tail_ok(tails[i], totals[i], cfg.tail_tol)]

    scale = 1.0 / (2.0 * math.pi) if full_line else 1.0 / math.pi
    return totals * scale


def _tail_ok(tail_abs: float, total: float, tol: float) -> bool:
    return tail_abs <= tol * max(abs(total), 1e-300)


def _accumulate(spec, integrators, which, t_lo, t_hi, first, full_line, totals, tails):
    ts, ws, owner, cs, lzs = [], [], [], [], []
    for i in which:
        it = integrators[i]
        t, wt = it.nodes(float(t_lo[i]), float(t_hi[i]), first)
        if full_line:
            t = np.concatenate([-t[::-1], t])
            wt = np.concatenate([wt[::-1], wt])
        ts.append(t)
        ws.append(wt)
        owner.append(np.full(t.size, i))
        cs.append(np.full(t.size, it.c))
        lzs.append(np.full(t.size, it.logz))
    t = np.concatenate(ts)
    wt = np.concatenate(ws)
    own = np.concatenate(owner)
    c = np.concatenate(cs)
    lz = np.concatenate(lzs)
    s = c + 1j * t
    vals = np.exp(log_theta(spec, s) - s * lz)
    g = vals.real
    contrib = np.bincount(own, weights=wt * g, minlength=totals.size)
    mag = np.abs(vals)
    # tail mass: the upper half of the newly integrated range
    half_mark = np.where(first, 0.5 * t_hi[own], t_lo[own])
    in_tail = np.abs(t) >= half_mark
    tail = np.bincount(own, weights=wt * mag * in_tail, minlength=totals.size)
    idx = np.asarray(list(which))
    totals[idx] += contrib[idx]
    tails[idx] += tail[idx]


def evaluate(spec: FoxHSpec, z: float, cfg: ContourConfig = DEFAULT_CONTOUR) -> float:
    """Evaluate H^{m,n}_{p,q}[z] for a single positive real z."""
    return float(evaluate_many(spec, [z], cfg)[0])
