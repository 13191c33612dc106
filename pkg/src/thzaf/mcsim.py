"""Monte Carlo replica of the link model, used to validate the closed forms.

Each sample draws a distance from the RWP density, a pointing-error power
and an alpha-F fading power, and composes

    Gamma = gamma0 (d-1)^{-delta} exp(-kappa d0 d) Z X.

Randomness comes from Philox (counter-based) substreams keyed by
(seed, worker index), so a batch is bit-reproducible for a fixed
(seed, workers, samples) triple.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import erfc

from .channel import FadingParams
from .errors import DomainError, EmptyBatch
from .metrics import BPSK, ModulationCoeffs
from .mobility import TopologyParams, rwp_unit_cdf

__all__ = [
    "SimConfig",
    "SampleBatch",
    "McMetrics",
    "substream",
    "sample_pointing",
    "sample_fading",
    "sample_distance",
    "simulate",
    "estimate_metrics",
    "estimate_with_stderr",
]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    samples: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) < 1:
            raise DomainError("samples must be at least 1")
        if int(self.workers) < 1:
            raise DomainError("workers must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError("seed must fit in 64 bits")


@dataclass(frozen=True)
class SampleBatch:
    snr: np.ndarray

    def __len__(self) -> int:
        return int(self.snr.size)


def substream(seed: int, worker: int) -> np.random.Generator:
    """Independent Philox generator for one worker."""
    key = np.array([int(seed) % 2**64, int(worker)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    # (0, 1]
    return 1.0 - rng.random(size)


def sample_pointing(beta: float, rng: np.random.Generator, size=None):
    """Pointing-error power Z = (U1 U2)^{2/beta}."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    u1 = _open_uniform(rng, size)
    u2 = _open_uniform(rng, size)
    return (u1 * u2) ** (2.0 / beta)


def sample_fading(fading: FadingParams, rng: np.random.Generator, size=None):
    """alpha-F fading power X = (c2 G_mu / G_m)^{2/alpha} with unit-rate gamma variates."""
    g_mu = rng.standard_gamma(fading.mu, size)
    g_m = rng.standard_gamma(fading.m, size)
    return (fading.c2 * g_mu / g_m) ** (2.0 / fading.alpha)


def sample_distance(topo: TopologyParams, d0: float, R_M: float, rng: np.random.Generator, size=None, tol: float = 1e-12):
    """Normalized distance d in (1, 1 + R_M/d0) by bisection on the polynomial CDF."""
    target = rng.random(size)
    lo = np.zeros_like(target, dtype=float)
    hi = np.ones_like(target, dtype=float)
    for _ in range(int(math.ceil(math.log2(1.0 / tol))) + 1):
        mid = 0.5 * (lo + hi)
        below = rwp_unit_cdf(mid, topo) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    u = 0.5 * (lo + hi)
    return 1.0 + u * (R_M / d0)


def _worker_samples(model, seed: int, worker: int, count: int) -> np.ndarray:
    rng = substream(seed, worker)
    cfg = model.config
    out = np.empty(count)
    for start in range(0, count, _CHUNK):
        k = min(_CHUNK, count - start)
        d = sample_distance(model.topo, cfg.d0, cfg.R_M, rng, k)
        z = sample_pointing(model.fading.beta, rng, k)
        x = sample_fading(model.fading, rng, k)
        out[start:start + k] = (
            model.gamma0 * (d - 1.0) ** (-cfg.delta) * np.exp(-model.kappa * cfg.d0 * d) * z * x
        )
    return out


def simulate(model, sim: SimConfig) -> SampleBatch:
    """Draw ``sim.samples`` SNR realizations, split evenly over ``sim.workers`` substreams."""
    n, w = int(sim.samples), int(sim.workers)
    counts = [n // w + (1 if i < n % w else 0) for i in range(w)]
    if w == 1:
        parts = [_worker_samples(model, sim.seed, 0, counts[0])]
    else:
        with ThreadPoolExecutor(max_workers=w) as ex:
            parts = list(ex.map(lambda i: _worker_samples(model, sim.seed, i, counts[i]), range(w)))
    return SampleBatch(np.concatenate(parts))


class McMetrics(NamedTuple):
    op: float
    asep: float
    capacity: float


def _per_sample(batch: SampleBatch, gamma_th: float, coeffs: ModulationCoeffs):
    g = np.asarray(batch.snr, dtype=float)
    if g.size == 0:
        raise EmptyBatch("cannot estimate metrics from an empty batch")
    op = (g < gamma_th).astype(float)
    sep = 0.5 * coeffs.a * erfc(np.sqrt(coeffs.b * g / 2.0))
    cap = np.log1p(g) / math.log(2.0)
    return op, sep, cap


def estimate_metrics(batch: SampleBatch, gamma_th: float, coeffs: ModulationCoeffs = BPSK) -> McMetrics:
    """Sample means of the outage indicator, conditional SEP and log2(1 + gamma)."""
    op, sep, cap = _per_sample(batch, gamma_th, coeffs)
    return McMetrics(float(op.mean()), float(sep.mean()), float(cap.mean()))


def estimate_with_stderr(batch: SampleBatch, gamma_th: float, coeffs: ModulationCoeffs = BPSK) -> dict[str, tuple[float, float]]:
    """Like :func:`estimate_metrics` but returns ``{name: (mean, standard error)}``."""
    out = {}
    for name, v in zip(McMetrics._fields, _per_sample(batch, gamma_th, coeffs)):
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else float("nan")
        out[name] = (float(v.mean()), se)
    return out
