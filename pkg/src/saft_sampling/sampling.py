"""Shannon sampling series and regularized reconstruction for SAFT-bandlimited signals.

With ``c = a / (2b)`` the sampling series reads

    f(t) = sum_n f(n) exp(-i c (t^2 - n^2)) sinc(t - n)

and the regularized formula multiplies each term by ``phi(t - n)`` for a
window supported on [-m, m], so only samples with ``|n - t| < m`` enter.
Both are evaluated as ``exp(-i c t^2) * sum_n u_n sinc(t - n) [phi(t - n)]``
with demodulated samples ``u_n = f(n) exp(i c n^2)``, summing in ascending
``n`` with compensation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import KahanAccumulator
from .saft_core import SaftParams
from .windows import WindowSpec, window_value

GRID_CHUNK = 8192


class CoverageError(ValueError):
    """Samples do not cover the indices a reconstruction needs."""

    def __init__(self, missing: tuple[int, int], available: tuple[int, int]):
        self.missing = missing
        self.available = available
        super().__init__(
            f"samples cover n in [{available[0]}, {available[1]}] but "
            f"n in [{missing[0]}, {missing[1]}] is required and missing")


@dataclass(frozen=True)
class SampleSet:
    """Values f(first_index + k) for k = 0..len-1, optionally marked as noisy."""

    first_index: int
    values: np.ndarray = field(repr=False)
    noise_bound: float | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("a sample set needs a nonempty 1-D value sequence")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sample values must be finite")
        if self.noise_bound is not None and not (self.noise_bound >= 0):
            raise ValueError("noise_bound must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "first_index", int(self.first_index))

    @property
    def last_index(self) -> int:
        return self.first_index + self.values.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.first_index, self.last_index + 1)

    def __len__(self) -> int:
        return self.values.size

    def value(self, n: int) -> complex:
        self.require(n, n)
        return complex(self.values[n - self.first_index])

    def require(self, lo: int, hi: int) -> None:
        """Raise CoverageError unless every index in [lo, hi] is present."""
        if lo < self.first_index or hi > self.last_index:
            miss_lo = lo if lo < self.first_index else self.last_index + 1
            miss_hi = hi if hi > self.last_index else self.first_index - 1
            if lo < self.first_index and hi > self.last_index:
                miss_lo, miss_hi = lo, hi
            raise CoverageError((miss_lo, miss_hi), (self.first_index, self.last_index))

    def with_values(self, values, noise_bound=None) -> "SampleSet":
        return SampleSet(self.first_index, values, noise_bound)


def sinc(t):
    """sin(pi t) / (pi t) with sinc(0) = 1 and exact zeros at nonzero integers."""
    t = np.asarray(t, dtype=float)
    k = np.round(t)
    r = t - k
    sign = np.where(np.mod(k, 2.0) == 0.0, 1.0, -1.0)
    tiny = np.abs(t) < 1e-8
    ts = np.where(tiny, 1.0, t)
    out = np.where(tiny, 1.0 - (math.pi * t) ** 2 / 6.0, sign * np.sin(math.pi * r) / (math.pi * ts))
    return out[()] if out.ndim == 0 else out


def _chirp_rate(params: SaftParams) -> float:
    return params.a / (2.0 * params.b)


def _demodulated(params: SaftParams, samples: SampleSet) -> np.ndarray:
    n = samples.indices.astype(float)
    return samples.values * np.exp(1j * _chirp_rate(params) * n * n)


def _check_points(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError("evaluation points must be finite")
    return t


def shannon_truncated(params: SaftParams, samples: SampleSet, t, N: int | None = None):
    """Truncated sampling series over |n| <= N, or over every available sample when N is None."""
    t = _check_points(t)
    if N is not None:
        samples.require(-N, N)
        lo, hi = -N, N
    else:
        lo, hi = samples.first_index, samples.last_index
    u = _demodulated(params, samples)[lo - samples.first_index:hi - samples.first_index + 1]
    flat = t.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, GRID_CHUNK):
        tc = flat[start:start + GRID_CHUNK]
        acc = KahanAccumulator(tc.shape)
        for k, n in enumerate(range(lo, hi + 1)):
            acc.add(u[k] * sinc(tc - n))
        out[start:start + GRID_CHUNK] = np.exp(-1j * _chirp_rate(params) * tc * tc) * acc.total
    out = out.reshape(t.shape)
    return out[()] if out.ndim == 0 else out


def window_index_range(t_lo: float, t_hi: float, m: int) -> tuple[int, int]:
    """Smallest and largest n with |n - t| < m for some t in [t_lo, t_hi].

    The test is done in floating point, exactly as the reconstruction masks terms.
    """
    lo = math.floor(t_lo) - m + 1
    if not abs(t_lo - lo) < m:
        lo += 1
    hi = math.floor(t_hi) + m
    if not abs(t_hi - hi) < m:
        hi -= 1
    return int(lo), int(hi)


class RegularizedPlan:
    """Precomputed window and sinc factors of the regularized formula at fixed points.

    Row ``i`` holds the 2m candidate indices ``floor(t_i) - m + 1 + j``;
    candidates with ``|n - t_i| >= m`` are masked out.  Applying the plan to
    many sample vectors (noise trials) avoids re-evaluating windows, and the
    scalar and grid entry points share it so their results agree bit for bit.
    """

    def __init__(self, params: SaftParams, window: WindowSpec, t, first_index: int, last_index: int):
        t = _check_points(t).ravel()
        m = window.m
        need_lo, need_hi = window_index_range(float(t.min()), float(t.max()), m)
        SampleSet(first_index, np.zeros(last_index - first_index + 1)).require(need_lo, need_hi)
        n = (np.floor(t).astype(np.int64) - m + 1)[:, None] + np.arange(2 * m)[None, :]
        diff = t[:, None] - n
        self.params = params
        self.t = t
        self.first_index = int(first_index)
        self.last_index = int(last_index)
        self.inside = np.abs(diff) < m
        self.sinc = sinc(diff)
        self.window = window_value(window, diff)
        self.index = np.clip(n, first_index, last_index) - first_index
        self.chirp = np.exp(-1j * _chirp_rate(params) * t * t)

    def apply(self, samples: SampleSet) -> np.ndarray:
        if (samples.first_index, samples.last_index) != (self.first_index, self.last_index):
            raise ValueError("sample index range differs from the one the plan was built for")
        u = _demodulated(self.params, samples)
        acc = KahanAccumulator(self.t.shape)
        for j in range(self.index.shape[1]):
            term = u[self.index[:, j]] * self.sinc[:, j] * self.window[:, j]
            acc.add(np.where(self.inside[:, j], term, 0.0))
        return self.chirp * acc.total


def _regularized_points(params, samples, window, t):
    t = _check_points(t)
    flat = t.ravel()
    lo, hi = window_index_range(float(flat.min()), float(flat.max()), window.m)
    samples.require(lo, hi)
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, GRID_CHUNK):
        plan = RegularizedPlan(params, window, flat[start:start + GRID_CHUNK],
                               samples.first_index, samples.last_index)
        out[start:start + GRID_CHUNK] = plan.apply(samples)
    out = out.reshape(t.shape)
    return out[()] if out.ndim == 0 else out


def regularized_reconstruct(params: SaftParams, samples: SampleSet, window: WindowSpec, t):
    """Regularized sampling formula at ``t`` using samples with |n - t| < m."""
    return _regularized_points(params, samples, window, t)


def grid(interval, grid_count: int) -> np.ndarray:
    """Equispaced points including both endpoints."""
    lo, hi = map(float, interval)
    if int(grid_count) != grid_count or grid_count < 2:
        raise ValueError("grid_count must be an integer >= 2")
    if not hi > lo:
        raise ValueError("interval must satisfy lo < hi")
    return np.linspace(lo, hi, int(grid_count))


def reconstruct_on_grid(params: SaftParams, samples: SampleSet, window: WindowSpec | None,
                        interval, grid_count: int) -> np.ndarray:
    """Reconstruct on an equispaced grid; ``window=None`` gives the classical series."""
    t = grid(interval, grid_count)
    if window is None:
        return shannon_truncated(params, samples, t)
    return _regularized_points(params, samples, window, t)


def adversarial_perturbation(params: SaftParams, N: int, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Indices -N..N and the unimodular-phase errors that maximise the series error at t = 1/2."""
    n = np.arange(-N, N + 1)
    nf = n.astype(float)
    sign = np.where(n % 2 == 0, -1.0, 1.0) * np.sign(2 * nf - 1)
    phase = np.exp(-1j * (params.a / (8.0 * params.b)) * (4 * nf * nf - 1))
    return n, eps * sign * phase


def adversarial_samples(params: SaftParams, f_samples: SampleSet, N: int, eps: float) -> SampleSet:
    """Add the worst-case sign pattern of size ``eps`` to samples with |n| <= N."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    if not eps > 0:
        raise ValueError("eps must be positive")
    f_samples.require(-N, N)
    n, err = adversarial_perturbation(params, int(N), eps)
    values = f_samples.values.copy()
    values[n - f_samples.first_index] += err
    return f_samples.with_values(values, noise_bound=eps)


def perturbation_gap_at_half(N: int, eps: float) -> float:
    """Closed form of |S_N(perturbation)(1/2)| for the adversarial errors."""
    odd = sum(1.0 / (2 * k - 1) for k in range(1, N + 1))
    return 2 * eps / ((2 * N + 1) * math.pi) + 4 * eps / math.pi * odd
