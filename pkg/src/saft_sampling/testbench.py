"""Experiment engine: test signal, sampling, noise and error measurement.

The test signal is ``f = exp(-i a t^2 / (2b)) g`` with the unit-norm
bandlimited envelope

    g(t) = 2 / sqrt(5h) * (sinc(t/h) + 0.5 sinc((t - h)/h)),   1 < h <= 2,

so ``f`` lies in the SAFT band with delta = pi/h < pi.  SAFT parameters
are the rotation ``(cos a, sin a, -sin a, cos a, 0, 0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (INAPPLICABLE, closed_form_bound, instability_bounds,
                     oversampling_check)
from .saft_core import ComplexSignal, SaftParams, rotation_params
from .sampling import (RegularizedPlan, SampleSet, adversarial_samples, grid,
                       perturbation_gap_at_half, reconstruct_on_grid, shannon_truncated, sinc)
from .windows import WINDOW_NAMES, make_window

CLASSICAL = "classical"
DEFAULT_M_LIST = (14, 17, 20, 26, 29)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # keep pytest from collecting this class

    h: float
    alpha: float
    params: SaftParams
    signal: ComplexSignal = field(repr=False)

    @property
    def delta(self) -> float:
        return math.pi / self.h

    def envelope(self, t):
        return two_sinc_envelope(self.h, np.asarray(t, dtype=float))

    def __call__(self, t):
        return self.signal(t)


def two_sinc_envelope(h: float, t):
    return 2.0 / math.sqrt(5.0 * h) * (sinc(t / h) + 0.5 * sinc((t - h) / h))


def make_test_function(h: float = 1.5, alpha: float = math.pi / 4) -> TestFunction:
    if not (1.0 < h <= 2.0):
        raise ConfigError(f"h must lie in (1, 2], got {h!r}")
    params = rotation_params(alpha)
    c = params.a / (2.0 * params.b)
    signal = ComplexSignal(lambda t: np.exp(-1j * c * t * t) * two_sinc_envelope(h, t),
                           f"chirped two-sinc signal (h={h!r}, alpha={alpha!r})")
    return TestFunction(float(h), float(alpha), params, signal)


@dataclass(frozen=True)
class NoiseConfig:
    low: float
    high: float
    trials: int
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.low <= self.high) or not math.isfinite(self.high):
            raise ConfigError("noise magnitudes need 0 <= low <= high")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 50
    m_list: tuple[int, ...] = DEFAULT_M_LIST
    windows: tuple[str, ...] = WINDOW_NAMES
    include_classical: bool = True
    grid_count: int = 100_000
    noise: NoiseConfig | None = None

    def __post_init__(self):
        object.__setattr__(self, "m_list", tuple(int(m) for m in self.m_list))
        object.__setattr__(self, "windows", tuple(self.windows))
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N must be a positive integer")
        if not self.m_list:
            raise ConfigError("m_list must be nonempty")
        if any(b <= a for a, b in zip(self.m_list, self.m_list[1:])):
            raise ConfigError("m_list must be strictly ascending")
        if self.m_list[0] < 2:
            raise ConfigError("window sizes must be >= 2")
        bad = [w for w in self.windows if w not in WINDOW_NAMES]
        if bad:
            raise ConfigError(f"unknown window kinds {bad}; choose from {list(WINDOW_NAMES)}")
        if int(self.grid_count) != self.grid_count or self.grid_count < 2:
            raise ConfigError("grid_count must be an integer >= 2")

    @property
    def interval(self) -> tuple[float, float]:
        return (-float(self.N), float(self.N))

    def to_dict(self) -> dict:
        out = {"N": self.N, "m_list": list(self.m_list), "windows": list(self.windows),
               "include_classical": self.include_classical, "grid_count": self.grid_count,
               "noise": None}
        if self.noise is not None:
            n = self.noise
            out["noise"] = {"low": n.low, "high": n.high, "trials": n.trials, "seed": n.seed}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        noise = data.get("noise")
        return cls(N=data["N"], m_list=tuple(data["m_list"]), windows=tuple(data["windows"]),
                   include_classical=data["include_classical"], grid_count=data["grid_count"],
                   noise=NoiseConfig(**noise) if noise else None)


@dataclass(frozen=True)
class CellResult:
    kind: str
    m: int
    max_error: float
    oversampling_ok: bool | None
    bound: float | None = None
    trial_errors: tuple[float, ...] = ()

    @property
    def trials(self) -> int:
        return len(self.trial_errors)

    @property
    def mean_max_error(self) -> float:
        if not self.trial_errors:
            return self.max_error
        return math.fsum(self.trial_errors) / len(self.trial_errors)


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    cells: tuple[CellResult, ...]

    def cell(self, kind: str, m: int) -> CellResult:
        for c in self.cells:
            if c.kind == kind and c.m == m:
                return c
        raise KeyError((kind, m))

    def series(self, kind: str) -> list[float]:
        return [self.cell(kind, m).mean_max_error for m in self.config.m_list]


def take_samples(tf: TestFunction, N: int, m: int) -> SampleSet:
    """Samples f(n) for n = 1-N-m, ..., N+m-1 (2N + 2m - 1 values)."""
    first = 1 - N - m
    n = np.arange(first, N + m, dtype=float)
    return SampleSet(first, tf(n))


def add_noise(samples: SampleSet, low: float, high: float, seed: int) -> SampleSet:
    """Add errors whose real and imaginary parts are independent uniform draws on [low, high]."""
    if not (0.0 <= low <= high):
        raise ConfigError("noise magnitudes need 0 <= low <= high")
    rng = np.random.default_rng(seed)
    size = len(samples)
    eps = rng.uniform(low, high, size) + 1j * rng.uniform(low, high, size)
    return samples.with_values(samples.values + eps, noise_bound=math.sqrt(2.0) * high)


def max_error_on_grid(tf: TestFunction, reconstruction, interval, grid_count: int) -> float:
    reconstruction = np.asarray(reconstruction)
    if reconstruction.shape != (grid_count,):
        raise ValueError(f"reconstruction has shape {reconstruction.shape}, expected ({grid_count},)")
    t = grid(interval, grid_count)
    return float(np.max(np.abs(tf(t) - reconstruction)))


def _window_cell_meta(kind, m, delta):
    spec = make_window(kind, m, delta)
    ok, _ = oversampling_check(spec, delta)
    bound = closed_form_bound(spec, delta)
    return spec, ok, (None if bound is INAPPLICABLE else float(bound))


def run_error_decay(cfg: ExperimentConfig, tf: TestFunction) -> ExperimentResult:
    """Max grid error per (window, m); the classical series uses the same samples as each m."""
    cells = []
    for m in cfg.m_list:
        samples = take_samples(tf, cfg.N, m)
        if cfg.include_classical:
            rec = reconstruct_on_grid(tf.params, samples, None, cfg.interval, cfg.grid_count)
            cells.append(CellResult(CLASSICAL, m, max_error_on_grid(tf, rec, cfg.interval, cfg.grid_count),
                                    None))
        for kind in cfg.windows:
            spec, ok, bound = _window_cell_meta(kind, m, tf.delta)
            rec = reconstruct_on_grid(tf.params, samples, spec, cfg.interval, cfg.grid_count)
            cells.append(CellResult(kind, m, max_error_on_grid(tf, rec, cfg.interval, cfg.grid_count),
                                    ok, bound))
    return ExperimentResult(cfg, tuple(cells))


def run_noise_experiment(cfg: ExperimentConfig, tf: TestFunction) -> ExperimentResult:
    """Mean over trials of the max grid error from noisy samples; trial k uses seed + k."""
    if cfg.noise is None:
        raise ConfigError("noise experiment needs a noise configuration")
    noise = cfg.noise
    t = grid(cfg.interval, cfg.grid_count)
    truth = tf(t)
    cells = []
    for m in cfg.m_list:
        clean = take_samples(tf, cfg.N, m)
        noisy = [add_noise(clean, noise.low, noise.high, noise.seed + k) for k in range(noise.trials)]
        if cfg.include_classical:
            errs = tuple(float(np.max(np.abs(truth - shannon_truncated(tf.params, s, t)))) for s in noisy)
            cells.append(CellResult(CLASSICAL, m, max(errs), None, None, errs))
        for kind in cfg.windows:
            spec, ok, bound = _window_cell_meta(kind, m, tf.delta)
            plan = RegularizedPlan(tf.params, spec, t, clean.first_index, clean.last_index)
            errs = tuple(float(np.max(np.abs(truth - plan.apply(s)))) for s in noisy)
            cells.append(CellResult(kind, m, max(errs), ok, bound, errs))
    return ExperimentResult(cfg, tuple(cells))


@dataclass(frozen=True)
class InstabilityRow:
    N: int
    eps: float
    measured: float
    at_half: float
    closed_form_at_half: float
    lower_bound: float
    upper_bound: float


def run_instability(tf: TestFunction, N_list, eps: float, points_per_unit: int = 8) -> list[InstabilityRow]:
    """Sup-norm effect of the worst-case bounded sample errors on the sampling series.

    The perturbed full series differs from f by the series of the errors
    alone, which is evaluated on [-N-1, N+1] (including t = 1/2).
    """
    if not eps > 0:
        raise ConfigError("eps must be positive")
    rows = []
    for N in N_list:
        N = int(N)
        first = -N
        exact = SampleSet(first, tf(np.arange(-N, N + 1, dtype=float)))
        perturbed = adversarial_samples(tf.params, exact, N, eps)
        diff = SampleSet(first, perturbed.values - exact.values)
        t = np.union1d(np.linspace(-N - 1, N + 1, points_per_unit * (2 * N + 2) + 1), [0.5])
        series = shannon_truncated(tf.params, diff, t)
        half = float(abs(series[np.searchsorted(t, 0.5)]))
        lower, upper = instability_bounds(N)
        rows.append(InstabilityRow(N, eps, float(np.max(np.abs(series))), half,
                                   perturbation_gap_at_half(N, eps), eps * lower, eps * upper))
    return rows
