"""Compactly supported window functions on [-m, m] and their Fourier transforms.

Three families are provided: the B-spline window, the sinh-type window and
the continuous Kaiser-Bessel (cKB) window.  Every window is even, supported
on [-m, m], nonincreasing on [0, m] and equal to 1 at the origin.

Fourier transforms use the unitary convention
``phi_hat(tau) = (2*pi)**-0.5 * integral phi(t) exp(-1j*tau*t) dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .special_functions import (bspline_center_value, cardinal_bspline, i0m1, i1,
                                j1)

WINDOW_NAMES = ("bspline", "sinh", "ckb")

# below this |w| the entire-function series are used instead of Bessel/trig forms
_SERIES_W = 4.0


class WindowKind(str, Enum):
    BSPLINE = "bspline"
    SINH = "sinh"
    CKB = "ckb"


class WindowError(ValueError):
    """Invalid window parameters."""


@dataclass(frozen=True)
class WindowSpec:
    """Window family with truncation parameter ``m`` and shape parameter.

    ``s`` applies to the B-spline window, ``beta`` to sinh and cKB.
    """

    kind: WindowKind
    m: int
    s: int | None = None
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind(self.kind))
        if int(self.m) != self.m or self.m < 2:
            raise WindowError(f"m must be an integer >= 2, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.kind is WindowKind.BSPLINE:
            s = default_s(self.m) if self.s is None else self.s
            if int(s) != s or s < 2:
                raise WindowError(f"B-spline window needs integer s >= 2, got {s!r}")
            object.__setattr__(self, "s", int(s))
            object.__setattr__(self, "beta", None)
        else:
            if self.beta is None or not math.isfinite(self.beta) or self.beta <= 0:
                raise WindowError(f"{self.kind.value} window needs beta > 0, got {self.beta!r}")
            object.__setattr__(self, "beta", float(self.beta))
            object.__setattr__(self, "s", None)

    @property
    def name(self) -> str:
        return self.kind.value


def default_s(m: int) -> int:
    return (m + 2) // 2  # ceil((m + 1) / 2)


def default_beta(m: int, delta: float) -> float:
    return m * (math.pi - delta)


def make_window(kind, m: int, delta: float | None = None, *, s=None, beta=None) -> WindowSpec:
    """Build a window, deriving beta = m*(pi - delta) from the band when not given."""
    kind = WindowKind(kind)
    if kind is not WindowKind.BSPLINE and beta is None:
        if delta is None:
            raise WindowError(f"{kind.value} window needs either beta or delta")
        if not 0 < delta < math.pi:
            raise WindowError(f"delta must lie in (0, pi), got {delta!r}")
        beta = default_beta(m, delta)
    return WindowSpec(kind, m, s=s, beta=beta)


def window_value(spec: WindowSpec, t):
    """Evaluate the window at ``t`` (scalar or array)."""
    t = np.asarray(t, dtype=float)
    m = spec.m
    x = np.abs(t) / m
    inside = x < 1.0
    xc = np.where(inside, x, 0.0)
    if spec.kind is WindowKind.BSPLINE:
        order = 2 * spec.s
        # same arithmetic at t = 0 makes phi(0) exactly 1
        val = cardinal_bspline(order, spec.s * xc) / cardinal_bspline(order, 0.0)
    elif spec.kind is WindowKind.SINH:
        beta = spec.beta
        r = np.sqrt((1.0 - xc) * (1.0 + xc))
        # sinh(beta r)/sinh(beta) written with decaying exponentials only
        val = np.exp(beta * (r - 1.0)) * (-np.expm1(-2.0 * beta * r)) / (-math.expm1(-2.0 * beta))
    else:
        beta = spec.beta
        r = np.sqrt((1.0 - xc) * (1.0 + xc))
        val = i0m1(beta * r) / float(i0m1(beta))
    out = np.where(inside, val, 0.0)
    return out[()] if out.ndim == 0 else out


def _series(w, coeff):
    """Sum_k coeff(k) w^k for an entire function with rapidly decaying coefficients."""
    total = np.zeros_like(w)
    term = np.ones_like(w)
    k = 0
    while True:
        c = coeff(k)
        total = total + c * term
        if c * np.max(np.abs(term), initial=0.0) < 1e-18 * max(np.max(np.abs(total), initial=0.0), 1e-300) and k > 2:
            return total
        term = term * w
        k += 1


def _i1_over_z(w):
    """I1(sqrt(w))/sqrt(w), continued to w < 0 as J1(sqrt(-w))/sqrt(-w)."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    small = np.abs(w) <= _SERIES_W
    if np.any(small):
        out[small] = _series(w[small], lambda k: 0.5 / (4.0 ** k * math.factorial(k) * math.factorial(k + 1)))
    pos = ~small & (w > 0)
    if np.any(pos):
        z = np.sqrt(w[pos])
        out[pos] = i1(z) / z
    neg = ~small & (w < 0)
    if np.any(neg):
        z = np.sqrt(-w[neg])
        out[neg] = j1(z) / z
    return out


def _sinh_over_z(w):
    """sinh(sqrt(w))/sqrt(w), continued to w < 0 as sin(sqrt(-w))/sqrt(-w)."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    small = np.abs(w) <= _SERIES_W
    if np.any(small):
        out[small] = _series(w[small], lambda k: 1.0 / math.factorial(2 * k + 1))
    pos = ~small & (w > 0)
    if np.any(pos):
        z = np.sqrt(w[pos])
        out[pos] = np.sinh(z) / z
    neg = ~small & (w < 0)
    if np.any(neg):
        z = np.sqrt(-w[neg])
        out[neg] = np.sin(z) / z
    return out


def _sin_over_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(xs) / xs)


def window_ft(spec: WindowSpec, tau):
    """Closed-form Fourier transform of the window (real and even in ``tau``)."""
    tau = np.abs(np.asarray(tau, dtype=float))
    m = spec.m
    if spec.kind is WindowKind.BSPLINE:
        s = spec.s
        scale = m / (math.sqrt(2 * math.pi) * s * bspline_center_value(2 * s))
        out = scale * _sin_over_x(m * tau / (2 * s)) ** (2 * s)
    elif spec.kind is WindowKind.SINH:
        beta = spec.beta
        nu = m * tau / beta
        w = beta * beta * (1.0 - nu) * (1.0 + nu)
        out = m * math.sqrt(math.pi / 2) * beta / math.sinh(beta) * _i1_over_z(w)
    else:
        beta = spec.beta
        nu = m * tau / beta
        w = beta * beta * (1.0 - nu) * (1.0 + nu)
        scale = m * math.sqrt(2 / math.pi) / float(i0m1(beta))
        out = scale * (_sinh_over_z(w) - _sin_over_x(beta * nu))
    return out[()] if out.ndim == 0 else out


def window_ft_zero(spec: WindowSpec) -> float:
    """phi_hat(0), i.e. sqrt(2/pi) times the integral of the window over [0, m]."""
    return float(window_ft(spec, 0.0))
