"""Special affine Fourier transform (SAFT): parameters, kernel and operators.

For ``A = (a, b, c, d, p, q)`` with ``ad - bc = 1`` and ``b != 0`` the
transform is

    F_A f(w) = (2 pi |b|)^(-1/2) * int f(t) exp(i/(2b) (a t^2 + 2pt - 2wt + d w^2 + 2(bq - dp) w)) dt

and factors as ``eta(w) * rho(t) * exp(-i w t / b)`` inside the integral.
The quadrature routines here are reference oracles for testing, not fast
transforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import gauss_legendre

DET_TOL = 1e-12
B_MIN = 1e-15
NODES_PER_PANEL = 64


class ParameterError(ValueError):
    """Invalid SAFT parameters or band description."""


class QuadratureError(ValueError):
    """Bad integration interval or panel count."""


@dataclass(frozen=True)
class SaftParams:
    a: float
    b: float
    c: float
    d: float
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d, self.p, self.q)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("SAFT parameters must be finite")
        if abs(self.b) <= B_MIN:
            raise ParameterError("b = 0 is excluded (|b| must exceed 1e-15)")
        det = self.a * self.d - self.b * self.c
        if abs(det - 1.0) > DET_TOL:
            raise ParameterError(f"determinant ad - bc = {det!r} differs from 1")

    @property
    def chirp_rate(self) -> float:
        """a / b, the chirp rate tying SAFT-bandlimited to bandlimited functions."""
        return self.a / self.b

    @property
    def scale(self) -> float:
        return 1.0 / math.sqrt(2.0 * math.pi * abs(self.b))

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d, self.p, self.q)


def make_params(a, b, c, d, p=0.0, q=0.0) -> SaftParams:
    return SaftParams(float(a), float(b), float(c), float(d), float(p), float(q))


FOURIER = SaftParams(0.0, 1.0, -1.0, 0.0)


def rotation_params(alpha: float, p: float = 0.0, q: float = 0.0) -> SaftParams:
    """Fractional-Fourier style parameters (cos, sin, -sin, cos, p, q)."""
    return make_params(math.cos(alpha), math.sin(alpha), -math.sin(alpha), math.cos(alpha), p, q)


@dataclass(frozen=True)
class BandSpec:
    """Band [p - |b| delta, p + |b| delta] of the space of SAFT-bandlimited functions."""

    p: float
    delta: float
    b: float

    def __post_init__(self):
        if not (0.0 < self.delta <= math.pi):
            raise ParameterError(f"delta must lie in (0, pi], got {self.delta!r}")
        if abs(self.b) <= B_MIN:
            raise ParameterError("b = 0 is excluded")

    @classmethod
    def from_params(cls, params: SaftParams, delta: float) -> "BandSpec":
        return cls(params.p, delta, params.b)

    @property
    def interval(self) -> tuple[float, float]:
        half = abs(self.b) * self.delta
        return (self.p - half, self.p + half)


@dataclass(frozen=True)
class ComplexSignal:
    """Evaluation handle for a complex-valued function of a real variable.

    ``eval`` must accept numpy arrays and broadcast elementwise.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))


def _cexp(phase):
    return np.exp(1j * phase)


def kernel(params: SaftParams, t, omega):
    a, b, _, d, p, q = params.as_tuple()
    t = np.asarray(t, dtype=float)
    w = np.asarray(omega, dtype=float)
    phase = (a * t * t + 2 * p * t - 2 * w * t + d * w * w + 2 * (b * q - d * p) * w) / (2 * b)
    return params.scale * _cexp(phase)


def eta(params: SaftParams, omega):
    a, b, _, d, p, q = params.as_tuple()
    w = np.asarray(omega, dtype=float)
    return _cexp((d * w * w + 2 * (b * q - d * p) * w) / (2 * b))


def rho(params: SaftParams, t):
    a, b, _, d, p, q = params.as_tuple()
    t = np.asarray(t, dtype=float)
    return _cexp((a * t * t + 2 * p * t) / (2 * b))


def chirp_modulate(s: float, f: ComplexSignal) -> ComplexSignal:
    """C_s f(t) = exp(i s t^2 / 2) f(t)."""
    return ComplexSignal(lambda t: _cexp(0.5 * s * t * t) * f.eval(t),
                         f"C[{s!r}]({f.description})")


def a_translate(params: SaftParams, x: float, f: ComplexSignal) -> ComplexSignal:
    """T_x f(t) = exp(-i (a/b) x (t - x)) f(t - x)."""
    r = params.chirp_rate
    return ComplexSignal(lambda t: _cexp(-r * x * (t - x)) * f.eval(t - x),
                         f"T[{x!r}]({f.description})")


# ------------------------------------------------------------- quadrature

def _check_support(support, panels):
    lo, hi = map(float, support)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
        raise QuadratureError(f"support must be a finite interval with lo < hi, got {support!r}")
    if panels is not None and (int(panels) != panels or panels < 1):
        raise QuadratureError(f"panels must be a positive integer, got {panels!r}")
    return lo, hi


def _nodes(lo, hi, panels):
    if panels is None:
        panels = max(1, int(math.ceil(hi - lo)))
    x, w = gauss_legendre(NODES_PER_PANEL)
    edges = np.linspace(lo, hi, int(panels) + 1)
    half = 0.5 * np.diff(edges)[:, None]
    pts = (half * x + 0.5 * (edges[:-1, None] + edges[1:, None])).ravel()
    wts = (half * w).ravel()
    return pts, wts


def _integrate(integrand, lo, hi, panels, full_output):
    pts, wts = _nodes(lo, hi, panels)
    value = integrand(pts) @ wts
    if not full_output:
        return value
    n = max(1, int(math.ceil(hi - lo))) if panels is None else int(panels)
    pts2, wts2 = _nodes(lo, hi, 2 * n)
    fine = integrand(pts2) @ wts2
    return fine, np.abs(fine - value)


def _out(v):
    v = np.asarray(v)
    return v[()] if v.ndim == 0 else v


def saft_quadrature(params: SaftParams, f: ComplexSignal, support, omega, panels=None,
                    full_output=False):
    """F_A f(omega) by composite Gauss-Legendre on ``support``.

    ``panels`` defaults to one per unit length.  With ``full_output`` the
    panel-doubled value is returned along with the size of the change.
    """
    lo, hi = _check_support(support, panels)
    w = np.asarray(omega, dtype=float).ravel()
    b = params.b

    def integrand(t):
        ft = f(t) * rho(params, t)
        return eta(params, w)[:, None] * _cexp(-np.outer(w, t) / b) * ft[None, :] * params.scale

    res = _integrate(integrand, lo, hi, panels, full_output)
    shape = np.shape(omega)
    if full_output:
        return _out(res[0].reshape(shape)), _out(res[1].reshape(shape))
    return _out(res.reshape(shape))


def inverse_saft_quadrature(params: SaftParams, F: ComplexSignal, support, t, panels=None,
                            full_output=False):
    """Inverse transform conj(rho(t)) (2 pi |b|)^(-1/2) int F(w) conj(eta(w)) exp(i w t / b) dw."""
    lo, hi = _check_support(support, panels)
    tt = np.asarray(t, dtype=float).ravel()
    b = params.b

    def integrand(w):
        fw = F(w) * np.conj(eta(params, w))
        return np.conj(rho(params, tt))[:, None] * _cexp(np.outer(tt, w) / b) * fw[None, :] * params.scale

    res = _integrate(integrand, lo, hi, panels, full_output)
    shape = np.shape(t)
    if full_output:
        return _out(res[0].reshape(shape)), _out(res[1].reshape(shape))
    return _out(res.reshape(shape))


def a_convolution_quadrature(params: SaftParams, f: ComplexSignal, g: ComplexSignal, support, t,
                             panels=None):
    """(f *_A g)(t) = (2 pi |b|)^(-1/2) int f(x) T_x g(t) dx over ``support`` in x."""
    lo, hi = _check_support(support, panels)
    tt = np.asarray(t, dtype=float).ravel()
    r = params.chirp_rate
    pts, wts = _nodes(lo, hi, panels)
    x = pts[None, :]
    tcol = tt[:, None]
    vals = f(pts)[None, :] * _cexp(-r * x * (tcol - x)) * g(tcol - x)
    res = params.scale * (vals @ wts)
    return _out(res.reshape(np.shape(t)))


def gaussian_support(width: float, center: float = 0.0, tail_mass: float = 1e-16) -> tuple[float, float]:
    """Interval outside which exp(-(t-center)^2 / (2 width^2)) carries < tail_mass of its L1 mass."""
    from scipy.special import erfcinv

    half = math.sqrt(2.0) * width * float(erfcinv(tail_mass))
    return center - half, center + half


def gaussian(width: float = 1.0, center: float = 0.0) -> ComplexSignal:
    return ComplexSignal(lambda t: np.exp(-((t - center) ** 2) / (2 * width * width)) + 0j,
                         f"gaussian(width={width!r}, center={center!r})")
