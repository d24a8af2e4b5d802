"""Error constants, closed-form error bounds, robustness coefficients and instability bounds.

The error constant of a window ``phi`` at band parameter ``delta`` is

    E(m, delta) = sqrt(delta / pi) * max_{|w| <= delta} |Delta(w)|,
    Delta(w)    = 1 - (2 pi)^(-1/2) * int_{w - pi}^{w + pi} phi_hat.

Because ``(2 pi)^(-1/2) * int phi_hat = phi(0) = 1`` we evaluate
``Delta(w) = Tail(pi + w) + Tail(pi - w)`` with
``Tail(x) = (2 pi)^(-1/2) * int_x^inf phi_hat``.  Each tail is reduced to a
closed-form total minus a short oscillatory integral (sinh, cKB) or to a
positive integrand (B-spline), so values far below 1e-16 keep their
relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import gauss_legendre
from .special_functions import bspline_center_value, i0_minus_l0, i0m1, j1, si
from .windows import (WindowKind, WindowSpec, _i1_over_z, _sin_over_x, _sinh_over_z,
                      window_ft_zero)

EULER_GAMMA = float(np.euler_gamma)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_PANEL_NODES = 20


class BoundsError(ValueError):
    """Band parameter outside the admissible range."""


class Inapplicable:
    """Marker for a closed-form bound whose hypotheses fail."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INAPPLICABLE"

    def __bool__(self) -> bool:
        return False


INAPPLICABLE = Inapplicable()


@dataclass(frozen=True)
class BoundReport:
    window: WindowSpec
    delta: float
    e_numeric: float
    e_closed_form: float | None
    oversampling_ok: bool
    robustness_coeff: float

    @property
    def dominated(self) -> bool | None:
        """e_numeric <= e_closed_form (1 + 1e-6), or None when no bound applies."""
        if self.e_closed_form is None or not self.oversampling_ok:
            return None
        return self.e_numeric <= self.e_closed_form * (1 + 1e-6)


def _check_delta(delta: float, allow_pi: bool) -> float:
    delta = float(delta)
    ok = 0.0 < delta <= math.pi if allow_pi else 0.0 < delta < math.pi
    if not ok:
        rng = "(0, pi]" if allow_pi else "(0, pi)"
        raise BoundsError(f"delta must lie in {rng}, got {delta!r}")
    return delta


# --------------------------------------------------------- tail integrals

def _cumulative_from(func, targets, upper, max_width):
    """int_{y}^{upper} func for every y in ``targets`` (all <= upper).

    Breakpoints are the sorted targets merged with a uniform grid of width
    ``max_width``; panel integrals are accumulated from the top down.
    """
    shape = np.shape(targets)
    targets = np.asarray(targets, dtype=float).ravel()
    lo = float(targets.min())
    uniform = np.linspace(lo, upper, max(1, int(math.ceil((upper - lo) / max_width))) + 1)
    breaks = np.unique(np.concatenate([uniform, targets, [upper]]))
    x, w = gauss_legendre(_PANEL_NODES)
    left, right = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (right - left)
    vals = func(half * x + 0.5 * (left + right))
    panels = np.sum(vals * w, axis=1) * half[:, 0]
    from_top = np.concatenate([np.cumsum(panels[::-1])[::-1], [0.0]])
    return from_top[np.searchsorted(breaks, targets)].reshape(shape)


def _cumulative_to(func, targets, lower, max_width):
    """int_{lower}^{y} func for every y in ``targets`` (all >= lower)."""
    shape = np.shape(targets)
    targets = np.asarray(targets, dtype=float).ravel()
    hi = float(targets.max())
    if hi <= lower:
        return np.zeros(shape)
    uniform = np.linspace(lower, hi, max(1, int(math.ceil((hi - lower) / max_width))) + 1)
    breaks = np.unique(np.concatenate([uniform, targets]))
    x, w = gauss_legendre(_PANEL_NODES)
    left, right = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (right - left)
    vals = func(half * x + 0.5 * (left + right))
    panels = np.sum(vals * w, axis=1) * half[:, 0]
    cum = np.concatenate([[0.0], np.cumsum(panels)])
    return cum[np.searchsorted(breaks, targets)].reshape(shape)


def j1_integral(beta: float, upper):
    """int_1^T J1(beta sqrt(nu^2 - 1)) / sqrt(nu^2 - 1) d nu for each T in ``upper``.

    Substituting z = beta sqrt(nu^2 - 1) gives int_0^{z_T} J1(z) / (beta nu(z)) dz,
    which has no endpoint singularity.
    """
    upper = np.asarray(upper, dtype=float)
    z = beta * np.sqrt(np.maximum(upper * upper - 1.0, 0.0))
    return _cumulative_to(lambda s: j1(s) / (beta * np.sqrt(1.0 + (s / beta) ** 2)),
                          z, 0.0, 1.0)


def j1_integral_total(beta: float) -> float:
    """int_1^inf J1(beta sqrt(nu^2 - 1)) / sqrt(nu^2 - 1) d nu = (1 - e^-beta) / beta."""
    return -math.expm1(-beta) / beta


def ckb_integral_total(beta: float) -> float:
    """int_1^inf [sin(z)/z - sin(beta nu)/(beta nu)] d nu with z = beta sqrt(nu^2 - 1)."""
    return (0.5 * math.pi * float(i0_minus_l0(beta)) - 0.5 * math.pi + float(si(beta))) / beta


def _ckb_partial(beta: float, nu):
    """int_1^{nu} [sin(z)/z - sin(beta t)/(beta t)] dt for nu >= 1."""
    nu = np.asarray(nu, dtype=float)
    z = beta * np.sqrt(np.maximum(nu * nu - 1.0, 0.0))
    first = _cumulative_to(lambda s: np.sin(s) / (beta * beta * np.sqrt(1.0 + (s / beta) ** 2)),
                           z, 0.0, 1.0)
    return first - (si(beta * nu) - float(si(beta))) / beta


def _inner_below_one(func, nu):
    """int_{nu}^{1} func for nu < 1 (zero elsewhere); func is smooth on [0, 1]."""
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    low = nu < 1.0
    if np.any(low):
        out[low] = _cumulative_from(func, nu[low], 1.0, 0.05)
    return out


def window_tail(spec: WindowSpec, x):
    """(2 pi)^(-1/2) * int_x^inf phi_hat(tau) d tau for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise BoundsError("tail integrals need nonnegative lower limits")
    m = spec.m
    if spec.kind is WindowKind.BSPLINE:
        s = spec.s
        u0 = m * x / (2 * s)
        k = 2 * s
        cutoff = math.pi * math.ceil(max(50.0 * float(u0.max()), 200.0) / math.pi)

        def integrand(u):
            us = np.where(u == 0.0, 1.0, u)
            return np.where(u == 0.0, 1.0, np.sin(us) / us) ** k

        body = _cumulative_from(integrand, u0, cutoff, 0.5 * math.pi)
        # beyond the cutoff sin^k averages to C(k, k/2) / 2^k
        far = math.comb(k, s) / 2.0 ** k * cutoff ** (1 - k) / (k - 1)
        return (body + far) / (math.pi * bspline_center_value(k))

    beta = spec.beta
    nu0 = m * x / beta
    nu_hi = np.maximum(nu0, 1.0)
    if spec.kind is WindowKind.SINH:
        above = j1_integral_total(beta) - j1_integral(beta, nu_hi)

        def below(nu):
            w = beta * beta * (1.0 - nu) * (1.0 + nu)
            return beta * _i1_over_z(w)

        q = above + _inner_below_one(below, nu0)
        # beta / (2 sinh beta) without overflow
        pref = beta * math.exp(-beta) / (-math.expm1(-2.0 * beta))
        return pref * q

    above = ckb_integral_total(beta) - _ckb_partial(beta, nu_hi)

    def below_ckb(nu):
        w = beta * beta * (1.0 - nu) * (1.0 + nu)
        return _sinh_over_z(w) - _sin_over_x(beta * nu)

    t = above + _inner_below_one(below_ckb, nu0)
    return beta / (math.pi * float(i0m1(beta))) * t


def delta_function(spec: WindowSpec, omega):
    """Delta(w) = 1 - (2 pi)^(-1/2) int_{w-pi}^{w+pi} phi_hat, for |w| <= pi."""
    omega = np.asarray(omega, dtype=float)
    w = np.abs(omega)
    if np.any(w > math.pi):
        raise BoundsError("Delta is only needed for |omega| <= pi")
    tails = window_tail(spec, np.concatenate([math.pi + w.ravel(), math.pi - w.ravel()]))
    n = w.size
    out = (tails[:n] + tails[n:]).reshape(w.shape)
    return out[()] if out.ndim == 0 else out


def error_constant_numeric(spec: WindowSpec, delta: float, grid: int = 2049,
                           full_output: bool = False):
    """E(m, delta) from a Chebyshev omega-grid on [0, delta] refined by golden section.

    Delta is even, so [0, delta] suffices.  With ``full_output`` also returns
    the maximizing omega.
    """
    delta = _check_delta(delta, allow_pi=True)
    if int(grid) != grid or grid < 128:
        raise BoundsError("grid must be an integer >= 128")
    k = np.arange(grid)
    omegas = 0.5 * delta * (1.0 - np.cos(math.pi * k / (grid - 1)))
    vals = np.abs(delta_function(spec, omegas))
    i = int(np.argmax(vals))
    best_w, best = float(omegas[i]), float(vals[i])
    lo = float(omegas[max(i - 1, 0)])
    hi = float(omegas[min(i + 1, grid - 1)])
    f = lambda w: float(abs(delta_function(spec, w)))
    a, b = lo, hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if b - a <= 1e-13 * max(1.0, delta):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    for w, v in ((c, fc), (d, fd)):
        if v > best:
            best_w, best = w, v
    e = math.sqrt(delta / math.pi) * best
    return (e, best_w) if full_output else e


# ------------------------------------------------------- closed-form bounds

def bound_bspline(m: int, s: int, delta: float):
    """(1/pi) (2s / (m (pi - delta)))^(2s - 1) when 0 < delta < pi - 2s/m, else INAPPLICABLE."""
    if not (0.0 < delta < math.pi - 2.0 * s / m):
        return INAPPLICABLE
    return (2.0 * s / (m * (math.pi - delta))) ** (2 * s - 1) / math.pi


def bound_sinh(m: int, delta: float) -> float:
    delta = _check_delta(delta, allow_pi=False)
    return math.sqrt(delta / math.pi) * math.exp(-m * (math.pi - delta))


def bound_ckb(m: int, delta: float) -> float:
    delta = _check_delta(delta, allow_pi=False)
    return math.sqrt(delta / math.pi) / float(i0m1(m * (math.pi - delta)))


def closed_form_bound(spec: WindowSpec, delta: float):
    if spec.kind is WindowKind.BSPLINE:
        return bound_bspline(spec.m, spec.s, delta)
    if spec.kind is WindowKind.SINH:
        return bound_sinh(spec.m, delta)
    return bound_ckb(spec.m, delta)


def oversampling_check(spec: WindowSpec, delta: float) -> tuple[bool, str]:
    m = spec.m
    if spec.kind is WindowKind.BSPLINE:
        limit = math.pi - 2.0 * spec.s / m
        ok = 0.0 < delta < limit
        return ok, f"need 0 < delta < pi - 2s/m = {limit:.12g}"
    limit = math.pi - math.pi / m
    ok = 0.0 < delta <= limit
    return ok, f"need 0 < delta <= pi - pi/m = {limit:.12g}"


def robustness_coeff(spec: WindowSpec) -> float:
    """Noise amplification factor 2 + sqrt(2 pi) phi_hat(0)."""
    return 2.0 + math.sqrt(2.0 * math.pi) * window_ft_zero(spec)


def robustness_cap(spec: WindowSpec) -> tuple[float, bool]:
    """Kind-specific cap on the robustness coefficient and whether its hypothesis holds.

    B-spline: 2 + 1.5 sqrt(m) with the default s.  sinh: 2 + 1.5 m and cKB:
    2 + 1.75 m, both for beta >= pi.
    """
    m = spec.m
    if spec.kind is WindowKind.BSPLINE:
        return 2.0 + 1.5 * math.sqrt(m), spec.s == (m + 2) // 2
    if spec.kind is WindowKind.SINH:
        return 2.0 + 1.5 * m, spec.beta >= math.pi
    return 2.0 + 1.75 * m, spec.beta >= math.pi


def bound_report(spec: WindowSpec, delta: float, grid: int = 2049) -> BoundReport:
    ok, _ = oversampling_check(spec, delta)
    e = error_constant_numeric(spec, delta, grid)
    closed = None
    if delta < math.pi:
        value = closed_form_bound(spec, delta)
        closed = None if value is INAPPLICABLE else float(value)
    return BoundReport(spec, float(delta), e, closed, ok, robustness_coeff(spec))


# -------------------------------------------------------------- instability

def instability_bounds(N: int) -> tuple[float, float]:
    """Per-unit-eps lower and upper bounds on the worst-case error of the truncated series."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    lower = 2.0 / math.pi * math.log(N) + 1.25
    upper = (2.0 / math.pi * (math.log(N) + 2.0 * math.log(2.0) + EULER_GAMMA)
             + (N + 2) / (math.pi * N * (N + 1)))
    return lower, upper


# ------------------------------------------------------ proof inequalities

@dataclass(frozen=True)
class ProofCheck:
    claim: str
    beta: float
    T: float | None
    value: float
    margin: float
    strict: bool

    @property
    def ok(self) -> bool:
        return self.margin > 0 if self.strict else self.margin >= 0


def i0_growth(x: float) -> float:
    """sqrt(2 pi x) e^-x (I0(x) - 1), nondecreasing on [pi, inf) towards 1."""
    return math.sqrt(2.0 * math.pi * x) * math.exp(-x) * float(i0m1(x))


def ckb_constant() -> float:
    """e^pi / (sqrt(2) pi (I0(pi) - 1)) = 1 / i0_growth(pi)."""
    return 1.0 / i0_growth(math.pi)


def verify_proof_inequalities(beta_grid, T_grid) -> list[ProofCheck]:
    """Check three auxiliary inequalities on a grid and report their margins.

    * ``j1_integral``: 0 < int_1^T J1(beta sqrt(nu^2-1))/sqrt(nu^2-1) <= 3(1-e^-beta)/(2 beta)
    * ``struve``: 0 < I0(beta) - L0(beta) - 1 + (2/pi) Si(beta) < 1
    * ``i0_growth``: sqrt(2 pi x) e^-x (I0(x)-1) >= its value at x = pi, for x >= pi

    The margin is the distance to the nearest violated side.  The last claim
    is non-strict and has margin exactly 0 at x = pi.
    """
    report = []
    T_grid = [float(T) for T in T_grid]
    ref = i0_growth(math.pi)
    for beta in map(float, beta_grid):
        vals = j1_integral(beta, np.array(T_grid))
        limit = 1.5 * (-math.expm1(-beta)) / beta
        for T, v in zip(T_grid, vals):
            report.append(ProofCheck("j1_integral", beta, T, float(v),
                                     float(min(v, limit - v)), True))
        v = float(i0_minus_l0(beta)) - 1.0 + 2.0 / math.pi * float(si(beta))
        report.append(ProofCheck("struve", beta, None, v, min(v, 1.0 - v), True))
        g = i0_growth(beta)
        report.append(ProofCheck("i0_growth", beta, None, g, g - ref, False))
    return report
