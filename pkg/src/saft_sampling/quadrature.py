"""Small quadrature and summation helpers shared by the numerical modules."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_breaks(a: float, b: float, max_width: float) -> np.ndarray:
    """Equispaced breakpoints on [a, b] with panel width at most ``max_width``."""
    count = max(1, int(np.ceil((b - a) / max_width - 1e-12)))
    return np.linspace(a, b, count + 1)


def composite_gl(func, breaks, nodes: int = 32):
    """Composite Gauss-Legendre integral of ``func`` over consecutive ``breaks``.

    ``func`` is called once with a 2-D array of abscissae (panels x nodes) and
    may return real or complex values of the same shape.
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(nodes)
    left, right = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (right - left)
    pts = half * x + 0.5 * (right + left)
    vals = func(pts)
    return np.sum(np.sum(vals * w, axis=1) * half[:, 0])


def panel_integrals(func, breaks, nodes: int = 32) -> np.ndarray:
    """Per-panel Gauss-Legendre integrals (useful for cumulative sums)."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(nodes)
    left, right = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (right - left)
    vals = func(half * x + 0.5 * (right + left))
    return np.sum(vals * w, axis=1) * half[:, 0]


def compensated_sum(terms, axis: int = 0):
    """Kahan-compensated sum of ``terms`` along ``axis`` in ascending index order.

    Works for real and complex arrays; the loop runs over ``axis`` and is
    vectorised over the remaining dimensions.
    """
    terms = np.moveaxis(np.asarray(terms), axis, 0)
    total = np.zeros(terms.shape[1:], dtype=terms.dtype)
    comp = np.zeros_like(total)
    for term in terms:
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


class KahanAccumulator:
    """Running compensated sum; feed arrays (or scalars) one term at a time."""

    def __init__(self, shape=(), dtype=complex):
        self.total = np.zeros(shape, dtype=dtype)
        self._comp = np.zeros(shape, dtype=dtype)

    def add(self, term) -> None:
        y = term - self._comp
        t = self.total + y
        self._comp = (t - self.total) - y
        self.total = t
