"""Independent reference values shared by the test modules."""
import cmath
import math

import numpy as np


def gaussian_saft(params, omega):
    """Closed-form transform of exp(-t^2/2) for arbitrary parameters.

    Completing the square in exp(-alpha t^2 + beta t) with
    alpha = 1/2 - i a/(2b) and beta = i (p - omega)/b.
    """
    a, b, _, d, p, q = params.as_tuple()
    alpha = 0.5 - 1j * a / (2 * b)
    omega = np.asarray(omega, dtype=float)
    beta = 1j * (p - omega) / b
    eta = np.exp(1j * (d * omega ** 2 + 2 * (b * q - d * p) * omega) / (2 * b))
    return eta * cmath.sqrt(math.pi / alpha) * np.exp(beta ** 2 / (4 * alpha)) / math.sqrt(2 * math.pi * abs(b))


def gaussian_saft_width(params):
    """Standard deviation (in omega) of |gaussian_saft|."""
    return math.hypot(params.a, params.b)
