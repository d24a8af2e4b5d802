"""Regularized Shannon sampling for signals bandlimited in a special affine Fourier transform."""

__version__ = "0.1.0"

from .saft_core import (BandSpec, ComplexSignal, ParameterError, SaftParams, a_translate,
                        chirp_modulate, eta, kernel, make_params, rho, rotation_params)
from .sampling import (CoverageError, SampleSet, adversarial_samples, reconstruct_on_grid,
                       regularized_reconstruct, shannon_truncated, sinc)
from .windows import WindowKind, WindowSpec, make_window, window_ft, window_ft_zero, window_value

__all__ = [
    "BandSpec", "ComplexSignal", "CoverageError", "ParameterError", "SaftParams", "SampleSet",
    "WindowKind", "WindowSpec", "a_translate", "adversarial_samples", "chirp_modulate", "eta",
    "kernel", "make_params", "make_window", "reconstruct_on_grid", "regularized_reconstruct",
    "rho", "rotation_params", "shannon_truncated", "sinc", "window_ft", "window_ft_zero",
    "window_value",
]
