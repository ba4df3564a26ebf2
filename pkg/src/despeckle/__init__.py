"""Speckle removal by l1 fidelity on tight-frame coefficients plus total variation.

The restoration works on the log of the image: frame coefficients are hard
thresholded, then ``sum_i lambda_i |x[i] - y_th[i]| + TV(W~ x)`` is minimized
by Douglas-Rachford splitting, and the result is exponentiated and corrected
for the bias of the log-noise.
"""

__version__ = "0.1.0"

from .frame import TightFrame, hard_threshold
from .pipeline import (
    bias_factor,
    denoise,
    denoise_hardthreshold,
    denoise_l2tv,
    mae,
    psnr,
    shepp_logan,
)
from .prox import LambdaWeights, TvProxConfig
from .solver import SolverConfig, douglas_rachford
from .special import NoiseModel, apply_multiplicative_noise, sample_speckle

__all__ = [
    "TightFrame",
    "hard_threshold",
    "LambdaWeights",
    "TvProxConfig",
    "SolverConfig",
    "douglas_rachford",
    "NoiseModel",
    "sample_speckle",
    "apply_multiplicative_noise",
    "denoise",
    "denoise_l2tv",
    "denoise_hardthreshold",
    "bias_factor",
    "psnr",
    "mae",
    "shepp_logan",
]
