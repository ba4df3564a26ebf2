"""Polygamma functions and the Gamma speckle model.

The averaged speckle of ``K`` looks with mean ``mu`` has density

    p(eta) = (K/mu)**K * eta**(K-1) / Gamma(K) * exp(-K*eta/mu),   eta >= 0,

i.e. a Gamma law with shape ``K`` and scale ``mu/K`` (mean ``mu``, standard
deviation ``mu/sqrt(K)``).  Its logarithm has mean ``psi0(K) - log(K/mu)``
and variance ``psi1(K)``.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "RNG_ALGORITHM",
    "NoiseModel",
    "LogNoiseStats",
    "digamma",
    "trigamma",
    "polygamma",
    "make_rng",
    "sample_speckle",
    "apply_multiplicative_noise",
    "log_noise_stats",
]

RNG_ALGORITHM = "numpy.random.PCG64"

# Below this argument the recurrence shifts z upward before the asymptotic
# expansion is used; at z >= 10 the truncated series is accurate to ~1e-17.
_SHIFT_TO = 10.0

# Bernoulli numbers B_2, B_4, ..., B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)


def _digamma_asymptotic(z):
    z2 = 1.0 / (z * z)
    s = 0.0
    p = z2
    for k, b in enumerate(_BERNOULLI, start=1):
        s += b / (2 * k) * p
        p = p * z2
    return np.log(z) - 0.5 / z - s


def _trigamma_asymptotic(z):
    z2 = 1.0 / (z * z)
    s = 0.0
    p = z2 / z
    for b in _BERNOULLI:
        s += b * p
        p = p * z2
    return 1.0 / z + 0.5 * z2 + s


def _prepare(z):
    z = np.asarray(z, dtype=np.float64)
    if np.any(~(z > 0)):
        raise ValueError("polygamma is only defined here for z > 0")
    return z


def digamma(z):
    """psi_0(z) = d/dz log Gamma(z) for z > 0."""
    z = _prepare(z)
    acc = np.zeros_like(z)
    z = z.copy()
    small = z < _SHIFT_TO
    while np.any(small):
        acc[small] -= 1.0 / z[small]
        z[small] += 1.0
        small = z < _SHIFT_TO
    out = acc + _digamma_asymptotic(z)
    return float(out) if out.ndim == 0 else out


def trigamma(z):
    """psi_1(z) = d^2/dz^2 log Gamma(z) for z > 0."""
    z = _prepare(z)
    acc = np.zeros_like(z)
    z = z.copy()
    small = z < _SHIFT_TO
    while np.any(small):
        acc[small] += 1.0 / (z[small] * z[small])
        z[small] += 1.0
        small = z < _SHIFT_TO
    out = acc + _trigamma_asymptotic(z)
    return float(out) if out.ndim == 0 else out


def polygamma(order, z):
    """Polygamma function of order 0 (digamma) or 1 (trigamma)."""
    if order == 0:
        return digamma(z)
    if order == 1:
        return trigamma(z)
    raise ValueError(f"only orders 0 and 1 are supported, got {order}")


@dataclass(frozen=True)
class NoiseModel:
    """Averaged Gamma speckle: ``K`` looks, each with mean ``mu``."""

    K: int = 10
    mu: float = 1.0

    def __post_init__(self):
        if isinstance(self.K, bool) or int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu!r}")
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "mu", float(self.mu))


@dataclass(frozen=True)
class LogNoiseStats:
    mean: float
    variance: float

    @property
    def sigma(self):
        return math.sqrt(self.variance)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def sample_speckle(model, shape, seed):
    """Draw an i.i.d. field of averaged speckle ``eta ~ Gamma(K, mu/K)``.

    The same ``seed`` always yields the same field (PCG64 stream).
    """
    rng = make_rng(seed)
    return rng.gamma(model.K, model.mu / model.K, size=tuple(shape))


def apply_multiplicative_noise(s0, model, seed):
    """Corrupt a strictly positive image: ``S = S0 * eta``."""
    s0 = np.asarray(s0, dtype=np.float64)
    if np.any(~(s0 > 0)):
        raise ValueError("multiplicative noise needs strictly positive pixels")
    return s0 * sample_speckle(model, s0.shape, seed)


def log_noise_stats(model):
    """Mean and variance of ``log(eta)`` under ``model``.

    For ``mu = 1`` the mean is ``psi0(K) - log K``; a general ``mu`` adds
    ``log mu``.  The variance ``psi1(K)`` does not depend on ``mu``.
    """
    mean = digamma(model.K) - math.log(model.K) + math.log(model.mu)
    return LogNoiseStats(mean=mean, variance=trigamma(model.K))
