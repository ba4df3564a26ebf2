"""Proximity operators of the two terms of the coefficient-domain criterion.

``Psi(x) = sum_i lambda_i |x[i] - y_th[i]|`` is separable, so its prox is a
shifted soft-thresholding.  ``Phi(x) = TV(W~ x)`` is handled through the
tight-frame identity

    prox_{gamma Phi}(x) = x - W P_C(W~ x),

where ``P_C(u) = u - prox_{(gamma/c) TV}(u)`` is the projection onto the set
of divergences of fields bounded by ``gamma/c``.  That projection has no
closed form and is computed by a projected-gradient (forward-backward)
iteration on the dual field.
"""

from dataclasses import dataclass

import numpy as np

from .grid import divergence, gradient, pixel_norm

__all__ = [
    "LambdaWeights",
    "TvProxConfig",
    "soft_threshold",
    "prox_psi",
    "rprox_psi",
    "project_unit_ball",
    "tv_prox",
    "projection_c",
    "prox_phi",
    "rprox_phi",
    "moreau_check",
]


@dataclass(frozen=True)
class LambdaWeights:
    """Fidelity weights: ``lambda0`` on thresholded details, ``lambda1`` elsewhere.

    With ``relative=True`` (the default) both values are fractions of the
    per-subband bound ``||W~ e_i||_TV``: a weight at or above that bound
    freezes the coefficient, so ``lambda1`` just below one keeps the large
    coefficients close to their data while a small ``lambda0`` lets the TV
    term refill the zeroed ones.  With ``relative=False`` the values are used
    as given.
    """

    lambda0: float = 0.1
    lambda1: float = 0.5
    relative: bool = True

    def __post_init__(self):
        if not (self.lambda0 > 0 and self.lambda1 > 0):
            raise ValueError("lambda0 and lambda1 must both be > 0")

    def as_array(self, part, frame=None):
        lam = np.where(part.i0, self.lambda0, self.lambda1)
        if self.relative:
            if frame is None:
                raise ValueError("relative weights need the frame to scale against")
            lam = lam * frame.atom_tv_norms()[:, None, None]
        return lam


@dataclass(frozen=True)
class TvProxConfig:
    """Dual forward-backward settings for the TV proximity operator.

    The stepsize must stay below 1/4 (the squared norm of the divergence is
    at most 8 and the admissible step is below 2/8).
    """

    beta: float = 0.24
    n_inner: int = 200

    def __post_init__(self):
        if not 0 < self.beta < 0.25:
            raise ValueError(f"beta must be < 1/4 and > 0, got {self.beta}")
        if int(self.n_inner) != self.n_inner or self.n_inner < 1:
            raise ValueError(f"n_inner must be a positive integer, got {self.n_inner}")


def soft_threshold(z, t):
    """``sign(z) * max(|z| - t, 0)``, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def prox_psi(x, y_th, weights, part, gamma, frame=None):
    """Prox of ``gamma * Psi``: ``y_th + soft(x - y_th, gamma * lambda_i)``.

    Coefficients within ``gamma * lambda_i`` of ``y_th`` come back equal to
    ``y_th`` exactly.  ``frame`` is needed only for relative weights.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != np.shape(y_th):
        raise ValueError(f"shape mismatch: {x.shape} vs {np.shape(y_th)}")
    thresh = gamma * weights.as_array(part, frame)
    d = x - y_th
    # written as a select so that the fitted coefficients are y_th verbatim
    return np.where(np.abs(d) <= thresh, y_th, y_th + soft_threshold(d, thresh))


def rprox_psi(x, y_th, weights, part, gamma, frame=None):
    return 2.0 * prox_psi(x, y_th, weights, part, gamma, frame) - x


def project_unit_ball(z):
    """Pixelwise projection of a vector field onto ``{|z(p)| <= 1}``."""
    mag = pixel_norm(z)
    return z / np.maximum(mag, 1.0)


def _fb_step(z, f, beta):
    return project_unit_ball(z + beta * gradient(divergence(z) - f))


def tv_prox(u, strength, cfg=TvProxConfig(), z0=None):
    """Proximity operator of ``strength * TV`` (a discrete ROF solve).

    Runs ``cfg.n_inner`` steps of

        z <- P_B(z + beta * grad(div z - u / strength))

    from ``z0`` (zero if omitted) and returns ``(u - strength * div z, z)``.
    The dual field can be fed back as ``z0`` to warm-start a nearby problem.
    """
    if not strength > 0:
        raise ValueError(f"strength must be positive, got {strength}")
    u = np.asarray(u, dtype=np.float64)
    z = np.zeros((2,) + u.shape) if z0 is None else np.array(z0, dtype=np.float64)
    f = u / strength
    for _ in range(cfg.n_inner):
        z = _fb_step(z, f, cfg.beta)
    return u - strength * divergence(z), z


def projection_c(u, strength, cfg=TvProxConfig(), z0=None):
    """``P_C(u) = strength * div z``, the complement of :func:`tv_prox`."""
    w, z = tv_prox(u, strength, cfg, z0)
    return u - w, z


def prox_phi(x, frame, gamma, cfg=TvProxConfig(), z0=None, return_dual=False):
    """Prox of ``gamma * TV(W~ x)`` over frame coefficients.

    Parameters
    ----------
    x : ndarray, shape (S, m, n)
    frame : TightFrame
    gamma : float
        Proximal stepsize; the inner TV prox runs at strength ``gamma / c``.
    cfg : TvProxConfig
    z0 : ndarray, optional
        Warm start for the inner dual field.
    return_dual : bool
        Also return the final dual field.
    """
    pc, z = projection_c(frame.synthesize(x), gamma / frame.c, cfg, z0)
    out = x - frame.analyze(pc)
    return (out, z) if return_dual else out


def rprox_phi(x, frame, gamma, cfg=TvProxConfig(), z0=None, return_dual=False):
    """Reflected prox ``x - 2 W P_C(W~ x)``."""
    pc, z = projection_c(frame.synthesize(x), gamma / frame.c, cfg, z0)
    out = x - 2.0 * frame.analyze(pc)
    return (out, z) if return_dual else out


def moreau_check(u, strength, cfg=TvProxConfig()):
    """Sup-norm defect of ``prox_f(u) + prox_f*(u) = u`` for ``f = strength * TV``.

    ``prox_f(u)`` is the value returned by :func:`tv_prox`; the conjugate
    term ``P_C(u)`` is re-evaluated from the dual field after one further
    forward-backward step, so the defect vanishes only once the inner
    iteration has reached its fixed point.
    """
    u = np.asarray(u, dtype=np.float64)
    w, z = tv_prox(u, strength, cfg)
    z_next = _fb_step(z, u / strength, cfg.beta)
    return float(np.abs(w + strength * divergence(z_next) - u).max())
