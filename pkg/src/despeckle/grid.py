"""Discrete image calculus on a unit-spaced pixel grid.

Images are 2-D float64 arrays of shape ``(m, n)``.  Vector fields are
arrays of shape ``(2, m, n)`` where ``z[0]`` is the component along rows
(first axis) and ``z[1]`` the component along columns.

The gradient uses forward differences with the last row/column replicated,
so its first component vanishes on the last row and its second component
on the last column.  The divergence is the negative adjoint of that
gradient, ``<grad u, z> = -<u, div z>``, which holds exactly.
"""

import numpy as np

__all__ = [
    "as_image",
    "gradient",
    "divergence",
    "pixel_norm",
    "tv_norm",
    "inner",
    "norm2",
    "norm1",
    "norm_inf",
]


def as_image(u):
    """Return ``u`` as a finite float64 2-D array (integer inputs are promoted)."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D image, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("image contains non-finite values")
    return u


def gradient(u):
    """Forward-difference gradient with replicated last row and column.

    Parameters
    ----------
    u : array_like, shape (m, n)

    Returns
    -------
    z : ndarray, shape (2, m, n)
        ``z[0, i, j] = u[i+1, j] - u[i, j]`` and ``z[1, i, j] = u[i, j+1] - u[i, j]``,
        zero where the neighbour falls outside the grid.
    """
    u = np.asarray(u, dtype=np.float64)
    z = np.zeros((2,) + u.shape)
    z[0, :-1, :] = u[1:, :] - u[:-1, :]
    z[1, :, :-1] = u[:, 1:] - u[:, :-1]
    return z


def divergence(z):
    """Backward-difference divergence, the negative adjoint of :func:`gradient`.

    ``z[0]`` is taken as zero on the (virtual) row before the first and on the
    last row; ``z[1]`` likewise for columns.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 3 or z.shape[0] != 2:
        raise ValueError(f"expected a vector field of shape (2, m, n), got {z.shape}")
    z1, z2 = z
    m, n = z1.shape
    d = np.zeros((m, n))
    if m > 1:
        d[0, :] = z1[0, :]
        d[1:-1, :] = z1[1:-1, :] - z1[:-2, :]
        d[-1, :] = -z1[-2, :]
    if n > 1:
        d[:, 0] += z2[:, 0]
        d[:, 1:-1] += z2[:, 1:-1] - z2[:, :-2]
        d[:, -1] -= z2[:, -2]
    return d


def pixel_norm(z):
    """Per-pixel Euclidean magnitude ``sqrt(z1**2 + z2**2)`` of a vector field."""
    return np.hypot(z[0], z[1])


def tv_norm(u):
    """Isotropic discrete total variation: sum of per-pixel gradient magnitudes."""
    return float(pixel_norm(gradient(u)).sum())


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def inner(a, b):
    """Euclidean inner product of two images or two vector fields."""
    a, b = _check_pair(a, b)
    return float(np.vdot(a, b))


def norm2(a):
    return float(np.sqrt(np.vdot(a, a)))


def norm1(a):
    return float(np.abs(a).sum())


def norm_inf(a):
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0
