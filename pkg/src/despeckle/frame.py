"""Undecimated separable wavelet tight frame and hard-thresholding.

The low-pass branch is the a trous cascade of the cubic B-spline filter
``[1, 4, 6, 4, 1] / 16`` (frequency response ``cos(w/2)**4``), dilated by
``2**j`` at level ``j``.  Writing ``a_j`` for the squared response of the 1-D
low-pass cascade after ``j`` levels and ``d_j = a_j - a_{j+1}``, level ``j``
carries three detail subbands with squared responses

    d_j(w0) a_{j+1}(w1),   a_{j+1}(w0) d_j(w1),   d_j(w0) d_j(w1)

and the coarsest approximation has ``a_J(w0) a_J(w1)``.  These telescope to
one at every frequency, so the frame is tight with constant ``c = scale**2``.
All responses are real and even, i.e. zero-phase filters, applied with
periodic boundaries through the FFT.

Coefficients are stored as one array of shape ``(n_subbands, m, n)``.
Subband 0 is always the approximation; details follow from the finest level
to the coarsest.
"""

from dataclasses import dataclass

import numpy as np

from .grid import tv_norm

__all__ = [
    "TightFrame",
    "IndexPartition",
    "hard_threshold",
    "threshold_reconstruct",
    "APPROX",
]

APPROX = 0
ORIENTATIONS = ("axis0", "axis1", "diagonal")


def _lowpass_1d(omega, j):
    """Response of one B3 a trous stage dilated by 2**j."""
    return np.cos(0.5 * (2.0**j) * omega) ** 4


class TightFrame:
    """Shift-invariant tight frame ``W`` with left inverse ``W~ = W.T / c``.

    Parameters
    ----------
    levels : int
        Number of decomposition levels ``J``; the frame has ``3 J + 1``
        subbands, each the size of the image.
    scale : float
        Global gain on every filter.  The frame constant is ``scale**2``;
        it is re-measured from a delta image at construction.
    """

    family = "b3-spline-undecimated"

    def __init__(self, levels=4, scale=1.0):
        if int(levels) != levels or levels < 1:
            raise ValueError(f"levels must be a positive integer, got {levels!r}")
        if not scale > 0:
            raise ValueError(f"scale must be positive, got {scale!r}")
        self.levels = int(levels)
        self.scale = float(scale)
        self._cache = {}
        self.c = self._measure_constant()

    def __repr__(self):
        return f"TightFrame(levels={self.levels}, scale={self.scale}, c={self.c:.12g})"

    @property
    def n_subbands(self):
        return 3 * self.levels + 1

    @property
    def labels(self):
        out = [("approx", self.levels, None)]
        for j in range(self.levels):
            out.extend(("detail", j + 1, o) for o in ORIENTATIONS)
        return out

    def coeff_shape(self, shape):
        return (self.n_subbands,) + tuple(shape)

    def _responses(self, shape):
        shape = tuple(shape)
        if shape not in self._cache:
            m, n = shape
            w0 = 2 * np.pi * np.fft.fftfreq(m)[:, None]
            w1 = 2 * np.pi * np.fft.rfftfreq(n)[None, :]
            # squared 1-D low-pass cascades a_0 .. a_J on each axis
            a0 = [np.ones_like(w0)]
            a1 = [np.ones_like(w1)]
            for j in range(self.levels):
                a0.append(a0[-1] * _lowpass_1d(w0, j) ** 2)
                a1.append(a1[-1] * _lowpass_1d(w1, j) ** 2)
            bands = [np.sqrt(a0[-1] * a1[-1])]
            for j in range(self.levels):
                d0 = a0[j] - a0[j + 1]
                d1 = a1[j] - a1[j + 1]
                bands.append(np.sqrt(d0 * a1[j + 1]))
                bands.append(np.sqrt(a0[j + 1] * d1))
                bands.append(np.sqrt(d0 * d1))
            self._cache[shape] = self.scale * np.stack(bands)
        return self._cache[shape]

    @property
    def reference_size(self):
        """Side of the periodic grid used to measure per-subband atom norms.

        Large enough that the coarsest atom does not wrap around.
        """
        return max(64, 2 ** (self.levels + 3))

    def atom_norms(self):
        """l2 norm of each subband's analysis atom, shape ``(S,)``.

        With white noise of std ``sigma`` in the image, coefficients in
        subband ``b`` have std ``sigma * atom_norms()[b]``.
        """
        if "atom_norms" not in self._cache:
            n = self.reference_size
            probe = np.zeros((n, n))
            probe[n // 2, n // 2] = 1.0
            self._cache["atom_norms"] = np.sqrt(np.sum(self.analyze(probe) ** 2, axis=(1, 2)))
        return self._cache["atom_norms"]

    def atom_tv_norms(self):
        """Total variation of each subband's synthesis atom ``W~ e_i``, shape ``(S,)``.

        A fidelity weight above this bound pins the coefficient to its data.
        """
        if "atom_tv" not in self._cache:
            n = self.reference_size
            out = np.empty(self.n_subbands)
            for b in range(self.n_subbands):
                x = np.zeros((self.n_subbands, n, n))
                x[b, n // 2, n // 2] = 1.0
                out[b] = tv_norm(self.synthesize(x))
            self._cache["atom_tv"] = out
        return self._cache["atom_tv"]

    def subband_thresholds(self, T):
        """Broadcastable per-subband thresholds ``T * atom_norms()``.

        ``T`` is expressed in units of the image-domain noise std, so every
        subband is cut at the same multiple of its own noise level.
        """
        return (float(T) * self.atom_norms())[:, None, None]

    def _measure_constant(self):
        probe = np.zeros((16, 16))
        probe[0, 0] = 1.0
        return float(np.sum(self.analyze(probe) ** 2))

    def analyze(self, u):
        """Frame analysis ``W u``; returns an array of shape ``(S, m, n)``."""
        u = np.asarray(u, dtype=np.float64)
        if u.ndim != 2:
            raise ValueError(f"expected a 2-D image, got shape {u.shape}")
        resp = self._responses(u.shape)
        return np.fft.irfft2(np.fft.rfft2(u)[None] * resp, s=u.shape, axes=(-2, -1))

    def adjoint(self, x):
        """Transpose ``W.T x`` (no normalization)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[0] != self.n_subbands:
            raise ValueError(
                f"expected coefficients of shape ({self.n_subbands}, m, n), got {x.shape}"
            )
        resp = self._responses(x.shape[1:])
        spec = np.sum(np.fft.rfft2(x, axes=(-2, -1)) * resp, axis=0)
        return np.fft.irfft2(spec, s=x.shape[1:])

    def synthesize(self, x):
        """Left inverse ``W~ x = W.T x / c``."""
        return self.adjoint(x) / self.c


@dataclass
class IndexPartition:
    """Boolean masks over the coefficient array.

    ``i_star`` marks the untouched approximation subband, ``i1`` the detail
    coefficients that survived the threshold and ``i0`` those that did not.
    """

    i_star: np.ndarray
    i1: np.ndarray
    i0: np.ndarray


def hard_threshold(y, T):
    """Zero every detail coefficient with ``|y| <= T``; keep the approximation.

    Returns the thresholded coefficients and the resulting partition.
    """
    if not np.all(np.asarray(T) >= 0):
        raise ValueError(f"threshold must be non-negative, got {T!r}")
    y = np.asarray(y, dtype=np.float64)
    i_star = np.zeros(y.shape, dtype=bool)
    i_star[APPROX] = True
    i1 = (np.abs(y) > T) & ~i_star
    i0 = ~(i1 | i_star)
    return np.where(i0, 0.0, y), IndexPartition(i_star=i_star, i1=i1, i0=i0)


def threshold_reconstruct(frame, y, T):
    """Synthesize the hard-thresholded coefficients ``y``."""
    y_th, _ = hard_threshold(y, T)
    return frame.synthesize(y_th)
