# Copyright 2022 TerraPower, LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Angular harmonics of sinograms and their time transforms at scaled Bessel roots.

Angular coefficients use the orthonormal convention

.. math::

    g_k(t) = \\frac{1}{\\sqrt{2\\pi}} \\int_0^{2\\pi} g(\\theta, t) e^{-ik\\theta} d\\theta
    \\approx \\frac{\\sqrt{2\\pi}}{N_\\theta} \\sum_m g(\\theta_m, t) e^{-ik\\theta_m}

for ``k = -N/2 .. N/2 - 1``. Time transforms are rectangle-rule sums over the
measurement grid ``t_n = T n / N_t``:

.. math::

    C\\{g_k\\}(\\lambda) = \\frac{T}{N_t} \\sum_n g_k(t_n) \\cos(\\lambda t_n), \\qquad
    S\\{t g_k\\}(\\lambda) = \\frac{T}{N_t} \\sum_n t_n g_k(t_n) \\sin(\\lambda t_n).

Both are evaluated at ``lambda = w[j, |k|] / R`` for the reconstruction, with one dense
kernel matrix per ``|k|`` shared by the orders ``+k`` and ``-k``.
"""
import functools

import numpy as np
from scipy import fft

from armi import runLog
from armi.utils import codeTiming

from .errors import ValidationError, GeometryMismatchError
from .specfun import besselJ

COSINE = "cosine"
SINE_T = "sineT"

#: Kernel bytes kept per :py:class:`TransformKernels` before blocks are recomputed.
KERNEL_CACHE_BYTES = 512 * 1024**2

_FREQUENCY_CHUNK = 512


class HarmonicSpectrum:
    """
    Angular Fourier coefficients of a sinogram.

    ``coeffs[i, n]`` is the coefficient of order ``orders[i]`` at time sample ``n``.
    """

    def __init__(self, coeffs, orders, finalTime, radius):
        coeffs = np.asarray(coeffs, dtype=complex)
        orders = np.asarray(orders, dtype=int)
        if coeffs.ndim != 2 or coeffs.shape[0] != orders.size:
            raise ValidationError(
                f"Coefficient array {coeffs.shape} does not match {orders.size} orders"
            )
        self.coeffs = coeffs
        self.orders = orders
        self.finalTime = float(finalTime)
        self.radius = float(radius)

    def __repr__(self):
        return f"<HarmonicSpectrum orders {self.orders.min()}..{self.orders.max()} nT={self.nT}>"

    @property
    def nT(self):
        return self.coeffs.shape[1]

    @property
    def times(self):
        return self.finalTime * np.arange(self.nT) / self.nT

    @property
    def maxOrder(self):
        """Largest absolute order held."""
        return int(np.abs(self.orders).max())

    def column(self, order):
        """Time series of one angular order."""
        index = np.flatnonzero(self.orders == order)
        if index.size == 0:
            raise ValidationError(f"Order {order} is not in {self}")
        return self.coeffs[index[0]]

    def restricted(self, maxOrder):
        """Spectrum holding only the orders with ``|k| <= maxOrder``."""
        keep = np.abs(self.orders) <= maxOrder
        return HarmonicSpectrum(self.coeffs[keep], self.orders[keep], self.finalTime, self.radius)

    def orderGroups(self):
        """Yield ``(m, rows)`` with the row indices of the orders ``+m`` and ``-m``."""
        absolute = np.abs(self.orders)
        for m in np.unique(absolute):
            yield int(m), np.flatnonzero(absolute == m)


class SpectralCoefficients:
    """
    A time transform of a spectrum at the scaled roots ``w[j, |k|] / R``.

    ``values[j, i]`` belongs to root ``j + 1`` of the order ``orders[i]``.
    """

    def __init__(self, values, orders, kind):
        self.values = np.asarray(values, dtype=complex)
        self.orders = np.asarray(orders, dtype=int)
        self.kind = kind

    def __repr__(self):
        return f"<SpectralCoefficients {self.kind} {self.values.shape}>"

    @property
    def rootsPerOrder(self):
        return self.values.shape[0]


def angularDecompose(data):
    """
    Angular Fourier coefficients of a sinogram.

    Parameters
    ----------
    data : SensorData
        Sinogram with an even number of detectors.

    Returns
    -------
    HarmonicSpectrum
        Orders ``-nTheta/2 .. nTheta/2 - 1``.
    """
    nTheta = data.nTheta
    if nTheta % 2:
        raise ValidationError(f"Angular decomposition needs an even detector count, got {nTheta}")
    coeffs = fft.fftshift(fft.fft(data.samples, axis=0), axes=0) * (np.sqrt(2.0 * np.pi) / nTheta)
    orders = np.arange(-nTheta // 2, nTheta // 2)
    return HarmonicSpectrum(coeffs, orders, data.finalTime, data.radius)


def synthesize(spectrum):
    """
    Sinogram samples from a full spectrum made by :py:func:`angularDecompose`.

    Returns
    -------
    numpy.ndarray
        Real array of shape ``(nTheta, nT)``.
    """
    nTheta = spectrum.orders.size
    expected = np.arange(-nTheta // 2, nTheta // 2)
    if nTheta % 2 or not np.array_equal(spectrum.orders, expected):
        raise ValidationError("Synthesis needs the full order range of an angular decomposition")
    samples = fft.ifft(fft.ifftshift(spectrum.coeffs, axes=0), axis=0)
    return np.real(samples) * (nTheta / np.sqrt(2.0 * np.pi))


class TransformKernels:
    """
    Dense time-transform kernels at the scaled roots of each order.

    ``cosine(m)[j, n] = (T / N_t) cos(w[j, m] t_n / R)`` and
    ``sineT(m)[j, n] = (T / N_t) t_n sin(w[j, m] t_n / R)``. Blocks are built on first use
    and kept while the cache stays under ``maxBytes``.
    """

    def __init__(self, roots, radius, finalTime, nT, rootsPerOrder, maxBytes=KERNEL_CACHE_BYTES):
        self.roots = roots
        self.radius = radius
        self.finalTime = finalTime
        self.nT = nT
        self.rootsPerOrder = rootsPerOrder
        self.maxBytes = maxBytes
        self.times = finalTime * np.arange(nT) / nT
        self.weight = finalTime / nT
        self._blocks = {}
        self._cachedBytes = 0

    def __repr__(self):
        return (
            f"<TransformKernels R={self.radius} T={self.finalTime} nT={self.nT} "
            f"roots={self.rootsPerOrder} cached={self._cachedBytes // 1024**2} MiB>"
        )

    def cosine(self, order):
        return self._block(COSINE, abs(order))

    def sineT(self, order):
        return self._block(SINE_T, abs(order))

    def _block(self, kind, order):
        key = (kind, order)
        block = self._blocks.get(key)
        if block is not None:
            return block
        phase = np.outer(self.roots.forOrder(order, self.rootsPerOrder) / self.radius, self.times)
        if kind == COSINE:
            block = self.weight * np.cos(phase)
        else:
            block = (self.weight * self.times) * np.sin(phase)
        block.setflags(write=False)
        if self._cachedBytes + block.nbytes <= self.maxBytes:
            self._blocks[key] = block
            self._cachedBytes += block.nbytes
        return block


@functools.lru_cache(maxsize=4)
def transformKernels(roots, radius, finalTime, nT, rootsPerOrder):
    """Shared kernels for one (root table, time grid) pair."""
    runLog.debug(
        f"Creating transform kernels for R={radius}, T={finalTime}, nT={nT}, "
        f"{rootsPerOrder} roots per order"
    )
    return TransformKernels(roots, radius, finalTime, nT, rootsPerOrder)


def _resolveGeometry(spectrum, roots, radius, finalTime, rootsPerOrder):
    radius = spectrum.radius if radius is None else float(radius)
    finalTime = spectrum.finalTime if finalTime is None else float(finalTime)
    if not radius > 0.0 or not finalTime > 0.0:
        raise ValidationError(
            f"Radius and final time must be positive, got R={radius}, T={finalTime}"
        )
    if not np.isclose(finalTime, spectrum.finalTime, rtol=1e-12, atol=0.0):
        raise GeometryMismatchError(
            f"Transform time window T={finalTime} does not match the spectrum "
            f"({spectrum.finalTime})"
        )
    rootsPerOrder = roots.rootsPerOrder if rootsPerOrder is None else int(rootsPerOrder)
    if not roots.covers(spectrum.maxOrder, rootsPerOrder):
        raise ValidationError(
            f"{roots} is missing roots for orders up to {spectrum.maxOrder} "
            f"with {rootsPerOrder} roots each"
        )
    return radius, finalTime, rootsPerOrder


def _atRoots(kind, spectrum, roots, radius, finalTime, rootsPerOrder):
    radius, finalTime, rootsPerOrder = _resolveGeometry(
        spectrum, roots, radius, finalTime, rootsPerOrder
    )
    kernels = transformKernels(roots, radius, finalTime, spectrum.nT, rootsPerOrder)
    values = np.empty((rootsPerOrder, spectrum.orders.size), dtype=complex)
    for m, rows in spectrum.orderGroups():
        block = kernels.cosine(m) if kind == COSINE else kernels.sineT(m)
        values[:, rows] = block @ spectrum.coeffs[rows].T
    return SpectralCoefficients(values, spectrum.orders, kind)


@codeTiming.timed
def cosineAtRoots(spectrum, roots, radius=None, finalTime=None, rootsPerOrder=None):
    """
    Discrete cosine transform of each order at ``w[j, |k|] / R``.

    Parameters
    ----------
    spectrum : HarmonicSpectrum
    roots : BesselRootTable
        Must cover every ``|k|`` of the spectrum.
    radius, finalTime : float, optional
        Detection radius and time window; default to the spectrum's.
    rootsPerOrder : int, optional
        Number of roots used per order; defaults to the whole table.

    Returns
    -------
    SpectralCoefficients
    """
    return _atRoots(COSINE, spectrum, roots, radius, finalTime, rootsPerOrder)


@codeTiming.timed
def sineTWeightedAtRoots(spectrum, roots, radius=None, finalTime=None, rootsPerOrder=None):
    """
    Discrete time-weighted sine transform of each order at ``w[j, |k|] / R``.

    See Also
    --------
    cosineAtRoots : same arguments and layout.
    """
    return _atRoots(SINE_T, spectrum, roots, radius, finalTime, rootsPerOrder)


def _atFrequencies(kind, spectrum, frequencies):
    frequencies = np.asarray(frequencies, dtype=float).ravel()
    if not np.all(np.isfinite(frequencies)):
        raise ValidationError("Frequencies must be finite")
    times = spectrum.times
    weight = spectrum.finalTime / spectrum.nT
    out = np.empty((spectrum.orders.size, frequencies.size), dtype=complex)
    for start in range(0, frequencies.size, _FREQUENCY_CHUNK):
        chunk = frequencies[start : start + _FREQUENCY_CHUNK]
        phase = np.outer(times, chunk)
        kernel = weight * (np.cos(phase) if kind == COSINE else times[:, None] * np.sin(phase))
        out[:, start : start + chunk.size] = spectrum.coeffs @ kernel
    return out


def cosineTransform(spectrum, frequencies):
    """
    Discrete cosine transform of every order at arbitrary frequencies.

    Returns
    -------
    numpy.ndarray
        Complex array of shape ``(len(orders), len(frequencies))``.
    """
    return _atFrequencies(COSINE, spectrum, frequencies)


def sineTWeightedTransform(spectrum, frequencies):
    """Discrete time-weighted sine transform of every order at arbitrary frequencies."""
    return _atFrequencies(SINE_T, spectrum, frequencies)


def lemmaCosineTransform(radialTransform, frequencies, c1, c2, radius=1.0):
    """
    Continuum cosine transform of the zeroth angular harmonic of radially symmetric data.

    For a radial initial pressure with Fourier transform
    ``F(lam) = int f(x) exp(-i x.xi) dx = 2 pi int_0^inf f(r) J_0(lam r) r dr``, the zeroth
    harmonic of ``c1 p + c2 d_r p`` on the circle of radius ``R`` has the cosine transform

    .. math::

        \\frac{\\pi}{2\\sqrt{2\\pi}}\\, \\lambda F(\\lambda)
        \\left[c_1 J_0(R\\lambda) - c_2 \\lambda J_1(R\\lambda)\\right]

    once the measurement window has captured the whole signal.

    Parameters
    ----------
    radialTransform : callable
        ``F(lam)``, vectorized.
    frequencies : array_like
    c1, c2, radius : float

    Returns
    -------
    numpy.ndarray
    """
    lam = np.asarray(frequencies, dtype=float)
    bracket = c1 * besselJ(0, radius * lam) - c2 * lam * besselJ(1, radius * lam)
    return 0.5 * np.pi / np.sqrt(2.0 * np.pi) * lam * radialTransform(lam) * bracket
