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
Forward model for the 2-D wave equation with an initial pressure.

The pressure induced by an initial pressure ``f`` (and zero initial velocity) is

.. math::

    p(x, t) = \\mathcal{F}^{-1}\\left[\\cos(t |\\xi|) \\hat{f}(\\xi)\\right](x).

:py:class:`KSpacePropagator` applies this cosine propagator on a periodic grid with
``scipy.fft``. Every requested time is computed directly from ``f``, so there is no
time-stepping error. :py:func:`kspaceSolution` embeds the ``[-1, 1]^2`` grid in a
zero-padded periodic box. The box is large enough that no periodic image of the source
reaches the window before the last requested time.

:py:func:`forwardOperator` samples the direction-dependent detector data

.. math::

    g(\\theta, t) = c_1 p(R\\theta, t) + c_2 \\langle \\theta, \\nabla p(R\\theta, t) \\rangle

on ``nTheta`` equispaced detectors. The gradient comes from central differences on the
grid; both traces are interpolated bilinearly to the detection circle.

Grids are node-centered: ``values[iy, ix]`` is the value at
``(x, y) = (-1 + ix * h, -1 + iy * h)`` with ``h = 2 / (n - 1)``.
"""
import numpy as np
from scipy import fft
from scipy import sparse

from armi import runLog
from armi.utils import codeTiming

from . import const
from .errors import ValidationError, SupportError, GeometryMismatchError

DEFAULT_GRID_POINTS = 280
DEFAULT_DETECTORS = 300
DEFAULT_TIME_SAMPLES = 1600
DEFAULT_FINAL_TIME = 6.0
DEFAULT_RADIUS = 1.0

#: Minimum ratio of padded box to window size along each axis.
MIN_PADDING_FACTOR = 2


class ScalarField2D:
    """
    A real function sampled on a square node-centered grid over ``[-1, 1]^2``.

    Parameters
    ----------
    values : array_like
        Square ``(n, n)`` array indexed ``[iy, ix]``, ``n >= 2``, all finite.
    metadata : dict, optional
        Free-form provenance carried through persistence.
    """

    def __init__(self, values, metadata=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 2:
            raise ValidationError(
                f"Field must be a square 2-D array of size >= 2, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("Field values must be finite")
        self.values = values
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return f"<ScalarField2D {self.nx}x{self.ny}>"

    def __eq__(self, other):
        if not isinstance(other, ScalarField2D):
            return NotImplemented
        return np.array_equal(self.values, other.values) and self.metadata == other.metadata

    @classmethod
    def zeros(cls, gridPoints):
        return cls(np.zeros((gridPoints, gridPoints)))

    @classmethod
    def fromFunction(cls, gridPoints, func):
        """Sample ``func(x, y)`` (vectorized over arrays) on a new grid."""
        axis = gridAxis(gridPoints)
        x, y = np.meshgrid(axis, axis, indexing="xy")
        return cls(func(x, y))

    @property
    def nx(self):
        return self.values.shape[1]

    @property
    def ny(self):
        return self.values.shape[0]

    @property
    def spacing(self):
        return 2.0 / (self.nx - 1)

    @property
    def axis(self):
        return gridAxis(self.nx)

    def coordinates(self):
        """Return ``(x, y)`` node coordinate arrays shaped like ``values``."""
        return np.meshgrid(self.axis, self.axis, indexing="xy")

    def radius(self):
        """Distance of every node from the origin."""
        x, y = self.coordinates()
        return np.hypot(x, y)

    def withValues(self, values):
        return ScalarField2D(values, self.metadata)

    def maxAbs(self):
        return float(np.abs(self.values).max())


class SensorData:
    """
    A sinogram ``g[m, n]`` from ``nTheta`` detectors at ``nT`` time samples.

    Detector ``m`` sits at angle ``2 pi m / nTheta`` on the circle of radius ``radius``;
    sample ``n`` is taken at ``t_n = finalTime * n / nT``. ``c1`` and ``c2`` record the data
    model that produced the samples.
    """

    def __init__(self, samples, radius, finalTime, c1, c2, metadata=None):
        samples = np.array(samples, dtype=float)
        if samples.ndim != 2 or min(samples.shape) < 1:
            raise ValidationError(f"Sinogram must be a non-empty 2-D array, got {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("Sinogram samples must be finite")
        if not radius > 0.0 or not finalTime > 0.0:
            raise ValidationError(
                f"Detection radius and final time must be positive, got R={radius}, T={finalTime}"
            )
        self.samples = samples
        self.radius = float(radius)
        self.finalTime = float(finalTime)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.metadata = dict(metadata or {})

    def __repr__(self):
        return (
            f"<SensorData {self.nTheta}x{self.nT} R={self.radius} T={self.finalTime} "
            f"c=({self.c1}, {self.c2})>"
        )

    def __eq__(self, other):
        if not isinstance(other, SensorData):
            return NotImplemented
        return (
            np.array_equal(self.samples, other.samples)
            and self.geometry() == other.geometry()
            and (self.c1, self.c2) == (other.c1, other.c2)
            and self.metadata == other.metadata
        )

    @property
    def nTheta(self):
        return self.samples.shape[0]

    @property
    def nT(self):
        return self.samples.shape[1]

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.nTheta) / self.nTheta

    @property
    def times(self):
        return self.finalTime * np.arange(self.nT) / self.nT

    @property
    def timeStep(self):
        return self.finalTime / self.nT

    def geometry(self):
        return (self.nTheta, self.nT, self.radius, self.finalTime)

    def normL2(self):
        """Root-mean-square of the samples, the normalized l2 norm of the sinogram."""
        return float(np.sqrt(np.mean(self.samples**2)))

    def withSamples(self, samples, metadata=None):
        """Copy geometry and data model onto new samples."""
        merged = dict(self.metadata)
        merged.update(metadata or {})
        return SensorData(samples, self.radius, self.finalTime, self.c1, self.c2, merged)

    def truncated(self, nT):
        """Keep the first ``nT`` time samples; the final time shrinks accordingly."""
        if not 1 <= nT <= self.nT:
            raise GeometryMismatchError(
                f"Cannot keep {nT} time samples of a sinogram with {self.nT} samples"
            )
        if nT == self.nT:
            return self
        return SensorData(
            self.samples[:, :nT],
            self.radius,
            self.finalTime * nT / self.nT,
            self.c1,
            self.c2,
            self.metadata,
        )


def gridAxis(gridPoints):
    return np.linspace(-1.0, 1.0, gridPoints)


def checkSupport(field, supportRadius=const.SUPPORT_RADIUS):
    """
    Reject fields with values beyond ``supportRadius``.

    Values below ``SUPPORT_TOLERANCE`` times the field maximum are treated as zero.
    """
    peak = field.maxAbs()
    if peak == 0.0:
        return
    outside = field.radius() > supportRadius
    if not outside.any():
        return
    leak = float(np.abs(field.values[outside]).max())
    if leak > const.SUPPORT_TOLERANCE * peak:
        raise SupportError(
            f"Field has values up to {leak:.3e} (peak {peak:.3e}) outside radius "
            f"{supportRadius}; move or shrink the source so the periodic solver does not alias"
        )


def paddedPoints(gridPoints, spacing, finalTime):
    """
    Size of the periodic box holding a window of ``gridPoints`` nodes.

    A periodic image of a source supported in ``SUPPORT_RADIUS`` needs longer than
    ``L - 1 - SUPPORT_RADIUS`` to reach the window, so the box length ``L`` must exceed
    ``finalTime + 1 + SUPPORT_RADIUS``.
    """
    needed = int(np.floor((finalTime + 1.0 + const.SUPPORT_RADIUS) / spacing)) + 2
    return fft.next_fast_len(max(MIN_PADDING_FACTOR * gridPoints, needed), real=True)


class KSpacePropagator:
    """
    Exact cosine propagator on a periodic square grid.

    Parameters
    ----------
    values : numpy.ndarray
        Initial pressure on the periodic grid.
    spacing : float
        Grid spacing, identical along both axes.
    workers : int, optional
        Passed to ``scipy.fft`` to cap FFT threads.
    """

    def __init__(self, values, spacing, workers=None):
        values = np.asarray(values, dtype=float)
        self.shape = values.shape
        self.workers = workers
        self._spectrum = fft.rfft2(values, workers=workers)
        ky = 2.0 * np.pi * fft.fftfreq(self.shape[0], d=spacing)
        kx = 2.0 * np.pi * fft.rfftfreq(self.shape[1], d=spacing)
        self._wavenumber = np.sqrt(ky[:, None] ** 2 + kx[None, :] ** 2)

    def pressure(self, time):
        """Return ``p(., time)`` on the periodic grid."""
        return fft.irfft2(
            np.cos(time * self._wavenumber) * self._spectrum, s=self.shape, workers=self.workers
        )


class PaddedPropagator:
    """Propagate a field of the ``[-1, 1]^2`` window inside a zero-padded periodic box."""

    def __init__(self, field, finalTime, workers=None):
        n = field.nx
        self.gridPoints = n
        self.boxPoints = paddedPoints(n, field.spacing, finalTime)
        self.offset = (self.boxPoints - n) // 2
        box = np.zeros((self.boxPoints, self.boxPoints))
        box[self.window] = field.values
        runLog.extra(
            f"Propagating {n}x{n} field in a {self.boxPoints}x{self.boxPoints} periodic box "
            f"up to t = {finalTime}"
        )
        self._propagator = KSpacePropagator(box, field.spacing, workers)

    @property
    def window(self):
        span = slice(self.offset, self.offset + self.gridPoints)
        return (span, span)

    def snapshot(self, time):
        return self._propagator.pressure(time)[self.window]


def _validateTimes(times):
    times = np.asarray(times, dtype=float).ravel()
    if not np.all(np.isfinite(times)) or (times.size and times.min() < 0.0):
        raise ValidationError("Snapshot times must be finite and non-negative")
    if np.any(np.diff(times) < 0.0):
        raise ValidationError("Snapshot times must be increasing")
    return times


def kspaceSolution(field, times, workers=None):
    """
    Pressure snapshots of the wave started by ``field`` at each requested time.

    Parameters
    ----------
    field : ScalarField2D
        Initial pressure, supported inside ``SUPPORT_RADIUS``.
    times : sequence of float
        Increasing, non-negative times.
    workers : int, optional
        FFT worker cap.

    Returns
    -------
    list of ScalarField2D
        One snapshot per time, on the grid of ``field``.
    """
    times = _validateTimes(times)
    checkSupport(field)
    if times.size == 0:
        return []
    propagator = PaddedPropagator(field, float(times.max()), workers)
    return [ScalarField2D(propagator.snapshot(t)) for t in times]


def detectorPositions(nTheta, radius):
    angles = 2.0 * np.pi * np.arange(nTheta) / nTheta
    return radius * np.cos(angles), radius * np.sin(angles)


def bilinearSampler(axis, x, y):
    """
    Sparse matrix interpolating a field on the square grid ``axis x axis`` at points.

    Row ``i`` holds the bilinear weights of point ``(x[i], y[i])`` against the raveled
    ``values[iy, ix]`` array. Points must lie inside the grid.
    """
    n = axis.size
    h = axis[1] - axis[0]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) > axis[-1] + 1e-12) or np.any(np.abs(y) > axis[-1] + 1e-12):
        raise GeometryMismatchError("Interpolation points must lie inside the grid")
    fx = (x - axis[0]) / h
    fy = (y - axis[0]) / h
    ix = np.clip(np.floor(fx).astype(int), 0, n - 2)
    iy = np.clip(np.floor(fy).astype(int), 0, n - 2)
    wx = fx - ix
    wy = fy - iy

    rows = np.repeat(np.arange(x.size), 4)
    cols = np.stack(
        [iy * n + ix, iy * n + ix + 1, (iy + 1) * n + ix, (iy + 1) * n + ix + 1], axis=1
    )
    weights = np.stack(
        [(1 - wx) * (1 - wy), wx * (1 - wy), (1 - wx) * wy, wx * wy], axis=1
    )
    return sparse.csr_matrix((weights.ravel(), (rows, cols.ravel())), shape=(x.size, n * n))


def _validateSampling(nTheta, nT, finalTime, radius):
    for name, value in (("nTheta", nTheta), ("nT", nT)):
        if int(value) != value or value < 1:
            raise ValidationError(f"{name} must be a positive integer, got {value}")
    if not finalTime > 0.0:
        raise ValidationError(f"Final time must be positive, got {finalTime}")
    if not 0.0 < radius <= 1.0:
        raise ValidationError(f"Detection radius must be within (0, 1], got {radius}")


@codeTiming.timed
def boundaryTraces(
    field,
    nTheta=DEFAULT_DETECTORS,
    nT=DEFAULT_TIME_SAMPLES,
    finalTime=DEFAULT_FINAL_TIME,
    radius=DEFAULT_RADIUS,
    workers=None,
):
    """
    Pressure and outward normal derivative of the pressure at every detector and time.

    Returns
    -------
    pressure, normalDerivative : numpy.ndarray
        Arrays of shape ``(nTheta, nT)``.
    """
    _validateSampling(nTheta, nT, finalTime, radius)
    checkSupport(field)
    nTheta = int(nTheta)
    nT = int(nT)

    x, y = detectorPositions(nTheta, radius)
    sampler = bilinearSampler(field.axis, x, y)
    cosTheta = x / radius
    sinTheta = y / radius

    propagator = PaddedPropagator(field, finalTime, workers)
    times = finalTime * np.arange(nT) / nT
    pressure = np.empty((nTheta, nT))
    normal = np.empty((nTheta, nT))
    h = field.spacing
    report = max(1, nT // 10)
    for n, t in enumerate(times):
        p = propagator.snapshot(t)
        dpdy, dpdx = np.gradient(p, h)
        pressure[:, n] = sampler @ p.ravel()
        normal[:, n] = cosTheta * (sampler @ dpdx.ravel()) + sinTheta * (sampler @ dpdy.ravel())
        if n % report == 0:
            runLog.debug(f"Sampled boundary traces up to t = {t:.4f} ({n + 1}/{nT})")
    return pressure, normal


def forwardOperator(
    field,
    c1,
    c2,
    nTheta=DEFAULT_DETECTORS,
    nT=DEFAULT_TIME_SAMPLES,
    finalTime=DEFAULT_FINAL_TIME,
    radius=DEFAULT_RADIUS,
    workers=None,
):
    """
    Simulate the sinogram ``c1 * p + c2 * d_n p`` on the detection circle.

    Parameters
    ----------
    field : ScalarField2D
        Initial pressure, supported inside ``SUPPORT_RADIUS``.
    c1, c2 : float
        Weights of the pressure and of its outward normal derivative.
    nTheta, nT : int
        Detector and time-sample counts.
    finalTime : float
        Measurement time ``T``.
    radius : float
        Detection radius ``R``, at most 1 so the circle lies on the grid.
    workers : int, optional
        FFT worker cap.

    Returns
    -------
    SensorData

    See Also
    --------
    combineTraces : build sinograms for other weights from the same traces.
    """
    pressure, normal = boundaryTraces(field, nTheta, nT, finalTime, radius, workers)
    return combineTraces(pressure, normal, c1, c2, finalTime, radius)


def combineTraces(pressure, normal, c1, c2, finalTime, radius=DEFAULT_RADIUS):
    """Weighted sum of boundary traces as a sinogram."""
    return SensorData(c1 * pressure + c2 * normal, radius, finalTime, c1, c2)
