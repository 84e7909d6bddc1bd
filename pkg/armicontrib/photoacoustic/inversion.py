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
Series inversion of circular photoacoustic data.

The initial pressure is expanded in Fourier-Bessel modes of the detection disk. Its
coefficients are read off the time transforms of the angular harmonics of the data at
the scaled roots ``w[j, |k|] / R``:

Formula A, from the cosine transform, needs ``c2 != 0``:

.. math::

    f(\\rho, \\varphi) = -\\frac{4}{\\pi\\sqrt{2\\pi}\\, c_2} \\sum_k \\sum_j
    \\frac{C\\{g_k\\}(w_{j,|k|}/R)\\, J_{|k|}(w_{j,|k|}\\rho/R)}
    {w_{j,|k|}^2 J_{|k|+1}(w_{j,|k|})^3} e^{ik\\varphi}

Formula B, from the time-weighted sine transform, needs ``c1 != 0``:

.. math::

    f(\\rho, \\varphi) = \\frac{4}{\\pi\\sqrt{2\\pi}\\, c_1 R^2} \\sum_k \\sum_j
    \\frac{S\\{t g_k\\}(w_{j,|k|}/R)\\, J_{|k|}(w_{j,|k|}\\rho/R)}
    {w_{j,|k|} J_{|k|+1}(w_{j,|k|})^3} e^{ik\\varphi}

Formula A carries a minus sign because ``d_n p`` is the outward normal derivative. Formula
B is exact for pure pressure data (``c2 = 0``); any ``c2 != 0`` leaves a systematic bias.

The image is first synthesized on a polar grid (``gridPoints // 2 + 1`` radii, angles a
multiple of the detector count) and then resampled bilinearly to the Cartesian grid.

:py:func:`rangeResidual` measures how far the cosine transforms are from vanishing at the
roots, which they do for exact pressure data.
"""
import functools

import numpy as np
from scipy import fft
from scipy import interpolate

from armi import runLog
from armi.utils import codeTiming

from . import const
from . import harmonics
from .const import Formula
from .errors import (
    ValidationError,
    GeometryMismatchError,
    NumericalError,
    ImaginaryResidueError,
)
from .specfun import besselJ
from .wavesim import ScalarField2D, gridAxis

DEFAULT_ROOTS_PER_ORDER = 180
DEFAULT_GRID_POINTS = 280

#: Reference frequencies for the range residual are spaced ``pi / (factor * T)`` apart.
REFERENCE_SPACING_FACTOR = 4.0

_PREFACTOR = 4.0 / (np.pi * np.sqrt(2.0 * np.pi))


class ReconstructionConfig:
    """
    Settings of one series inversion.

    Parameters
    ----------
    formula : Formula or str
    c1, c2 : float
        The data model the inversion assumes. Formula A divides by ``c2``, formula B by ``c1``.
    rootsPerOrder : int
        Roots ``N_r`` used per angular order.
    gridPoints : int
        Side of the square output grid over ``[-1, 1]^2``.
    radius : float
        Detection radius the data must match.
    timeSamples : int, optional
        Use only this many leading time samples of the data.
    """

    def __init__(
        self,
        formula,
        c1,
        c2,
        rootsPerOrder=DEFAULT_ROOTS_PER_ORDER,
        gridPoints=DEFAULT_GRID_POINTS,
        radius=1.0,
        timeSamples=None,
    ):
        self.formula = formula if isinstance(formula, Formula) else Formula.fromSetting(formula)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.rootsPerOrder = int(rootsPerOrder)
        self.gridPoints = int(gridPoints)
        self.radius = float(radius)
        self.timeSamples = None if timeSamples is None else int(timeSamples)
        self._validate()

    def _validate(self):
        if self.formula is Formula.A and self.c2 == 0.0:
            raise ValidationError("Formula A needs a non-zero normal-derivative weight c2")
        if self.formula is Formula.B and self.c1 == 0.0:
            raise ValidationError("Formula B needs a non-zero pressure weight c1")
        if self.rootsPerOrder < 1:
            raise ValidationError(f"rootsPerOrder must be positive, got {self.rootsPerOrder}")
        if self.gridPoints < 2:
            raise ValidationError(f"gridPoints must be at least 2, got {self.gridPoints}")
        if not self.radius > 0.0:
            raise ValidationError(f"Detection radius must be positive, got {self.radius}")
        if self.timeSamples is not None and self.timeSamples < 1:
            raise ValidationError(f"timeSamples must be positive, got {self.timeSamples}")

    def _key(self):
        return (
            self.formula,
            self.c1,
            self.c2,
            self.rootsPerOrder,
            self.gridPoints,
            self.radius,
            self.timeSamples,
        )

    def __eq__(self, other):
        if not isinstance(other, ReconstructionConfig):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (
            f"<ReconstructionConfig formula {self.formula.value} assuming c=({self.c1}, "
            f"{self.c2}), Nr={self.rootsPerOrder}, grid={self.gridPoints}>"
        )

    @classmethod
    def assuming(cls, formula, c1, c2, **kwargs):
        """
        Config for a formula that assumes the data model ``(c1, c2)``.

        A zero divisor weight in the data model is replaced by 1, the value a mismatched
        study assumes when the formula does not fit the data.
        """
        formula = formula if isinstance(formula, Formula) else Formula.fromSetting(formula)
        if formula is Formula.A:
            return cls(formula, c1, c2 or 1.0, **kwargs)
        return cls(formula, c1 or 1.0, c2, **kwargs)


class SeriesInverter:
    """
    Reusable inversion for one configuration, root table and detector count.

    Radial kernels ``J_m(w[j, m] rho) * weight[j, m]`` are built once per order and kept,
    so repeated inversions (noise sweeps, formula comparisons) only pay for the
    transforms and the synthesis.
    """

    def __init__(self, config, roots, nTheta):
        if nTheta % 2:
            raise ValidationError(f"Inversion needs an even detector count, got {nTheta}")
        self.config = config
        self.roots = roots
        self.nTheta = nTheta
        self.maxOrder = nTheta // 2
        if not roots.covers(self.maxOrder, config.rootsPerOrder):
            raise ValidationError(
                f"{roots} does not cover orders up to {self.maxOrder} with "
                f"{config.rootsPerOrder} roots each"
            )
        self.rho = np.linspace(0.0, 1.0, config.gridPoints // 2 + 1)
        self.nAngles = nTheta * max(1, int(np.ceil(4.0 * config.gridPoints / nTheta)))
        self.angles = 2.0 * np.pi * np.arange(self.nAngles) / self.nAngles
        self._radial = {}
        self._cartesian = None

    def __repr__(self):
        return f"<SeriesInverter {self.config} nTheta={self.nTheta}>"

    def radialKernel(self, order):
        """Weighted radial modes of one order, shape ``(len(rho), rootsPerOrder)``."""
        m = abs(int(order))
        kernel = self._radial.get(m)
        if kernel is not None:
            return kernel
        w = self.roots.forOrder(m, self.config.rootsPerOrder)
        denominator = besselJ(m + 1, w)
        if np.any(np.abs(denominator) <= const.WEIGHT_DENOMINATOR_FLOOR):
            raise NumericalError(
                f"|J_{m + 1}| at a root of J_{m} is below {const.WEIGHT_DENOMINATOR_FLOOR}; "
                "the root table is corrupt"
            )
        if self.config.formula is Formula.A:
            weights = 1.0 / (w**2 * denominator**3)
        else:
            weights = 1.0 / (w * denominator**3)
        kernel = besselJ(m, np.outer(self.rho, w)) * weights
        kernel.setflags(write=False)
        self._radial[m] = kernel
        return kernel

    def prefactor(self):
        if self.config.formula is Formula.A:
            return -_PREFACTOR / self.config.c2
        return _PREFACTOR / (self.config.c1 * self.config.radius**2)

    def prepare(self, data):
        """Check geometry and apply the time-sample prefix."""
        if data.nTheta != self.nTheta:
            raise GeometryMismatchError(
                f"Data has {data.nTheta} detectors but the inverter was built for {self.nTheta}"
            )
        if not np.isclose(data.radius, self.config.radius, rtol=1e-12, atol=0.0):
            raise GeometryMismatchError(
                f"Data detection radius {data.radius} differs from the configured "
                f"{self.config.radius}"
            )
        if self.config.timeSamples is not None:
            if self.config.timeSamples > data.nT:
                raise GeometryMismatchError(
                    f"Requested {self.config.timeSamples} time samples but data has {data.nT}"
                )
            data = data.truncated(self.config.timeSamples)
        return data

    @codeTiming.timed
    def polar(self, data):
        """
        Reconstruct on the polar grid.

        Returns
        -------
        numpy.ndarray
            Real array of shape ``(len(rho), nAngles)``; column ``l`` is the angle
            ``2 pi l / nAngles``.
        """
        data = self.prepare(data)
        spectrum = harmonics.angularDecompose(data)
        transform = (
            harmonics.cosineAtRoots
            if self.config.formula is Formula.A
            else harmonics.sineTWeightedAtRoots
        )
        coefficients = transform(
            spectrum, self.roots, self.config.radius, rootsPerOrder=self.config.rootsPerOrder
        )
        radial = np.empty((self.rho.size, spectrum.orders.size), dtype=complex)
        for m, rows in spectrum.orderGroups():
            radial[:, rows] = self.radialKernel(m) @ coefficients.values[:, rows]
        return self.prefactor() * self._angularSynthesis(radial, spectrum.orders)

    def _angularSynthesis(self, radial, orders):
        """Sum ``radial[:, i] exp(i orders[i] phi)``; the Nyquist order is split symmetrically."""
        full = np.zeros((self.rho.size, self.nAngles), dtype=complex)
        nyquist = -self.nTheta // 2
        for i, k in enumerate(orders):
            if k == nyquist:
                full[:, k % self.nAngles] += 0.5 * radial[:, i]
                full[:, -k % self.nAngles] += 0.5 * radial[:, i]
            else:
                full[:, k % self.nAngles] += radial[:, i]
        image = fft.ifft(full, axis=1) * self.nAngles

        realNorm = np.linalg.norm(image.real)
        imagNorm = np.linalg.norm(image.imag)
        if imagNorm > const.IMAGINARY_RESIDUE_LIMIT * max(realNorm, np.finfo(float).tiny):
            raise ImaginaryResidueError(
                f"Reconstruction has imaginary residue {imagNorm:.3e} against real norm "
                f"{realNorm:.3e}"
            )
        if imagNorm > 0.1 * const.IMAGINARY_RESIDUE_LIMIT * realNorm:
            runLog.warning(
                f"Reconstruction imaginary residue {imagNorm:.3e} is close to the limit "
                f"(real norm {realNorm:.3e})"
            )
        return image.real

    def cartesian(self, polarValues):
        """Resample a polar image to the output grid; points outside the disk are zero."""
        if self._cartesian is None:
            self._cartesian = self._cartesianPoints()
        inside, points = self._cartesian
        phi = np.append(self.angles, 2.0 * np.pi)
        extended = np.concatenate([polarValues, polarValues[:, :1]], axis=1)
        interpolator = interpolate.RegularGridInterpolator((self.rho, phi), extended)
        values = np.zeros((self.config.gridPoints, self.config.gridPoints))
        values[inside] = interpolator(points)
        return ScalarField2D(values)

    def _cartesianPoints(self):
        axis = gridAxis(self.config.gridPoints)
        x, y = np.meshgrid(axis, axis, indexing="xy")
        rho = np.hypot(x, y) / self.config.radius
        inside = rho <= 1.0
        phi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
        return inside, np.column_stack([rho[inside], phi[inside]])

    def invert(self, data):
        field = self.cartesian(self.polar(data))
        field.metadata.update(
            {
                "formula": self.config.formula.value,
                "assumedC1": self.config.c1,
                "assumedC2": self.config.c2,
                "rootsPerOrder": self.config.rootsPerOrder,
            }
        )
        return field


@functools.lru_cache(maxsize=4)
def seriesInverter(config, roots, nTheta):
    """Shared inverter so radial kernels survive across calls."""
    runLog.extra(f"Preparing series inverter for {config} with {nTheta} detectors")
    return SeriesInverter(config, roots, nTheta)


@codeTiming.timed
def invert(data, config, roots):
    """
    Reconstruct the initial pressure from a sinogram.

    Parameters
    ----------
    data : SensorData
    config : ReconstructionConfig
    roots : BesselRootTable
        Must cover orders up to ``data.nTheta // 2`` with ``config.rootsPerOrder`` roots.

    Returns
    -------
    ScalarField2D
        The reconstruction on ``config.gridPoints`` nodes per side.

    Raises
    ------
    ValidationError
        For odd detector counts, missing roots or a zero divisor weight.
    GeometryMismatchError
        When the data radius or sample count disagrees with ``config``.
    NumericalError
        For vanishing weight denominators or a complex-valued synthesis.
    """
    return seriesInverter(config, roots, data.nTheta).invert(data)


def invertPolar(data, config, roots):
    """Reconstruction on the polar grid, before Cartesian resampling."""
    return seriesInverter(config, roots, data.nTheta).polar(data)


def referenceFrequencies(finalTime, maxFrequency):
    """Uniform frequencies in ``(0, maxFrequency]`` fine enough to resolve data transforms."""
    step = np.pi / (REFERENCE_SPACING_FACTOR * finalTime)
    count = max(1, int(np.ceil(maxFrequency / step)))
    return step * np.arange(1, count + 1)


@codeTiming.timed
def rangeResidual(data, roots):
    """
    Relative size of the data cosine transforms at the Bessel roots.

    The cosine transforms of exact, fully captured pressure data vanish at
    ``w[j, |k|] / R``. The residual divides their largest modulus by the largest modulus
    of the same transforms on a fine reference frequency grid reaching the largest root.

    Parameters
    ----------
    data : SensorData
    roots : BesselRootTable
        Orders beyond the table are ignored.

    Returns
    -------
    float
        0 for zero data.
    """
    spectrum = harmonics.angularDecompose(data).restricted(roots.maxOrder)
    atRoots = harmonics.cosineAtRoots(spectrum, roots, data.radius)
    numerator = float(np.abs(atRoots.values).max())
    if numerator == 0.0:
        return 0.0
    largest = float(roots.roots[:, : spectrum.maxOrder + 1].max()) / data.radius
    reference = harmonics.cosineTransform(spectrum, referenceFrequencies(data.finalTime, largest))
    denominator = float(np.abs(reference).max())
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def rangeResidualByTime(data, roots, finalTimes):
    """
    Range residual of leading portions of the data.

    Parameters
    ----------
    finalTimes : sequence of float
        Truncation times, each at most ``data.finalTime``.

    Returns
    -------
    list of (float, float)
        ``(time used, residual)`` pairs; the time is rounded to a whole sample.
    """
    results = []
    for finalTime in finalTimes:
        if not 0.0 < finalTime <= data.finalTime * (1.0 + 1e-12):
            raise ValidationError(
                f"Truncation time {finalTime} must be within (0, {data.finalTime}]"
            )
        nT = max(1, min(data.nT, int(round(finalTime / data.timeStep))))
        portion = data.truncated(nT)
        residual = rangeResidual(portion, roots)
        runLog.extra(f"Range residual with T = {portion.finalTime:.4f}: {residual:.4e}")
        results.append((portion.finalTime, residual))
    return results
