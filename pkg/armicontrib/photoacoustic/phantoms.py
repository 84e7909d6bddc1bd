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
Test phantoms, data noise and error measures.

A phantom is a list of primitives (disks, annuli and Gaussian bumps) summed on the grid
and optionally mollified with a Gaussian of standard deviation ``smoothing``. Every
primitive, widened by the mollifier, must stay within ``SUPPORT_RADIUS`` so the forward
solver accepts the result.

Noise is additive white Gaussian noise whose standard deviation is a percentage of the
root-mean-square of the clean sinogram. The data error reported next to it divides the
perturbation by the norm of the noisy data, which is how a 50 % noise level shows up as
roughly 45 % data error.
"""
from typing import NamedTuple, Tuple

import numpy as np
from scipy import ndimage

from armi import runLog

from . import const
from .errors import ValidationError, SupportError, GeometryMismatchError
from .wavesim import ScalarField2D

#: Mollifier kernels are cut off after this many standard deviations.
MOLLIFIER_TRUNCATE = 4.0

#: Gaussian primitives count as zero beyond this many widths.
GAUSSIAN_REACH = 6.0

DEFAULT_SMOOTHING = 0.02
DEFAULT_GRID_POINTS = 280


class Disk(NamedTuple):
    center: Tuple[float, float]
    radius: float
    amplitude: float = 1.0

    def extent(self):
        return float(np.hypot(*self.center)) + self.radius

    def evaluate(self, x, y):
        cx, cy = self.center
        return self.amplitude * (((x - cx) ** 2 + (y - cy) ** 2) <= self.radius**2)


class Annulus(NamedTuple):
    center: Tuple[float, float]
    innerRadius: float
    outerRadius: float
    amplitude: float = 1.0

    def extent(self):
        return float(np.hypot(*self.center)) + self.outerRadius

    def evaluate(self, x, y):
        cx, cy = self.center
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        return self.amplitude * ((r2 >= self.innerRadius**2) & (r2 <= self.outerRadius**2))


class Gaussian(NamedTuple):
    center: Tuple[float, float]
    width: float
    amplitude: float = 1.0

    def extent(self):
        return float(np.hypot(*self.center)) + GAUSSIAN_REACH * self.width

    def evaluate(self, x, y):
        cx, cy = self.center
        return self.amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * self.width**2))


SHAPES = {"disk": Disk, "annulus": Annulus, "gaussian": Gaussian}

#: Two overlapping disks and an annulus with distinct amplitudes.
DEFAULT_PRIMITIVES = (
    Disk(center=(-0.25, 0.15), radius=0.3, amplitude=1.0),
    Disk(center=(0.15, 0.05), radius=0.2, amplitude=0.6),
    Annulus(center=(0.2, -0.35), innerRadius=0.12, outerRadius=0.22, amplitude=0.8),
)


def primitiveFromSettings(entry):
    """
    Build a primitive from a settings mapping such as
    ``{"shape": "disk", "center": [0.1, 0.2], "radius": 0.3, "amplitude": 1.0}``.
    """
    entry = dict(entry)
    shape = str(entry.pop("shape", "")).lower()
    if shape not in SHAPES:
        raise ValidationError(f"Unknown phantom shape `{shape}`; choose one of {sorted(SHAPES)}")
    entry["center"] = tuple(float(c) for c in entry.get("center", (0.0, 0.0)))
    try:
        primitive = SHAPES[shape](**entry)
    except TypeError as err:
        raise ValidationError(f"Bad parameters for a {shape}: {err}")
    _checkPrimitive(primitive)
    return primitive


def primitiveToSettings(primitive):
    shape = next(name for name, cls in SHAPES.items() if isinstance(primitive, cls))
    entry = {"shape": shape}
    entry.update(primitive._asdict())
    entry["center"] = list(primitive.center)
    return entry


def _checkPrimitive(primitive):
    if len(primitive.center) != 2:
        raise ValidationError(f"Primitive center must have two coordinates: {primitive}")
    if isinstance(primitive, Disk) and not primitive.radius > 0.0:
        raise ValidationError(f"Disk radius must be positive: {primitive}")
    if isinstance(primitive, Annulus) and not 0.0 <= primitive.innerRadius < primitive.outerRadius:
        raise ValidationError(f"Annulus needs 0 <= innerRadius < outerRadius: {primitive}")
    if isinstance(primitive, Gaussian) and not primitive.width > 0.0:
        raise ValidationError(f"Gaussian width must be positive: {primitive}")


class PhantomSpec:
    """
    Primitives, mollifier width and grid size of a phantom.

    Parameters
    ----------
    primitives : sequence
        :py:class:`Disk`, :py:class:`Annulus` and :py:class:`Gaussian` entries.
    smoothing : float
        Mollifier standard deviation; 0 rasterizes the sharp indicators.
    gridPoints : int
        Side of the square output grid.
    """

    def __init__(
        self,
        primitives=DEFAULT_PRIMITIVES,
        smoothing=DEFAULT_SMOOTHING,
        gridPoints=DEFAULT_GRID_POINTS,
    ):
        self.primitives = tuple(primitives)
        self.smoothing = float(smoothing)
        self.gridPoints = int(gridPoints)
        self._validate()

    def __repr__(self):
        return (
            f"<PhantomSpec {len(self.primitives)} primitives, smoothing={self.smoothing}, "
            f"grid={self.gridPoints}>"
        )

    def __eq__(self, other):
        if not isinstance(other, PhantomSpec):
            return NotImplemented
        return (self.primitives, self.smoothing, self.gridPoints) == (
            other.primitives,
            other.smoothing,
            other.gridPoints,
        )

    @classmethod
    def fromSettings(cls, entries, smoothing=DEFAULT_SMOOTHING, gridPoints=DEFAULT_GRID_POINTS):
        primitives = [primitiveFromSettings(entry) for entry in entries] or DEFAULT_PRIMITIVES
        return cls(primitives, smoothing, gridPoints)

    def toSettings(self):
        return [primitiveToSettings(p) for p in self.primitives]

    @property
    def spacing(self):
        return 2.0 / (self.gridPoints - 1)

    def reach(self, primitive):
        """Radius beyond which the rasterized primitive is exactly zero (or negligible)."""
        if self.smoothing == 0.0:
            return primitive.extent()
        return primitive.extent() + MOLLIFIER_TRUNCATE * self.smoothing + self.spacing

    def _validate(self):
        if self.gridPoints < 2:
            raise ValidationError(f"Phantom grid needs at least 2 points, got {self.gridPoints}")
        if self.smoothing < 0.0:
            raise ValidationError(f"Smoothing must be non-negative, got {self.smoothing}")
        for primitive in self.primitives:
            _checkPrimitive(primitive)
            reach = self.reach(primitive)
            if reach > const.SUPPORT_RADIUS:
                raise SupportError(
                    f"{primitive} reaches radius {reach:.3f} after smoothing; phantoms must stay "
                    f"within {const.SUPPORT_RADIUS}"
                )


def defaultPhantom(gridPoints=DEFAULT_GRID_POINTS, smoothing=DEFAULT_SMOOTHING):
    return rasterize(PhantomSpec(DEFAULT_PRIMITIVES, smoothing, gridPoints))


def rasterize(spec):
    """
    Sample a phantom on its grid.

    Returns
    -------
    ScalarField2D
        Sum of the primitives, convolved with the mollifier when ``smoothing > 0``.
    """
    field = ScalarField2D.zeros(spec.gridPoints)
    x, y = field.coordinates()
    values = np.zeros_like(x)
    for primitive in spec.primitives:
        values += primitive.evaluate(x, y)
    if spec.smoothing > 0.0:
        values = ndimage.gaussian_filter(
            values,
            sigma=spec.smoothing / spec.spacing,
            mode="constant",
            truncate=MOLLIFIER_TRUNCATE,
        )
    return ScalarField2D(
        values, {"primitives": len(spec.primitives), "smoothing": spec.smoothing}
    )


def addNoise(data, percent, seed):
    """
    Add white Gaussian noise scaled to the data.

    Parameters
    ----------
    data : SensorData
    percent : float
        Noise standard deviation as a percentage of the data's root-mean-square.
    seed : int
        Seed of the ``numpy.random.default_rng`` stream.

    Returns
    -------
    SensorData
        New sinogram; ``percent == 0`` returns the samples unchanged.
    """
    if not np.isfinite(percent) or percent < 0.0:
        raise ValidationError(f"Noise percentage must be non-negative, got {percent}")
    provenance = {"noisePercent": float(percent), "noiseSeed": int(seed)}
    if percent == 0.0:
        return data.withSamples(data.samples.copy(), provenance)
    sigma = percent / 100.0 * data.normL2()
    rng = np.random.default_rng(seed)
    noisy = data.samples + rng.normal(0.0, sigma, size=data.samples.shape)
    return data.withSamples(noisy, provenance)


def relativeDataError(clean, noisy):
    """Norm of the perturbation relative to the norm of the noisy data."""
    if clean.samples.shape != noisy.samples.shape:
        raise GeometryMismatchError(
            f"Cannot compare sinograms of shapes {clean.samples.shape} and {noisy.samples.shape}"
        )
    denominator = np.linalg.norm(noisy.samples)
    if denominator == 0.0:
        return 0.0
    return float(np.linalg.norm(noisy.samples - clean.samples) / denominator)


class ErrorMeasure(NamedTuple):
    """An error value and whether it is relative to the truth (False for a zero truth)."""

    value: float
    isRelative: bool


def relativeError(reconstruction, truth):
    """
    l2 error of a reconstruction over the closed unit disk, relative to the truth.

    A zero truth leaves nothing to normalize by; the absolute error is returned with
    ``isRelative`` False and a warning is logged.
    """
    if reconstruction.values.shape != truth.values.shape:
        raise GeometryMismatchError(
            f"Reconstruction grid {reconstruction.values.shape} differs from truth "
            f"{truth.values.shape}"
        )
    inside = truth.radius() <= 1.0
    difference = float(np.linalg.norm((reconstruction.values - truth.values)[inside]))
    norm = float(np.linalg.norm(truth.values[inside]))
    if norm == 0.0:
        runLog.warning("Truth is zero on the unit disk; reporting the absolute error instead")
        return ErrorMeasure(difference, False)
    return ErrorMeasure(difference / norm, True)
