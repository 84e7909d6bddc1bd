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

"""Tests for the wave-equation forward model."""
import unittest

import numpy as np
from scipy import integrate, special

from .. import phantoms, wavesim
from ..const import SUPPORT_RADIUS
from ..errors import ValidationError, SupportError, GeometryMismatchError


def gaussianField(gridPoints, width, amplitude=1.0, center=(0.0, 0.0)):
    cx, cy = center
    return wavesim.ScalarField2D.fromFunction(
        gridPoints,
        lambda x, y: amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * width**2)),
    )


def gaussianPressure(r, t, width, amplitude=1.0):
    """Radial pressure of a centered Gaussian initial pressure, from its Hankel transform."""
    upper = 14.0 / width
    value, _err = integrate.quad(
        lambda lam: np.cos(t * lam)
        * np.exp(-0.5 * (width * lam) ** 2)
        * lam
        * special.j0(lam * r),
        0.0,
        upper,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-10,
    )
    return amplitude * width**2 * value


def gaussianRadialDerivative(r, t, width, amplitude=1.0):
    upper = 14.0 / width
    value, _err = integrate.quad(
        lambda lam: -np.cos(t * lam)
        * np.exp(-0.5 * (width * lam) ** 2)
        * lam**2
        * special.j1(lam * r),
        0.0,
        upper,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-10,
    )
    return amplitude * width**2 * value


class TestFieldTypes(unittest.TestCase):
    def testFieldValidation(self):
        with self.assertRaises(ValidationError):
            wavesim.ScalarField2D(np.zeros((3, 4)))
        with self.assertRaises(ValidationError):
            wavesim.ScalarField2D(np.full((3, 3), np.inf))

    def testFieldGeometry(self):
        field = wavesim.ScalarField2D.zeros(5)
        self.assertEqual(field.spacing, 0.5)
        np.testing.assert_array_equal(field.axis, [-1.0, -0.5, 0.0, 0.5, 1.0])
        x, y = field.coordinates()
        self.assertEqual(x[0, -1], 1.0)
        self.assertEqual(y[-1, 0], 1.0)

    def testSensorDataGeometry(self):
        data = wavesim.SensorData(np.zeros((4, 10)), 1.0, 5.0, 1.0, 0.0)
        np.testing.assert_allclose(data.angles, [0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
        self.assertEqual(data.times[1], 0.5)
        short = data.truncated(4)
        self.assertEqual(short.nT, 4)
        self.assertAlmostEqual(short.finalTime, 2.0)
        with self.assertRaises(GeometryMismatchError):
            data.truncated(11)
        with self.assertRaises(ValidationError):
            wavesim.SensorData(np.zeros((4, 10)), 0.0, 5.0, 1.0, 0.0)


class TestKSpaceSolution(unittest.TestCase):
    def testInitialSnapshotIsField(self):
        field = gaussianField(81, 0.1, center=(0.1, -0.2))
        (snapshot,) = wavesim.kspaceSolution(field, [0.0])
        np.testing.assert_allclose(snapshot.values, field.values, atol=1e-12)

    def testGaussianAgainstHankelOracle(self):
        n = 280
        width = 0.1
        field = gaussianField(n, width)
        times = [0.25, 0.5, 1.0]
        snapshots = wavesim.kspaceSolution(field, times)
        row = n // 2
        columns = np.arange(n // 2, n - 5, 6)
        radii = np.hypot(field.axis[columns], field.axis[row])
        for t, snapshot in zip(times, snapshots):
            expected = np.array([gaussianPressure(r, t, width) for r in radii])
            computed = snapshot.values[row, columns]
            error = np.linalg.norm(computed - expected) / np.linalg.norm(expected)
            self.assertLess(error, 1e-6, msg=f"t={t}")

    def testPeakPressureBounded(self):
        field = gaussianField(121, 0.12, center=(0.2, 0.1))
        snapshots = wavesim.kspaceSolution(field, np.linspace(0.0, 3.0, 7))
        for snapshot in snapshots:
            self.assertLessEqual(snapshot.maxAbs(), 2.0 * field.maxAbs())

    def testRejectsSourceOutsideSupport(self):
        values = np.zeros((41, 41))
        values[20, 39] = 1.0
        with self.assertRaises(SupportError):
            wavesim.kspaceSolution(wavesim.ScalarField2D(values), [0.5])

    def testRejectsDecreasingTimes(self):
        with self.assertRaises(ValidationError):
            wavesim.kspaceSolution(gaussianField(41, 0.1), [0.5, 0.2])

    def testPaddingKeepsImagesAway(self):
        for n, t in [(280, 6.0), (121, 12.0), (64, 0.1)]:
            spacing = 2.0 / (n - 1)
            boxLength = wavesim.paddedPoints(n, spacing, t) * spacing
            self.assertGreater(boxLength, t + 1.9)
            self.assertGreaterEqual(wavesim.paddedPoints(n, spacing, t), 2 * n)


class TestForwardOperator(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.field = gaussianField(101, 0.12, center=(0.2, -0.1))
        cls.sampling = dict(nTheta=16, nT=40, finalTime=2.0)

    def testCombinedModelIsExactSum(self):
        m10 = wavesim.forwardOperator(self.field, 1.0, 0.0, **self.sampling)
        m01 = wavesim.forwardOperator(self.field, 0.0, 1.0, **self.sampling)
        m11 = wavesim.forwardOperator(self.field, 1.0, 1.0, **self.sampling)
        np.testing.assert_array_equal(m11.samples, m10.samples + m01.samples)
        self.assertEqual((m11.c1, m11.c2), (1.0, 1.0))

    def testZeroFieldGivesZeroData(self):
        data = wavesim.forwardOperator(wavesim.ScalarField2D.zeros(51), 1.0, 1.0, 8, 10, 1.0)
        self.assertFalse(data.samples.any())

    def testRadialFieldGivesEqualDetectors(self):
        data = wavesim.forwardOperator(gaussianField(161, 0.1), 1.0, 0.0, 12, 30, 1.5)
        spread = np.abs(data.samples - data.samples.mean(axis=0)).max()
        self.assertLess(spread, 1e-2 * np.abs(data.samples).max())

    def testLinearInInitialPressure(self):
        other = gaussianField(101, 0.08, center=(-0.3, 0.2))
        combined = wavesim.ScalarField2D(2.0 * self.field.values - 0.5 * other.values)
        sampling = dict(nTheta=8, nT=20, finalTime=1.5)
        first = wavesim.forwardOperator(self.field, 1.0, 1.0, **sampling)
        second = wavesim.forwardOperator(other, 1.0, 1.0, **sampling)
        both = wavesim.forwardOperator(combined, 1.0, 1.0, **sampling)
        expected = 2.0 * first.samples - 0.5 * second.samples
        np.testing.assert_allclose(
            both.samples, expected, rtol=0.0, atol=1e-11 * np.abs(expected).max()
        )

    def testRotationShiftsDetectors(self):
        """A rotation by one detector spacing rolls the detector axis by one."""
        nTheta = 12
        step = 2.0 * np.pi / nTheta
        sampling = dict(nTheta=nTheta, nT=40, finalTime=2.0)
        original = wavesim.forwardOperator(
            gaussianField(280, 0.1, center=(0.3, 0.0)), 1.0, 0.0, **sampling
        )
        rotated = wavesim.forwardOperator(
            gaussianField(280, 0.1, center=(0.3 * np.cos(step), 0.3 * np.sin(step))),
            1.0,
            0.0,
            **sampling,
        )
        norm = np.linalg.norm(original.samples)
        shifted = np.roll(original.samples, 1, axis=0)
        # bilinear detector interpolation limits agreement to 1e-3 relative l2
        self.assertLess(np.linalg.norm(rotated.samples - shifted) / norm, 1e-3)
        self.assertGreater(np.linalg.norm(rotated.samples - original.samples) / norm, 0.1)

    def testSignalDecaysAfterWavefrontExits(self):
        field = phantoms.rasterize(phantoms.PhantomSpec(gridPoints=121))
        data = wavesim.forwardOperator(field, 1.0, 0.0, nTheta=16, nT=60, finalTime=6.0)
        late = data.times > 2.0 * (data.radius + SUPPORT_RADIUS)
        self.assertTrue(late.any())
        peak = np.abs(data.samples).max()
        self.assertLess(np.abs(data.samples[:, late]).max(), 0.1 * peak)
        self.assertGreater(np.abs(data.samples[:, late]).max(), 0.0)

    def testTracesAgainstHankelOracle(self):
        width = 0.1
        radius = 0.8
        pressure, normal = wavesim.boundaryTraces(
            gaussianField(201, width), nTheta=4, nT=24, finalTime=1.2, radius=radius
        )
        times = 1.2 * np.arange(24) / 24
        expectedP = np.array([gaussianPressure(radius, t, width) for t in times])
        expectedN = np.array([gaussianRadialDerivative(radius, t, width) for t in times])
        np.testing.assert_allclose(pressure[0], expectedP, atol=1e-2 * np.abs(expectedP).max())
        np.testing.assert_allclose(normal[0], expectedN, atol=3e-2 * np.abs(expectedN).max())

    def testInvalidSampling(self):
        with self.assertRaises(ValidationError):
            wavesim.forwardOperator(self.field, 1.0, 0.0, 0, 10, 1.0)
        with self.assertRaises(ValidationError):
            wavesim.forwardOperator(self.field, 1.0, 0.0, 8, 10, -1.0)
        with self.assertRaises(ValidationError):
            wavesim.forwardOperator(self.field, 1.0, 0.0, 8, 10, 1.0, radius=1.5)

    def testBilinearSamplerReproducesLinearFunctions(self):
        axis = wavesim.gridAxis(11)
        x, y = np.meshgrid(axis, axis, indexing="xy")
        values = 2.0 * x - 3.0 * y + 0.5
        px = np.array([0.13, -0.77, 0.99, 1.0])
        py = np.array([0.41, 0.05, -0.6, -1.0])
        sampled = wavesim.bilinearSampler(axis, px, py) @ values.ravel()
        np.testing.assert_allclose(sampled, 2.0 * px - 3.0 * py + 0.5, atol=1e-12)


if __name__ == "__main__":
    unittest.main()
