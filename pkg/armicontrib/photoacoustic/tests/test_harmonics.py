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

"""Tests for angular harmonics and time transforms."""
import unittest

import numpy as np

from .. import harmonics
from .. import wavesim
from ..errors import ValidationError, GeometryMismatchError
from ..specfun import besselRoots
from .test_wavesim import gaussianField


def randomData(nTheta=12, nT=30, finalTime=3.0, seed=7):
    rng = np.random.default_rng(seed)
    return wavesim.SensorData(rng.standard_normal((nTheta, nT)), 1.0, finalTime, 1.0, 0.0)


class TestAngularDecompose(unittest.TestCase):
    def testParseval(self):
        data = randomData()
        spectrum = harmonics.angularDecompose(data)
        lhs = np.sum(np.abs(spectrum.coeffs) ** 2, axis=0)
        rhs = 2.0 * np.pi / data.nTheta * np.sum(data.samples**2, axis=0)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def testSynthesisInvertsDecomposition(self):
        data = randomData(nTheta=16, nT=9)
        samples = harmonics.synthesize(harmonics.angularDecompose(data))
        np.testing.assert_allclose(samples, data.samples, atol=1e-12)

    def testSingleHarmonic(self):
        nTheta = 24
        angles = 2.0 * np.pi * np.arange(nTheta) / nTheta
        samples = np.outer(np.cos(3.0 * angles), np.ones(5))
        spectrum = harmonics.angularDecompose(wavesim.SensorData(samples, 1.0, 1.0, 1.0, 0.0))
        np.testing.assert_array_equal(spectrum.orders, np.arange(-12, 12))
        for order in (-3, 3):
            np.testing.assert_allclose(spectrum.column(order), np.sqrt(2.0 * np.pi) / 2.0)
        others = spectrum.restricted(2)
        self.assertEqual(others.maxOrder, 2)
        np.testing.assert_allclose(others.coeffs, 0.0, atol=1e-14)

    def testOddDetectorCount(self):
        with self.assertRaises(ValidationError):
            harmonics.angularDecompose(randomData(nTheta=7))

    def testOrderGroupsPairOrders(self):
        spectrum = harmonics.angularDecompose(randomData(nTheta=6))
        groups = {m: list(spectrum.orders[rows]) for m, rows in spectrum.orderGroups()}
        self.assertEqual(groups, {0: [0], 1: [-1, 1], 2: [-2, 2], 3: [-3]})


class TestTimeTransforms(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.data = randomData(nTheta=8, nT=64, finalTime=4.0)
        cls.spectrum = harmonics.angularDecompose(cls.data)
        cls.roots = besselRoots(4, 10)

    def testAtRootsMatchesArbitraryFrequencies(self):
        cosine = harmonics.cosineAtRoots(self.spectrum, self.roots)
        sine = harmonics.sineTWeightedAtRoots(self.spectrum, self.roots, rootsPerOrder=6)
        self.assertEqual(cosine.values.shape, (10, 8))
        self.assertEqual(sine.rootsPerOrder, 6)
        for i, order in enumerate(self.spectrum.orders):
            frequencies = self.roots.forOrder(order)
            direct = harmonics.cosineTransform(self.spectrum, frequencies)[i]
            np.testing.assert_allclose(cosine.values[:, i], direct, atol=1e-12)
            direct = harmonics.sineTWeightedTransform(self.spectrum, frequencies[:6])[i]
            np.testing.assert_allclose(sine.values[:, i], direct, atol=1e-12)

    def testSineIsMinusDerivativeOfCosine(self):
        lam = np.linspace(0.5, 12.0, 23)
        delta = 1e-5
        derivative = (
            harmonics.cosineTransform(self.spectrum, lam + delta)
            - harmonics.cosineTransform(self.spectrum, lam - delta)
        ) / (2.0 * delta)
        sine = harmonics.sineTWeightedTransform(self.spectrum, lam)
        np.testing.assert_allclose(derivative, -sine, atol=1e-6)

    def testRadiusScalesFrequencies(self):
        half = harmonics.cosineAtRoots(self.spectrum, self.roots, radius=0.5)
        for i, order in enumerate(self.spectrum.orders):
            direct = harmonics.cosineTransform(self.spectrum, 2.0 * self.roots.forOrder(order))[i]
            np.testing.assert_allclose(half.values[:, i], direct, atol=1e-12)

    def testZeroDataGivesZeroCoefficients(self):
        zero = harmonics.angularDecompose(self.data.withSamples(np.zeros_like(self.data.samples)))
        self.assertFalse(harmonics.cosineAtRoots(zero, self.roots).values.any())
        self.assertFalse(harmonics.sineTWeightedAtRoots(zero, self.roots).values.any())

    def testDeterministic(self):
        first = harmonics.cosineAtRoots(self.spectrum, self.roots).values
        second = harmonics.cosineAtRoots(harmonics.angularDecompose(self.data), self.roots).values
        np.testing.assert_array_equal(first, second)

    def testMissingRoots(self):
        with self.assertRaises(ValidationError):
            harmonics.cosineAtRoots(self.spectrum, besselRoots(2, 10))
        with self.assertRaises(ValidationError):
            harmonics.cosineAtRoots(self.spectrum, self.roots, rootsPerOrder=11)

    def testTimeWindowMismatch(self):
        with self.assertRaises(GeometryMismatchError):
            harmonics.cosineAtRoots(self.spectrum, self.roots, finalTime=5.0)


class TestClosedFormTransforms(unittest.TestCase):
    """Riemann sums against integrals known in closed form, within one time step."""

    def testCosineOfMatchingFrequency(self):
        radius, finalTime, nT = 0.8, 4.0, 8000
        roots = besselRoots(3, 2)
        lam = roots.root(1, 3) / radius
        times = finalTime * np.arange(nT) / nT
        spectrum = harmonics.HarmonicSpectrum(np.cos(lam * times)[None, :], [3], finalTime, radius)
        cosine = harmonics.cosineAtRoots(spectrum, roots)
        expected = finalTime / 2.0 + np.sin(2.0 * lam * finalTime) / (4.0 * lam)
        self.assertLess(abs(cosine.values[0, 0] - expected), finalTime / nT)
        self.assertEqual(cosine.values[0, 0].imag, 0.0)

    def testDecayingExponential(self):
        finalTime, nT = 30.0, 60000
        roots = besselRoots(1, 5)
        times = finalTime * np.arange(nT) / nT
        spectrum = harmonics.HarmonicSpectrum(np.exp(-times)[None, :], [0], finalTime, 1.0)
        lam = roots.forOrder(0)
        cosine = harmonics.cosineAtRoots(spectrum, roots).values[:, 0]
        sine = harmonics.sineTWeightedAtRoots(spectrum, roots).values[:, 0]
        np.testing.assert_allclose(cosine.real, 1.0 / (1.0 + lam**2), atol=finalTime / nT)
        np.testing.assert_allclose(
            sine.real, 2.0 * lam / (1.0 + lam**2) ** 2, atol=finalTime / nT
        )
        self.assertFalse(cosine.imag.any())
        self.assertFalse(sine.imag.any())


class TestRadialCosineTransform(unittest.TestCase):
    """Simulated zeroth harmonics of a centered Gaussian against the closed form."""

    width = 0.15
    radius = 0.8

    @classmethod
    def setUpClass(cls):
        cls.finalTime = 8.0
        pressure, normal = wavesim.boundaryTraces(
            gaussianField(121, cls.width),
            nTheta=16,
            nT=640,
            finalTime=cls.finalTime,
            radius=cls.radius,
        )
        cls.traces = {(1.0, 0.0): pressure, (0.0, 1.0): normal}

    def radialTransform(self, lam):
        return 2.0 * np.pi * self.width**2 * np.exp(-0.5 * (self.width * lam) ** 2)

    def _compare(self, c1, c2, frequencies, tolerance):
        samples = self.traces[c1, c2]
        data = wavesim.SensorData(samples, self.radius, self.finalTime, c1, c2)
        spectrum = harmonics.angularDecompose(data).restricted(0)
        computed = harmonics.cosineTransform(spectrum, frequencies)[0]
        expected = harmonics.lemmaCosineTransform(
            self.radialTransform, frequencies, c1, c2, self.radius
        )
        self.assertLess(np.abs(computed.imag).max(), 1e-12)
        error = np.linalg.norm(computed.real - expected) / np.linalg.norm(expected)
        self.assertLess(error, tolerance)

    def testPressureData(self):
        self._compare(1.0, 0.0, np.linspace(3.0, 20.0, 50), 1e-2)

    def testNormalDerivativeData(self):
        self._compare(0.0, 1.0, np.linspace(3.0, 12.0, 40), 2e-2)


if __name__ == "__main__":
    unittest.main()
