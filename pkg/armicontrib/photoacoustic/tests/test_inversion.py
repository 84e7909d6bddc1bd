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

"""Tests for the series inversion formulas and the range residual."""
import unittest

import numpy as np

from .. import inversion
from .. import phantoms
from .. import wavesim
from ..const import Formula
from ..errors import ValidationError, GeometryMismatchError, NumericalError
from ..specfun import BesselRootTable, besselRoots
from .test_wavesim import gaussianField

RADIUS = 0.9
N_THETA = 64
N_ROOTS = 30
GRID = 101


def smoothPhantom(gridPoints=GRID):
    spec = phantoms.PhantomSpec([phantoms.Gaussian((0.2, -0.1), 0.1)], 0.0, gridPoints)
    return phantoms.rasterize(spec)


def configFor(formula, c1, c2, **kwargs):
    kwargs.setdefault("rootsPerOrder", N_ROOTS)
    kwargs.setdefault("gridPoints", GRID)
    kwargs.setdefault("radius", RADIUS)
    return inversion.ReconstructionConfig.assuming(formula, c1, c2, **kwargs)


class TestReconstructionConfig(unittest.TestCase):
    def testFormulaNeedsItsDivisor(self):
        with self.assertRaises(ValidationError):
            inversion.ReconstructionConfig(Formula.A, 1.0, 0.0)
        with self.assertRaises(ValidationError):
            inversion.ReconstructionConfig("b", 0.0, 1.0)
        config = inversion.ReconstructionConfig("a", 0.0, 2.0)
        self.assertIs(config.formula, Formula.A)

    def testAssumingReplacesZeroDivisor(self):
        config = inversion.ReconstructionConfig.assuming(Formula.A, 1.0, 0.0)
        self.assertEqual((config.c1, config.c2), (1.0, 1.0))
        config = inversion.ReconstructionConfig.assuming(Formula.B, 0.0, 1.0)
        self.assertEqual((config.c1, config.c2), (1.0, 1.0))
        config = inversion.ReconstructionConfig.assuming(Formula.B, 1.0, 0.0)
        self.assertEqual((config.c1, config.c2), (1.0, 0.0))

    def testEqualityAndHashing(self):
        self.assertEqual(configFor(Formula.B, 1.0, 0.0), configFor("B", 1, 0))
        self.assertEqual(len({configFor(Formula.B, 1.0, 0.0), configFor("B", 1, 0)}), 1)
        self.assertNotEqual(
            configFor(Formula.B, 1.0, 0.0), configFor(Formula.B, 1.0, 0.0, timeSamples=10)
        )


class TestSeriesInversion(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.truth = smoothPhantom()
        pressure, normal = wavesim.boundaryTraces(
            cls.truth, nTheta=N_THETA, nT=600, finalTime=6.0, radius=RADIUS
        )
        cls.data = {
            (c1, c2): wavesim.combineTraces(pressure, normal, c1, c2, 6.0, RADIUS)
            for c1, c2 in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (0.0, 2.0)]
        }
        cls.roots = besselRoots(N_THETA // 2, N_ROOTS)

    def reconstruct(self, formula, c1, c2):
        return inversion.invert(self.data[c1, c2], configFor(formula, c1, c2), self.roots)

    def error(self, formula, c1, c2):
        return phantoms.relativeError(self.reconstruct(formula, c1, c2), self.truth).value

    def testFormulaBOnPressureData(self):
        field = self.reconstruct(Formula.B, 1.0, 0.0)
        self.assertEqual(field.values.shape, (GRID, GRID))
        self.assertEqual(field.metadata["formula"], "B")
        self.assertLess(self.error(Formula.B, 1.0, 0.0), 0.1)

    def testFormulaAOnDerivativeData(self):
        self.assertLess(self.error(Formula.A, 0.0, 1.0), 0.1)

    def testFormulaAOnMixedData(self):
        self.assertLess(self.error(Formula.A, 1.0, 1.0), 0.2)

    def testFormulaBIsBiasedByDerivativeData(self):
        matched = self.error(Formula.B, 1.0, 0.0)
        self.assertGreater(self.error(Formula.B, 1.0, 1.0), 3.0 * matched)

    def testFormulaAIgnoresPressureData(self):
        pressureOnly = self.reconstruct(Formula.A, 1.0, 0.0)
        matched = self.reconstruct(Formula.A, 0.0, 1.0)
        self.assertLess(
            np.linalg.norm(pressureOnly.values), 0.1 * np.linalg.norm(matched.values)
        )

    def testMatchedFormulaWinsEveryComparison(self):
        matched = {(1.0, 0.0): Formula.B, (1.0, 1.0): Formula.A, (0.0, 1.0): Formula.A}
        errors = {
            (model, formula): self.error(formula, *model)
            for model in matched
            for formula in Formula
        }
        worstMatched = max(errors[model, formula] for model, formula in matched.items())
        bestMismatched = min(
            error for (model, formula), error in errors.items() if matched[model] is not formula
        )
        self.assertLess(worstMatched, bestMismatched)
        for model, formula in matched.items():
            best = min(Formula, key=lambda f: errors[model, f])
            self.assertIs(best, formula, msg=f"data model {model}")

    def testFormulaAErrorIndependentOfPressureWeight(self):
        mixed = self.error(Formula.A, 1.0, 1.0)
        derivativeOnly = self.error(Formula.A, 0.0, 1.0)
        self.assertLessEqual(abs(mixed - derivativeOnly), 0.1 * derivativeOnly)

    def testFormulaAScalesWithAssumedWeights(self):
        # formula A divides by c2 only, so a larger c1 adds exactly its pressure-only image
        heavier = self.reconstruct(Formula.A, 2.0, 1.0).values
        mixed = self.reconstruct(Formula.A, 1.0, 1.0).values
        pressureOnly = self.reconstruct(Formula.A, 1.0, 0.0).values
        scale = np.abs(mixed).max()
        np.testing.assert_allclose(heavier - mixed, pressureOnly, atol=1e-10 * scale)
        self.assertLess(
            np.linalg.norm(heavier - mixed),
            0.1 * np.linalg.norm(self.reconstruct(Formula.A, 0.0, 1.0).values),
        )
        doubled = self.reconstruct(Formula.A, 0.0, 2.0).values
        single = self.reconstruct(Formula.A, 0.0, 1.0).values
        np.testing.assert_allclose(doubled, single, atol=1e-10 * np.abs(single).max())

    def testLinearity(self):
        config = configFor(Formula.B, 1.0, 0.0)
        first = self.data[1.0, 0.0]
        taper = np.linspace(1.0, 0.5, first.nT)
        second = first.withSamples(np.roll(first.samples, 5, axis=0) * taper)
        combined = first.withSamples(2.0 * first.samples - 0.5 * second.samples)
        expected = (
            2.0 * inversion.invert(first, config, self.roots).values
            - 0.5 * inversion.invert(second, config, self.roots).values
        )
        computed = inversion.invert(combined, config, self.roots).values
        np.testing.assert_allclose(computed, expected, atol=1e-10 * np.abs(expected).max())

    def testRotatingDetectorsRotatesImage(self):
        config = configFor(Formula.B, 1.0, 0.0)
        data = self.data[1.0, 0.0]
        rotated = data.withSamples(np.roll(data.samples, 1, axis=0))
        inverter = inversion.seriesInverter(config, self.roots, N_THETA)
        original = inversion.invertPolar(data, config, self.roots)
        turned = inversion.invertPolar(rotated, config, self.roots)
        shift = inverter.nAngles // N_THETA
        np.testing.assert_allclose(
            turned, np.roll(original, shift, axis=1), atol=1e-10 * np.abs(original).max()
        )

    def testTimeSamplePrefix(self):
        config = configFor(Formula.B, 1.0, 0.0, timeSamples=400)
        field = inversion.invert(self.data[1.0, 0.0], config, self.roots)
        self.assertLess(phantoms.relativeError(field, self.truth).value, 0.2)
        with self.assertRaises(GeometryMismatchError):
            inversion.invert(
                self.data[1.0, 0.0], configFor(Formula.B, 1.0, 0.0, timeSamples=601), self.roots
            )

    def testRadiusMismatch(self):
        with self.assertRaises(GeometryMismatchError):
            config = configFor(Formula.B, 1.0, 0.0, radius=1.0)
            inversion.invert(self.data[1.0, 0.0], config, self.roots)

    def testMissingRoots(self):
        with self.assertRaises(ValidationError):
            config = configFor(Formula.B, 1.0, 0.0)
            inversion.invert(self.data[1.0, 0.0], config, besselRoots(8, N_ROOTS))

    def testZeroDataGivesZeroImage(self):
        zero = self.data[1.0, 0.0].withSamples(np.zeros((N_THETA, 600)))
        for formula in Formula:
            field = inversion.invert(zero, configFor(formula, 1.0, 1.0), self.roots)
            self.assertFalse(field.values.any())

    def testOddDetectorCount(self):
        data = wavesim.SensorData(np.ones((7, 10)), RADIUS, 1.0, 1.0, 0.0)
        with self.assertRaises(ValidationError):
            inversion.invert(data, configFor(Formula.B, 1.0, 0.0), self.roots)

    def testRangeResidualSeparatesDataModels(self):
        pressure = inversion.rangeResidual(self.data[1.0, 0.0], self.roots)
        derivative = inversion.rangeResidual(self.data[0.0, 1.0], self.roots)
        self.assertLess(pressure, derivative / 5.0)
        zero = self.data[1.0, 0.0].withSamples(np.zeros((N_THETA, 600)))
        self.assertEqual(inversion.rangeResidual(zero, self.roots), 0.0)

    def testRangeResidualOfPureNoiseIsOrderOne(self):
        for seed in range(5):
            noise = np.random.default_rng(seed).standard_normal((N_THETA, 600))
            data = wavesim.SensorData(noise, RADIUS, 6.0, 1.0, 0.0)
            residual = inversion.rangeResidual(data, self.roots)
            self.assertGreater(residual, 0.5, msg=f"seed {seed}")
            self.assertLess(residual, 1.5, msg=f"seed {seed}")


class TestRangeResidualByTime(unittest.TestCase):
    def testLongerWindowsApproachTheRange(self):
        # detectors on grid nodes, so the residual is dominated by the truncated tail
        data = wavesim.forwardOperator(
            gaussianField(81, 0.16), 1.0, 0.0, nTheta=4, nT=960, finalTime=12.0, radius=RADIUS
        )
        results = inversion.rangeResidualByTime(data, besselRoots(2, 20), [6.0, 12.0])
        (shortTime, shortResidual), (longTime, longResidual) = results
        self.assertAlmostEqual(shortTime, 6.0)
        self.assertAlmostEqual(longTime, 12.0)
        self.assertLess(longResidual, shortResidual)

    def testRejectsTimesBeyondData(self):
        data = wavesim.SensorData(np.ones((4, 10)), 1.0, 2.0, 1.0, 0.0)
        with self.assertRaises(ValidationError):
            inversion.rangeResidualByTime(data, besselRoots(2, 3), [3.0])


class TestRadialKernel(unittest.TestCase):
    def testCorruptRootTableIsRejected(self):
        # order-0 column holds a root of J_1, so the weight denominator vanishes
        table = BesselRootTable([[3.8317059702075125, 7.015586669815619]])
        inverter = inversion.SeriesInverter(
            inversion.ReconstructionConfig(Formula.B, 1.0, 0.0, rootsPerOrder=1, gridPoints=11),
            table,
            2,
        )
        with self.assertRaises(NumericalError):
            inverter.radialKernel(0)

    def testReferenceFrequencies(self):
        frequencies = inversion.referenceFrequencies(2.0, 10.0)
        step = np.pi / 8.0
        self.assertAlmostEqual(frequencies[0], step)
        self.assertGreaterEqual(frequencies[-1], 10.0)
        self.assertLess(frequencies[-2], 10.0)


if __name__ == "__main__":
    unittest.main()
