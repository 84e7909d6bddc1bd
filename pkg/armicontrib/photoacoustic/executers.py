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
Contains components that read inputs, run, and write outputs of the photoacoustic commands.

Each command of the plugin is backed by one short-lived executer: it is created from a
:py:class:`~armicontrib.photoacoustic.executionOptions.PhotoacousticOptions`, its
:py:meth:`PhotoacousticExecuter.run` reads inputs, computes, writes outputs and returns
the main result, and then it is discarded. Executers never touch raw case settings, so
they can be driven from Python as well as from the entry points.

See Also
--------
~armicontrib.photoacoustic.entryPoints : Command-line front ends of these executers.
"""
import os
from collections import defaultdict
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import tabulate

from armi import runLog
from armi.utils import codeTiming

from . import const
from . import inversion
from . import outputWriters
from . import phantoms
from . import wavesim
from .binaryIO import containerFile
from .const import Formula
from .errors import ValidationError
from .specfun import besselRoots


class ReconstructionResult(NamedTuple):
    field: wavesim.ScalarField2D
    error: Optional[phantoms.ErrorMeasure]


class RangeCheckResult(NamedTuple):
    residual: float
    threshold: float
    passed: bool
    byTime: List[Tuple[float, float]]


def siblingPath(path, extension):
    """``path`` with its extension replaced."""
    return os.path.splitext(path)[0] + extension


def loadSensorData(path):
    data = containerFile.load(path)
    if not isinstance(data, wavesim.SensorData):
        raise ValidationError(f"`{path}` holds a {type(data).__name__}, expected a sinogram")
    return data


def loadField(path):
    field = containerFile.load(path)
    if not isinstance(field, wavesim.ScalarField2D):
        raise ValidationError(f"`{path}` holds a {type(field).__name__}, expected a field")
    return field


class PhotoacousticExecuter:
    """
    A short-lived object that coordinates reading, computing and writing for one command.

    Parameters
    ----------
    options: executionOptions.PhotoacousticOptions
        run settings
    """

    def __init__(self, options):
        self.options = options
        self.result = None

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.options.label}>"

    @codeTiming.timed
    def run(self):
        """Validate options, then read, execute and write. Returns the main result."""
        self.options.validate()
        self._readInput()
        self.result = self._execute()
        self._writeOutput()
        return self.result

    def _readInput(self):
        pass

    def _execute(self):
        raise NotImplementedError

    def _writeOutput(self):
        pass

    def _writeFieldOutputs(self, field, containerPath, imagePath):
        containerFile.save(field, containerPath)
        outputWriters.exportImage(field, imagePath)
        if self.options.writeCsv:
            outputWriters.writeCsv(field, siblingPath(imagePath, ".csv"))


class PhantomExecuter(PhotoacousticExecuter):
    """Rasterize the configured phantom and store it."""

    @codeTiming.timed
    def _execute(self):
        spec = self.options.phantomSpec()
        runLog.info(f"Rasterizing {spec}")
        return phantoms.rasterize(spec)

    def _writeOutput(self):
        self._writeFieldOutputs(
            self.result, self.options.phantomPath, siblingPath(self.options.phantomPath, ".pgm")
        )
        runLog.info(f"Phantom written to `{self.options.phantomPath}`")


class SimulationExecuter(PhotoacousticExecuter):
    """Simulate noisy detector data of the configured phantom."""

    def __init__(self, options):
        PhotoacousticExecuter.__init__(self, options)
        self.phantom = None

    @codeTiming.timed
    def _execute(self):
        opts = self.options
        self.phantom = phantoms.rasterize(opts.phantomSpec())
        runLog.info(
            f"Simulating {opts.nTheta} detectors x {opts.nT} samples up to T = {opts.finalTime} "
            f"on a {opts.gridPoints}^2 grid with (c1, c2) = ({opts.c1}, {opts.c2})"
        )
        clean = wavesim.forwardOperator(
            self.phantom,
            opts.c1,
            opts.c2,
            opts.nTheta,
            opts.nT,
            opts.finalTime,
            opts.radius,
            opts.workers,
        )
        noisy = phantoms.addNoise(clean, opts.noisePercent, opts.noiseSeed)
        if opts.noisePercent:
            runLog.info(
                f"Added {opts.noisePercent} % noise (seed {opts.noiseSeed}); relative data error "
                f"{phantoms.relativeDataError(clean, noisy):.4f}"
            )
        return noisy

    def _writeOutput(self):
        opts = self.options
        containerFile.save(self.phantom, opts.phantomPath)
        containerFile.save(self.result, opts.sinogramPath)
        outputWriters.exportSinogramImage(self.result, siblingPath(opts.sinogramPath, ".pgm"))
        if opts.writeCsv:
            outputWriters.writeCsv(self.result.samples, siblingPath(opts.sinogramPath, ".csv"))
        runLog.info(f"Sinogram written to `{opts.sinogramPath}`")


class ReconstructionExecuter(PhotoacousticExecuter):
    """Reconstruct a stored sinogram and compare with an optional truth."""

    def __init__(self, options):
        PhotoacousticExecuter.__init__(self, options)
        self.data = None
        self.truth = None
        self.config = None

    def _readInput(self):
        self.data = loadSensorData(self.options.sinogramPath)
        if self.options.truthPath:
            self.truth = loadField(self.options.truthPath)

    @codeTiming.timed
    def _execute(self):
        self.config = self.options.reconstructionConfig()
        data = self.data
        if (data.c1, data.c2) != (self.config.c1, self.config.c2):
            runLog.warning(
                f"Sinogram was made with (c1, c2) = ({data.c1}, {data.c2}) but formula "
                f"{self.config.formula.value} assumes ({self.config.c1}, {self.config.c2})"
            )
        roots = besselRoots(data.nTheta // 2, self.config.rootsPerOrder)
        runLog.info(f"Reconstructing {data} with {self.config}")
        field = inversion.invert(data, self.config, roots)
        error = None
        if self.truth is not None:
            error = phantoms.relativeError(field, self.truth)
            runLog.info(f"Reconstruction error: {error.value:.6f} (relative: {error.isRelative})")
        return ReconstructionResult(field, error)

    def _writeOutput(self):
        opts = self.options
        self._writeFieldOutputs(self.result.field, opts.reconstructionPath, opts.imagePath)
        samplesUsed = self.config.timeSamples or self.data.nT
        outputWriters.ReportWriter("reconstruction.txt").writeFile(
            opts.reportPath,
            sinogramPath=opts.sinogramPath,
            outputPath=opts.reconstructionPath,
            data=self.data,
            config=self.config,
            samplesUsed=samplesUsed,
            timeUsed=self.data.timeStep * samplesUsed,
            error=self.result.error,
        )
        runLog.info(f"Reconstruction written to `{opts.reconstructionPath}`")


class NoiseSweepExecuter(PhotoacousticExecuter):
    """
    Reconstruction error against noise for every data model and formula.

    The boundary traces are simulated once; every data model is a weighted sum of them.
    Each (model, formula, noise level, seed) combination yields one table row.
    """

    @codeTiming.timed
    def _execute(self):
        opts = self.options
        spec = opts.phantomSpec()
        phantom = phantoms.rasterize(spec)
        truth = phantoms.rasterize(
            phantoms.PhantomSpec(spec.primitives, spec.smoothing, opts.reconGridPoints)
        )
        pressure, normal = wavesim.boundaryTraces(
            phantom, opts.nTheta, opts.nT, opts.finalTime, opts.radius, opts.workers
        )
        roots = besselRoots(opts.nTheta // 2, opts.rootsPerOrder)

        rows = []
        for c1, c2 in const.DATA_MODELS:
            clean = wavesim.combineTraces(pressure, normal, c1, c2, opts.finalTime, opts.radius)
            for formula in (Formula.B, Formula.A):
                config = inversion.ReconstructionConfig.assuming(
                    formula,
                    c1,
                    c2,
                    rootsPerOrder=opts.rootsPerOrder,
                    gridPoints=opts.reconGridPoints,
                    radius=opts.radius,
                    timeSamples=opts.inversionTimeSamples,
                )
                for percent in opts.noiseLevels:
                    for seed in opts.noiseSeeds:
                        noisy = phantoms.addNoise(clean, percent, seed)
                        field = inversion.invert(noisy, config, roots)
                        rows.append(
                            {
                                "c1": c1,
                                "c2": c2,
                                "formula": formula.value,
                                "noisePercent": float(percent),
                                "seed": int(seed),
                                "dataError": phantoms.relativeDataError(clean, noisy),
                                "reconstructionError": phantoms.relativeError(field, truth).value,
                            }
                        )
                runLog.extra(f"Finished noise sweep of formula {formula.value} on M({c1}, {c2})")
        self._logSummary(rows)
        return rows

    @staticmethod
    def _logSummary(rows):
        table = [
            [c1, c2, formula, percent, dataError, reconError]
            for (c1, c2, formula, percent), (dataError, reconError) in sorted(
                summarize(rows).items()
            )
        ]
        headers = ["c1", "c2", "formula", "noise %", "data error", "recon error"]
        runLog.info(
            "Seed-averaged noise sweep:\n"
            + tabulate.tabulate(table, headers=headers, floatfmt=".4f")
        )

    def _writeOutput(self):
        outputWriters.writeSweepCsv(self.result, self.options.sweepCsvPath)
        runLog.info(f"Noise sweep written to `{self.options.sweepCsvPath}`")


def summarize(rows):
    """
    Seed averages of a noise sweep.

    Returns
    -------
    dict
        ``(c1, c2, formula, noisePercent) -> (mean data error, mean reconstruction error)``.
    """
    groups = defaultdict(list)
    for row in rows:
        key = (row["c1"], row["c2"], row["formula"], row["noisePercent"])
        groups[key].append((row["dataError"], row["reconstructionError"]))
    return {key: tuple(np.mean(values, axis=0)) for key, values in groups.items()}


class RangeCheckExecuter(PhotoacousticExecuter):
    """Measure the range residual of a stored sinogram against a threshold."""

    def __init__(self, options):
        PhotoacousticExecuter.__init__(self, options)
        self.data = None
        self.roots = None

    def _readInput(self):
        self.data = loadSensorData(self.options.sinogramPath)

    @codeTiming.timed
    def _execute(self):
        opts = self.options
        self.roots = besselRoots(self.data.nTheta // 2, opts.rootsPerOrder)
        residual = inversion.rangeResidual(self.data, self.roots)
        byTime = []
        if opts.rangeCheckTimes:
            byTime = inversion.rangeResidualByTime(self.data, self.roots, opts.rangeCheckTimes)
        passed = residual <= opts.rangeThreshold
        runLog.info(
            f"Range residual {residual:.4e} against threshold {opts.rangeThreshold:.4e}: "
            f"{'pass' if passed else 'FAIL'}"
        )
        return RangeCheckResult(residual, opts.rangeThreshold, passed, byTime)

    def _writeOutput(self):
        outputWriters.ReportWriter("rangeCheck.txt").writeFile(
            self.options.reportPath,
            sinogramPath=self.options.sinogramPath,
            data=self.data,
            roots=self.roots,
            residual=self.result.residual,
            threshold=self.result.threshold,
            passed=self.result.passed,
            byTime=self.result.byTime,
        )
