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

r"""
Command-line entry points of the photoacoustic plugin.

Every command takes an optional case-settings file and ``--<settingName>`` overrides for
scalar settings, for example::

    patdemo simulate experiment.yaml --patNoisePercent=10 --patNoiseSeed=3
    patdemo reconstruct experiment.yaml --patFormula=A --patTruthPath=phantom.pat
    patdemo range-check --patSinogramPath=sinogram.pat

Exit codes are 0 on success, 1 when a range check fails, 2 for invalid settings or
unreadable containers and 3 for numerical failures.
"""
from armi import runLog
from armi.cli.entryPoint import EntryPoint

from . import executers
from . import settings
from .const import ExitCode
from .errors import ContainerError, NumericalError, ValidationError
from .executionOptions import PhotoacousticOptions

#: Settings every command can override from the command line.
COMMON_SETTINGS = (
    settings.CONF_WORKERS,
    settings.CONF_GRID_POINTS,
    settings.CONF_PHANTOM_SMOOTHING,
)

SIMULATION_SETTINGS = (
    settings.CONF_NUM_DETECTORS,
    settings.CONF_NUM_TIME_SAMPLES,
    settings.CONF_FINAL_TIME,
    settings.CONF_DETECTION_RADIUS,
    settings.CONF_PRESSURE_WEIGHT,
    settings.CONF_NORMAL_DERIVATIVE_WEIGHT,
)

INVERSION_SETTINGS = (
    settings.CONF_FORMULA,
    settings.CONF_ROOTS_PER_ORDER,
    settings.CONF_INVERSION_TIME_SAMPLES,
    settings.CONF_RECON_GRID_POINTS,
)


class PhotoacousticEntryPoint(EntryPoint):
    """
    Base of the photoacoustic commands.

    Subclasses name the settings they expose and the executer they run; this class
    turns settings into options and exceptions into exit codes.
    """

    settingsArgument = "optional"
    executerClass = None
    exposedSettings = ()

    def addOptions(self):
        for name in COMMON_SETTINGS + self.exposedSettings:
            self.createOptionFromSetting(name)

    def invoke(self):
        options = PhotoacousticOptions(self.name)
        try:
            options.fromUserSettings(self.cs)
            result = self.executerClass(options).run()
        except (ValidationError, ContainerError) as err:
            runLog.error(f"{self.name}: {err}")
            return int(ExitCode.VALIDATION_ERROR)
        except NumericalError as err:
            runLog.error(f"{self.name} failed numerically: {err}")
            return int(ExitCode.NUMERICAL_FAILURE)
        except ValueError as err:
            # settings that cannot be interpreted, e.g. an unknown formula name
            runLog.error(f"{self.name}: {err}")
            return int(ExitCode.VALIDATION_ERROR)
        return int(self.exitCode(result))

    def exitCode(self, _result):
        return ExitCode.SUCCESS


class PhantomCommand(PhotoacousticEntryPoint):
    """Rasterize the configured phantom into a field container and image."""

    name = "phantom"
    description = __doc__
    executerClass = executers.PhantomExecuter
    exposedSettings = (settings.CONF_PHANTOM_PATH, settings.CONF_WRITE_CSV)


class SimulateCommand(PhotoacousticEntryPoint):
    """Simulate detector data of the configured phantom, optionally with noise."""

    name = "simulate"
    description = __doc__
    executerClass = executers.SimulationExecuter
    exposedSettings = SIMULATION_SETTINGS + (
        settings.CONF_NOISE_PERCENT,
        settings.CONF_NOISE_SEED,
        settings.CONF_PHANTOM_PATH,
        settings.CONF_SINOGRAM_PATH,
        settings.CONF_WRITE_CSV,
    )


class ReconstructCommand(PhotoacousticEntryPoint):
    """Reconstruct the initial pressure from a stored sinogram."""

    name = "reconstruct"
    description = __doc__
    executerClass = executers.ReconstructionExecuter
    exposedSettings = (
        INVERSION_SETTINGS
        + SIMULATION_SETTINGS
        + (
            settings.CONF_SINOGRAM_PATH,
            settings.CONF_TRUTH_PATH,
            settings.CONF_RECONSTRUCTION_PATH,
            settings.CONF_IMAGE_PATH,
            settings.CONF_REPORT_PATH,
            settings.CONF_WRITE_CSV,
        )
    )


class NoiseSweepCommand(PhotoacousticEntryPoint):
    """Tabulate reconstruction error against data noise for all data models and formulas."""

    name = "noise-sweep"
    description = __doc__
    executerClass = executers.NoiseSweepExecuter
    exposedSettings = (
        SIMULATION_SETTINGS
        + INVERSION_SETTINGS
        + (settings.CONF_SWEEP_CSV_PATH,)
    )


class RangeCheckCommand(PhotoacousticEntryPoint):
    """Check how far a stored sinogram is from the range of the pressure-only data model."""

    name = "range-check"
    description = __doc__
    executerClass = executers.RangeCheckExecuter
    exposedSettings = (
        settings.CONF_ROOTS_PER_ORDER,
        settings.CONF_RANGE_THRESHOLD,
        settings.CONF_SINOGRAM_PATH,
        settings.CONF_REPORT_PATH,
    )

    def exitCode(self, result):
        return ExitCode.SUCCESS if result.passed else ExitCode.CHECK_FAILED


ENTRY_POINTS = [
    PhantomCommand,
    SimulateCommand,
    ReconstructCommand,
    NoiseSweepCommand,
    RangeCheckCommand,
]
