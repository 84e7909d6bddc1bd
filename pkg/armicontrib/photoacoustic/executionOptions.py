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
Options for one photoacoustic command, decoupled from raw case settings.

Executers read these plain attributes instead of a settings object, so they can be
driven directly from Python as well as from the command line.
"""
from typing import List, Optional

from armi.settings import caseSettings

from . import settings
from .const import Formula
from .errors import ValidationError
from .inversion import ReconstructionConfig
from .phantoms import PhantomSpec


class PhotoacousticOptions:
    """Define options for one particular photoacoustic command execution."""

    def __init__(self, label=None):
        self.label = label if label else "photoacoustic"
        self.phantom: Optional[List[dict]] = None
        self.phantomSmoothing = None
        self.gridPoints = None
        self.nTheta = None
        self.nT = None
        self.finalTime = None
        self.radius = None
        self.c1 = None
        self.c2 = None
        self.noisePercent = None
        self.noiseSeed = None
        self.formula: Optional[Formula] = None
        self.rootsPerOrder = None
        self.inversionTimeSamples = None
        self.reconGridPoints = None
        self.noiseLevels: List[float] = []
        self.noiseSeeds: List[int] = []
        self.rangeThreshold = None
        self.rangeCheckTimes: List[float] = []
        self.workers = None
        self.writeCsv = False

        self.phantomPath = None
        self.sinogramPath = None
        self.truthPath = None
        self.reconstructionPath = None
        self.imagePath = None
        self.sweepCsvPath = None
        self.reportPath = None

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.label}>"

    def fromUserSettings(self, cs: caseSettings.Settings):
        """Set options from user settings"""
        self.phantom = [dict(entry) for entry in cs[settings.CONF_PHANTOM]]
        self.phantomSmoothing = cs[settings.CONF_PHANTOM_SMOOTHING]
        self.gridPoints = cs[settings.CONF_GRID_POINTS]
        self.nTheta = cs[settings.CONF_NUM_DETECTORS]
        self.nT = cs[settings.CONF_NUM_TIME_SAMPLES]
        self.finalTime = cs[settings.CONF_FINAL_TIME]
        self.radius = cs[settings.CONF_DETECTION_RADIUS]
        self.c1 = cs[settings.CONF_PRESSURE_WEIGHT]
        self.c2 = cs[settings.CONF_NORMAL_DERIVATIVE_WEIGHT]
        self.noisePercent = cs[settings.CONF_NOISE_PERCENT]
        self.noiseSeed = cs[settings.CONF_NOISE_SEED]
        self.formula = Formula.fromSetting(cs[settings.CONF_FORMULA])
        self.rootsPerOrder = cs[settings.CONF_ROOTS_PER_ORDER]
        self.inversionTimeSamples = cs[settings.CONF_INVERSION_TIME_SAMPLES] or None
        self.reconGridPoints = cs[settings.CONF_RECON_GRID_POINTS]
        self.noiseLevels = list(cs[settings.CONF_NOISE_LEVELS])
        self.noiseSeeds = list(cs[settings.CONF_NOISE_SEEDS])
        self.rangeThreshold = cs[settings.CONF_RANGE_THRESHOLD]
        self.rangeCheckTimes = list(cs[settings.CONF_RANGE_CHECK_TIMES])
        self.workers = cs[settings.CONF_WORKERS]
        self.writeCsv = cs[settings.CONF_WRITE_CSV]

        self.phantomPath = cs[settings.CONF_PHANTOM_PATH]
        self.sinogramPath = cs[settings.CONF_SINOGRAM_PATH]
        self.truthPath = cs[settings.CONF_TRUTH_PATH] or None
        self.reconstructionPath = cs[settings.CONF_RECONSTRUCTION_PATH]
        self.imagePath = cs[settings.CONF_IMAGE_PATH]
        self.sweepCsvPath = cs[settings.CONF_SWEEP_CSV_PATH]
        self.reportPath = cs[settings.CONF_REPORT_PATH]

    def phantomSpec(self):
        return PhantomSpec.fromSettings(self.phantom or [], self.phantomSmoothing, self.gridPoints)

    def reconstructionConfig(self, formula=None, c1=None, c2=None):
        """
        Inversion settings, optionally overriding the formula and the assumed data model.

        Without overrides the configured formula assumes the configured weights.
        """
        return ReconstructionConfig(
            formula or self.formula,
            self.c1 if c1 is None else c1,
            self.c2 if c2 is None else c2,
            rootsPerOrder=self.rootsPerOrder,
            gridPoints=self.reconGridPoints,
            radius=self.radius,
            timeSamples=self.inversionTimeSamples,
        )

    def validate(self):
        """
        Check option combinations before any compute starts.

        Raises
        ------
        ValidationError
            Listing every problem found.
        """
        problems = []
        if self.nTheta is not None and self.nTheta % 2:
            problems.append(
                f"the detector count must be even for reconstruction, got {self.nTheta}"
            )
        if self.radius is not None and not 0.0 < self.radius <= 1.0:
            problems.append(f"the detection radius must be within (0, 1], got {self.radius}")
        if (
            self.inversionTimeSamples is not None
            and self.nT is not None
            and self.inversionTimeSamples > self.nT
        ):
            problems.append(
                f"{self.inversionTimeSamples} inversion time samples exceed the "
                f"{self.nT} simulated samples"
            )
        if self.c1 == 0.0 and self.c2 == 0.0:
            problems.append("the data model weights c1 and c2 are both zero")
        if self.noisePercent is not None and self.noisePercent < 0.0:
            problems.append(f"the noise percentage must be non-negative, got {self.noisePercent}")
        if self.phantom is not None:
            try:
                self.phantomSpec()
            except ValidationError as err:
                problems.append(str(err))
        if problems:
            raise ValidationError(f"Invalid {self.label} options: " + "; ".join(problems))
