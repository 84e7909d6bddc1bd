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
Define photoacoustic ARMI user-configurable settings.

This module implements the :py:meth:`ArmiPlugin.defineSettings()
<armi:armi.plugins.ArmiPlugin.defineSettings()>` and
:py:meth:`ArmiPlugin.defineSettingsValidators()
<armi:armi.plugins.ArmiPlugin.defineSettingsValidators()>` Plugin APIs. Every command
of the plugin reads its configuration from these settings, so a case settings file is
a complete, reproducible experiment manifest.
"""
import voluptuous as vol

from armi.settings import setting

try:
    from armi.settings import settingsValidation
except ImportError:  # ARMI releases before the validation module moved
    from armi.operators import settingsValidation

from . import const
from . import phantoms


CONF_PHANTOM = "patPhantom"
CONF_PHANTOM_SMOOTHING = "patPhantomSmoothing"
CONF_GRID_POINTS = "patGridPoints"
CONF_NUM_DETECTORS = "patNumDetectors"
CONF_NUM_TIME_SAMPLES = "patNumTimeSamples"
CONF_FINAL_TIME = "patFinalTime"
CONF_DETECTION_RADIUS = "patDetectionRadius"
CONF_PRESSURE_WEIGHT = "patPressureWeight"
CONF_NORMAL_DERIVATIVE_WEIGHT = "patNormalDerivativeWeight"
CONF_NOISE_PERCENT = "patNoisePercent"
CONF_NOISE_SEED = "patNoiseSeed"
CONF_FORMULA = "patFormula"
CONF_ROOTS_PER_ORDER = "patRootsPerOrder"
CONF_INVERSION_TIME_SAMPLES = "patInversionTimeSamples"
CONF_RECON_GRID_POINTS = "patReconGridPoints"
CONF_NOISE_LEVELS = "patNoiseLevels"
CONF_NOISE_SEEDS = "patNoiseSeeds"
CONF_RANGE_THRESHOLD = "patRangeThreshold"
CONF_RANGE_CHECK_TIMES = "patRangeCheckTimes"
CONF_WORKERS = "patWorkers"
CONF_WRITE_CSV = "patWriteCsv"

CONF_PHANTOM_PATH = "patPhantomPath"
CONF_SINOGRAM_PATH = "patSinogramPath"
CONF_TRUTH_PATH = "patTruthPath"
CONF_RECONSTRUCTION_PATH = "patReconstructionPath"
CONF_IMAGE_PATH = "patImagePath"
CONF_SWEEP_CSV_PATH = "patSweepCsvPath"
CONF_REPORT_PATH = "patReportPath"


PRIMITIVE_SCHEMA = vol.Schema(
    {
        vol.Required("shape"): vol.All(str, vol.Lower, vol.In(sorted(phantoms.SHAPES))),
        vol.Required("center"): vol.All([vol.Coerce(float)], vol.Length(min=2, max=2)),
        vol.Optional("radius"): vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False)),
        vol.Optional("innerRadius"): vol.All(vol.Coerce(float), vol.Range(min=0.0)),
        vol.Optional("outerRadius"): vol.All(
            vol.Coerce(float), vol.Range(min=0.0, min_included=False)
        ),
        vol.Optional("width"): vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False)),
        vol.Optional("amplitude"): vol.Coerce(float),
    }
)

PHANTOM_SCHEMA = vol.Schema([PRIMITIVE_SCHEMA])

_POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
_POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False))
_NON_NEGATIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0.0))


def defineSettings():
    settings = [
        setting.Setting(
            CONF_PHANTOM,
            default=[phantoms.primitiveToSettings(p) for p in phantoms.DEFAULT_PRIMITIVES],
            label="Phantom primitives",
            description="List of phantom primitives. Each entry has a `shape` (disk, annulus "
            "or gaussian), a two-element `center`, its size (`radius`; `innerRadius` and "
            "`outerRadius`; or `width`) and an `amplitude`.",
            schema=PHANTOM_SCHEMA,
        ),
        setting.Setting(
            CONF_PHANTOM_SMOOTHING,
            default=phantoms.DEFAULT_SMOOTHING,
            label="Phantom smoothing",
            description="Standard deviation of the Gaussian mollifier applied to the phantom. "
            "Zero keeps sharp edges.",
            schema=_NON_NEGATIVE_FLOAT,
        ),
        setting.Setting(
            CONF_GRID_POINTS,
            default=280,
            label="Simulation grid points",
            description="Nodes per axis of the square simulation grid over [-1, 1]^2.",
            schema=vol.All(vol.Coerce(int), vol.Range(min=2)),
        ),
        setting.Setting(
            CONF_NUM_DETECTORS,
            default=300,
            label="Number of detectors",
            description="Equispaced detectors on the detection circle. Reconstruction needs "
            "an even number.",
            schema=_POSITIVE_INT,
        ),
        setting.Setting(
            CONF_NUM_TIME_SAMPLES,
            default=1600,
            label="Number of time samples",
            description="Time samples per detector in the simulated sinogram.",
            schema=_POSITIVE_INT,
        ),
        setting.Setting(
            CONF_FINAL_TIME,
            default=6.0,
            label="Final time",
            description="Length of the simulated measurement window.",
            schema=_POSITIVE_FLOAT,
        ),
        setting.Setting(
            CONF_DETECTION_RADIUS,
            default=1.0,
            label="Detection radius",
            description="Radius of the detection circle. At most 1 so that detectors lie on "
            "the simulation grid.",
            schema=vol.All(vol.Coerce(float), vol.Range(min=0.0, max=1.0, min_included=False)),
        ),
        setting.Setting(
            CONF_PRESSURE_WEIGHT,
            default=1.0,
            label="Pressure weight c1",
            description="Weight of the pressure in the direction-dependent data model.",
            schema=vol.Coerce(float),
        ),
        setting.Setting(
            CONF_NORMAL_DERIVATIVE_WEIGHT,
            default=0.0,
            label="Normal derivative weight c2",
            description="Weight of the outward normal derivative of the pressure in the data "
            "model.",
            schema=vol.Coerce(float),
        ),
        setting.Setting(
            CONF_NOISE_PERCENT,
            default=0.0,
            label="Noise percentage",
            description="Standard deviation of added white Gaussian noise, in percent of the "
            "root-mean-square of the clean sinogram.",
            schema=_NON_NEGATIVE_FLOAT,
        ),
        setting.Setting(
            CONF_NOISE_SEED,
            default=0,
            label="Noise seed",
            description="Seed of the random stream used for noise.",
            schema=vol.All(vol.Coerce(int), vol.Range(min=0)),
        ),
        setting.Setting(
            CONF_FORMULA,
            default=const.Formula.B.value,
            label="Inversion formula",
            description="Formula A uses the cosine transform and needs a non-zero normal "
            "derivative weight. Formula B uses the time-weighted sine transform and needs "
            "a non-zero pressure weight.",
            options=[f.value for f in const.Formula],
        ),
        setting.Setting(
            CONF_ROOTS_PER_ORDER,
            default=180,
            label="Bessel roots per order",
            description="Number of Fourier-Bessel terms per angular order.",
            schema=_POSITIVE_INT,
        ),
        setting.Setting(
            CONF_INVERSION_TIME_SAMPLES,
            default=1200,
            label="Time samples used by the inversion",
            description="Leading time samples of the sinogram used for reconstruction; 0 "
            "uses them all.",
            schema=vol.All(vol.Coerce(int), vol.Range(min=0)),
        ),
        setting.Setting(
            CONF_RECON_GRID_POINTS,
            default=280,
            label="Reconstruction grid points",
            description="Nodes per axis of the reconstruction grid.",
            schema=vol.All(vol.Coerce(int), vol.Range(min=2)),
        ),
        setting.Setting(
            CONF_NOISE_LEVELS,
            default=[0.0, 10.0, 25.0, 50.0],
            label="Noise sweep levels",
            description="Noise percentages evaluated by the noise sweep.",
            schema=vol.Schema([_NON_NEGATIVE_FLOAT]),
        ),
        setting.Setting(
            CONF_NOISE_SEEDS,
            default=[0, 1, 2, 3, 4],
            label="Noise sweep seeds",
            description="Seeds averaged over by the noise sweep.",
            schema=vol.Schema([vol.All(vol.Coerce(int), vol.Range(min=0))]),
        ),
        setting.Setting(
            CONF_RANGE_THRESHOLD,
            default=0.1,
            label="Range check threshold",
            description="The range check passes when the range residual is at most this value.",
            schema=_NON_NEGATIVE_FLOAT,
        ),
        setting.Setting(
            CONF_RANGE_CHECK_TIMES,
            default=[],
            label="Range check truncation times",
            description="Optional final times at which the range residual of the leading part "
            "of the sinogram is also reported.",
            schema=vol.Schema([_POSITIVE_FLOAT]),
        ),
        setting.Setting(
            CONF_WORKERS,
            default=1,
            label="FFT workers",
            description="Upper bound on threads used by FFTs.",
            schema=_POSITIVE_INT,
        ),
        setting.Setting(
            CONF_WRITE_CSV,
            default=False,
            label="Write CSV",
            description="Also write fields as comma-separated text next to their images.",
        ),
        setting.Setting(
            CONF_PHANTOM_PATH,
            default="phantom.pat",
            label="Phantom container",
            description="Container holding the rasterized phantom.",
        ),
        setting.Setting(
            CONF_SINOGRAM_PATH,
            default="sinogram.pat",
            label="Sinogram container",
            description="Container holding simulated or measured data.",
        ),
        setting.Setting(
            CONF_TRUTH_PATH,
            default="",
            label="Ground truth container",
            description="Optional field compared against the reconstruction.",
        ),
        setting.Setting(
            CONF_RECONSTRUCTION_PATH,
            default="reconstruction.pat",
            label="Reconstruction container",
            description="Container receiving the reconstructed field.",
        ),
        setting.Setting(
            CONF_IMAGE_PATH,
            default="reconstruction.pgm",
            label="Image file",
            description="16-bit grayscale image of the main output of a command.",
        ),
        setting.Setting(
            CONF_SWEEP_CSV_PATH,
            default="noiseSweep.csv",
            label="Noise sweep table",
            description="CSV table written by the noise sweep.",
        ),
        setting.Setting(
            CONF_REPORT_PATH,
            default="report.txt",
            label="Report file",
            description="Text report written by reconstruct and range-check.",
        ),
    ]
    return settings


def _phantomProblem(cs):
    """Describe why the configured phantom is unusable, or return None."""
    try:
        phantoms.PhantomSpec.fromSettings(
            cs[CONF_PHANTOM], cs[CONF_PHANTOM_SMOOTHING], cs[CONF_GRID_POINTS]
        )
    except ValueError as err:
        return str(err)
    return None


def defineSettingValidators(inspector):
    """Define photoacoustic setting validations."""
    queries = [
        settingsValidation.Query(
            lambda: inspector.cs[CONF_FORMULA] == const.Formula.A.value
            and inspector.cs[CONF_NORMAL_DERIVATIVE_WEIGHT] == 0.0,
            f"Formula A divides by `{CONF_NORMAL_DERIVATIVE_WEIGHT}`, which is zero.",
            "Switch to formula B?",
            lambda: inspector._assignCS(CONF_FORMULA, const.Formula.B.value),
        ),
        settingsValidation.Query(
            lambda: inspector.cs[CONF_FORMULA] == const.Formula.B.value
            and inspector.cs[CONF_PRESSURE_WEIGHT] == 0.0,
            f"Formula B divides by `{CONF_PRESSURE_WEIGHT}`, which is zero.",
            "Switch to formula A?",
            lambda: inspector._assignCS(CONF_FORMULA, const.Formula.A.value),
        ),
        settingsValidation.Query(
            lambda: inspector.cs[CONF_NUM_DETECTORS] % 2 == 1,
            f"Reconstruction needs an even `{CONF_NUM_DETECTORS}`, got "
            f"{inspector.cs[CONF_NUM_DETECTORS]}.",
            "Add one detector?",
            lambda: inspector._assignCS(
                CONF_NUM_DETECTORS, inspector.cs[CONF_NUM_DETECTORS] + 1
            ),
        ),
        settingsValidation.Query(
            lambda: inspector.cs[CONF_INVERSION_TIME_SAMPLES]
            > inspector.cs[CONF_NUM_TIME_SAMPLES],
            f"`{CONF_INVERSION_TIME_SAMPLES}` exceeds `{CONF_NUM_TIME_SAMPLES}`.",
            "Use all simulated time samples?",
            lambda: inspector._assignCS(CONF_INVERSION_TIME_SAMPLES, 0),
        ),
        settingsValidation.Query(
            lambda: _phantomProblem(inspector.cs) is not None,
            f"The phantom is not usable: {_phantomProblem(inspector.cs)}",
            "Shrink or move the primitives so they stay inside the support radius.",
            inspector.NO_ACTION,
        ),
    ]
    return queries
