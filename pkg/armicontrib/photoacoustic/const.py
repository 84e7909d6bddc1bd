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

"""Some constants associated with photoacoustic simulation and reconstruction"""
from enum import Enum, IntEnum

#: Fields must vanish outside this radius so the periodic spectral solver cannot alias.
SUPPORT_RADIUS = 0.9

#: Values below this fraction of the field maximum count as outside the support.
SUPPORT_TOLERANCE = 1.0e-6

#: Largest allowed imaginary/real norm ratio after angular synthesis.
IMAGINARY_RESIDUE_LIMIT = 1.0e-8

#: Smallest admissible |J_{k+1}(w_{j,k})| in reconstruction weights.
WEIGHT_DENOMINATOR_FLOOR = 1.0e-8


class Formula(Enum):
    """
    Series inversion formula.

    ``A`` uses the cosine transform of the data and needs a non-zero weight on the normal
    derivative. ``B`` uses the time-weighted sine transform and is exact for pure pressure
    data.
    """

    A = "A"
    B = "B"

    @staticmethod
    def fromSetting(value):
        """Build a Formula from a case-insensitive settings value."""
        try:
            return Formula(str(value).strip().upper())
        except ValueError:
            raise ValueError(
                f"Unknown inversion formula `{value}`; choose one of "
                f"{[f.value for f in Formula]}."
            )


class ExitCode(IntEnum):
    """Process exit codes of the command-line entry points."""

    SUCCESS = 0
    CHECK_FAILED = 1
    VALIDATION_ERROR = 2
    NUMERICAL_FAILURE = 3


#: Data models (c1, c2) compared by the noise sweep and the matched/mismatched study.
DATA_MODELS = ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
