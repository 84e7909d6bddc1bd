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
Exceptions raised by the photoacoustic plugin.

Every error derives from :py:class:`PhotoacousticError`. The intermediate classes also
derive from the matching builtin (``ValueError`` for bad input, ``RuntimeError`` for
numerical breakdown) so generic callers can keep catching those. The entry points map
these classes onto process exit codes (see :py:class:`~armicontrib.photoacoustic.const.ExitCode`).
"""


class PhotoacousticError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhotoacousticError, ValueError):
    """An argument or configuration value violates a precondition."""


class SupportError(ValidationError):
    """A field has non-negligible values outside the admissible support radius."""


class GeometryMismatchError(ValidationError):
    """Data, configuration and grids disagree on geometry."""


class NumericalError(PhotoacousticError, RuntimeError):
    """A numerical procedure failed to deliver a trustworthy result."""


class RootRefinementError(NumericalError):
    """Bessel root refinement did not converge within the iteration cap."""


class ImaginaryResidueError(NumericalError):
    """The angular synthesis of a reconstruction left a large imaginary part."""


class ContainerError(PhotoacousticError, ValueError):
    """A container file could not be read."""


class MalformedHeaderError(ContainerError):
    """The container header is missing, truncated or not parseable."""


class ShapeMismatchError(ContainerError):
    """The container payload does not hold the number of values the header announces."""


class VersionMismatchError(ContainerError):
    """The container was written with an unsupported major format version."""
