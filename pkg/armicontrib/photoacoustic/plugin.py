# Copyright 2021 TerraPower, LLC
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
Registers elements of the photoacoustic plugin with ARMI.

.. pyreverse:: armicontrib.photoacoustic.plugin -A
    :align: center
    :width: 90%
"""

from armi import plugins

from . import entryPoints
from . import settings


class PhotoacousticPlugin(plugins.ArmiPlugin):
    """Plugin for photoacoustic simulation and reconstruction."""

    @staticmethod
    @plugins.HOOKIMPL
    def defineSettings():
        """Define settings."""
        return settings.defineSettings()

    @staticmethod
    @plugins.HOOKIMPL
    def defineSettingsValidators(inspector):
        """Define settings inspections."""
        return settings.defineSettingValidators(inspector)

    @staticmethod
    @plugins.HOOKIMPL
    def defineEntryPoints():
        """Expose the photoacoustic commands."""
        return list(entryPoints.ENTRY_POINTS)
