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
The photoacoustic demonstration application.

This package contains ``patdemo``, an ARMI application whose only purpose is to register
:py:class:`armicontrib.photoacoustic.plugin.PhotoacousticPlugin` and dispatch the ARMI
command line. With it ``patdemo simulate [settings file]`` simulates detector data,
``patdemo reconstruct [settings file]`` inverts them, and ``patdemo noise-sweep`` and
``patdemo range-check`` run the accompanying studies.
"""
from .__main__ import main

from .app import PatDemoApp
