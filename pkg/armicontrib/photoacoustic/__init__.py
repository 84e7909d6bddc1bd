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
This is the package documentation for the ARMI photoacoustic tomography plugin.

It simulates two-dimensional photoacoustic measurements (pressure, normal derivative or
any weighted mix of both on a circle of detectors) and reconstructs the initial pressure
with Fourier-Bessel series formulas. It also measures how far given data are from the
range of the pressure-only measurement operator.

See :ref:`sec-index` for main documentation.

.. pyreverse:: armicontrib.photoacoustic -A
    :align: center
    :width: 90%

    Class inheritance diagram for :py:mod:`photoacoustic`.
"""

__version__ = "1.0.0"
