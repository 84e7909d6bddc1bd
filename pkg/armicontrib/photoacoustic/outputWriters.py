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
Human-readable outputs: grayscale images, CSV tables and text reports.

Images are binary 16-bit PGM files (``P5``, maxval 65535, big-endian samples). A field is
drawn with ``y`` increasing upwards, so the first image row is the top grid row. The
default gray scale is symmetric about zero, which keeps negative reconstruction
artifacts visible.

Text reports are rendered with `Jinja2 <https://palletsprojects.com/p/jinja/>`_ from the
templates in ``armicontrib/photoacoustic/templates``.
"""
import numpy as np
import jinja2

from armi import runLog

from .errors import ValidationError

PGM_MAXVAL = 65535
CSV_FORMAT = "%.17g"

SWEEP_COLUMNS = (
    "c1",
    "c2",
    "formula",
    "noisePercent",
    "seed",
    "dataError",
    "reconstructionError",
)


def _grayLevels(values, valueRange=None):
    values = np.asarray(values, dtype=float)
    if valueRange is None:
        bound = float(np.abs(values).max()) if values.size else 0.0
        low, high = -bound, bound
    else:
        low, high = (float(v) for v in valueRange)
    if not high > low:
        if high < low:
            raise ValidationError(f"Image value range ({low}, {high}) is inverted")
        return np.full(values.shape, (PGM_MAXVAL + 1) // 2, dtype=">u2")
    scaled = np.rint((values - low) / (high - low) * PGM_MAXVAL)
    return np.clip(scaled, 0, PGM_MAXVAL).astype(">u2")


def writePgm(image, path):
    """Write rows of 16-bit gray levels (first row on top) as a binary PGM file."""
    height, width = image.shape
    with open(path, "wb") as stream:
        stream.write(f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii"))
        stream.write(np.ascontiguousarray(image, dtype=">u2").tobytes())


def readPgm(path):
    """Read a file written by :py:func:`writePgm` back into an array of gray levels."""
    with open(path, "rb") as stream:
        raw = stream.read()
    fields = raw.split(b"\n", 3)
    if len(fields) != 4 or fields[0] != b"P5" or int(fields[2]) != PGM_MAXVAL:
        raise ValidationError(f"`{path}` is not a 16-bit binary PGM written by this package")
    width, height = (int(n) for n in fields[1].split())
    return np.frombuffer(fields[3], dtype=">u2").reshape(height, width)


def exportImage(field, path, valueRange=None):
    """
    Write a field as a 16-bit grayscale image.

    Parameters
    ----------
    field : ScalarField2D
    path : str
    valueRange : (float, float), optional
        Values mapped to black and white. Defaults to ``(-m, m)`` with ``m`` the largest
        magnitude; a zero field becomes uniform mid gray.

    Notes
    -----
    The default range puts zero at mid gray, so a nonnegative field such as a phantom
    only uses levels 32768 to 65535. Pass ``valueRange=(field.values.min(),
    field.values.max())`` to stretch it over the full 0 to 65535 scale.
    """
    writePgm(np.flipud(_grayLevels(field.values, valueRange)), path)
    runLog.extra(f"Wrote image `{path}`")


def exportSinogramImage(data, path, valueRange=None, reference=None):
    """
    Write a sinogram as an image with detectors down and time across.

    With a ``reference`` sinogram the samples are scaled to the reference's l2 norm before
    drawing, so pressure-only and derivative-only data show on a comparable gray scale.
    The scaling affects the image only.
    """
    samples = data.samples
    norm = data.normL2()
    if reference is not None and norm > 0.0:
        samples = samples * (reference.normL2() / norm)
    writePgm(_grayLevels(samples, valueRange), path)
    runLog.extra(f"Wrote sinogram image `{path}`")


def writeCsv(values, path):
    """Write a 2-D array (or a field, top row first as stored) as comma-separated text."""
    values = getattr(values, "values", values)
    np.savetxt(path, np.atleast_2d(values), fmt=CSV_FORMAT, delimiter=",")


def readCsv(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


def writeSweepCsv(rows, path):
    """
    Write noise-sweep rows with a header line.

    Parameters
    ----------
    rows : iterable of dict
        Keys as in ``SWEEP_COLUMNS``.
    """
    with open(path, "w", newline="\n") as stream:
        stream.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for column in SWEEP_COLUMNS:
                value = row[column]
                cells.append(repr(float(value)) if isinstance(value, float) else str(value))
            stream.write(",".join(cells) + "\n")
    runLog.extra(f"Wrote sweep table `{path}`")


class ReportWriter:
    """
    Render text reports of reconstructions and range checks.

    Parameters
    ----------
    templateName : str
        File name inside the package ``templates`` directory.
    """

    def __init__(self, templateName):
        self.templateName = templateName
        self._env = None

    def write(self, stream, **templateData):
        """Render the template to a stream."""
        self._makeTemplateEnvironment()
        template = self._env.get_template(self.templateName)
        stream.write(template.render(**templateData))

    def writeFile(self, path, **templateData):
        with open(path, "w", newline="\n") as stream:
            self.write(stream, **templateData)
        runLog.extra(f"Wrote report `{path}`")

    def _makeTemplateEnvironment(self):
        self._env = jinja2.Environment(
            loader=jinja2.PackageLoader("armicontrib.photoacoustic", "templates"),
            trim_blocks=True,
            lstrip_blocks=True,
            undefined=jinja2.StrictUndefined,
            keep_trailing_newline=True,
        )
