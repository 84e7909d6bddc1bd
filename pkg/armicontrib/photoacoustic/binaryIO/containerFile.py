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
Read/write self-describing array containers.

A container file is::

    header  = UTF-8 JSON object, keys sorted, no NUL bytes
    NUL     = a single 0x00 byte
    payload = prod(shape) little-endian IEEE-754 doubles in row-major order

The header holds::

    {
      "dtype": "<f8",
      "format": "photoacoustic-container",
      "metadata": {...},
      "order": "C",
      "shape": [n0, n1],
      "type": "ScalarField2D" | "SensorData" | "BesselRootTable",
      "version": "1.0"
    }

Readers accept any minor version of the supported major version. Keys they do not
know are ignored. Writing the same object twice produces identical bytes.
"""
import json

import numpy as np

from armi import runLog

from ..errors import MalformedHeaderError, ShapeMismatchError, VersionMismatchError
from ..specfun import BesselRootTable
from ..wavesim import ScalarField2D, SensorData

FORMAT_NAME = "photoacoustic-container"
FORMAT_VERSION = (1, 0)
DTYPE = "<f8"

SCALAR_FIELD = "ScalarField2D"
SENSOR_DATA = "SensorData"
ROOT_TABLE = "BesselRootTable"

_SENSOR_KEYS = ("radius", "finalTime", "c1", "c2")
_REQUIRED_KEYS = ("format", "version", "type", "shape", "dtype")


class ContainerStream:
    """
    Convert fields, sinograms and root tables to and from container bytes.

    Examples
    --------
    >>> ContainerStream.writeBinary(data, "sinogram.pat")
    >>> data = ContainerStream.readBinary("sinogram.pat")
    """

    @staticmethod
    def toBytes(obj):
        typeName, values, metadata = _describe(obj)
        header = {
            "dtype": DTYPE,
            "format": FORMAT_NAME,
            "metadata": metadata,
            "order": "C",
            "shape": list(values.shape),
            "type": typeName,
            "version": "{}.{}".format(*FORMAT_VERSION),
        }
        text = json.dumps(header, sort_keys=True, allow_nan=False).encode("utf-8")
        payload = np.ascontiguousarray(values, dtype=DTYPE).tobytes()
        return text + b"\0" + payload

    @staticmethod
    def fromBytes(raw):
        header, payload = _splitHeader(raw)
        shape = tuple(header["shape"])
        expected = int(np.prod(shape, dtype=np.int64)) * np.dtype(DTYPE).itemsize
        if len(payload) != expected:
            raise ShapeMismatchError(
                f"Header announces shape {shape} ({expected} bytes) but the payload holds "
                f"{len(payload)} bytes"
            )
        values = np.frombuffer(payload, dtype=DTYPE).reshape(shape).astype(float)
        return _build(header["type"], values, header.get("metadata", {}))

    @classmethod
    def writeBinary(cls, obj, path):
        raw = cls.toBytes(obj)
        with open(path, "wb") as stream:
            stream.write(raw)
        runLog.extra(f"Wrote {type(obj).__name__} container `{path}` ({len(raw)} bytes)")

    @classmethod
    def readBinary(cls, path):
        with open(path, "rb") as stream:
            raw = stream.read()
        obj = cls.fromBytes(raw)
        runLog.extra(f"Read {obj} from `{path}`")
        return obj


def save(obj, path):
    """Write a ScalarField2D, SensorData or BesselRootTable container."""
    ContainerStream.writeBinary(obj, path)


def load(path):
    """Read a container written by :py:func:`save`."""
    return ContainerStream.readBinary(path)


def _describe(obj):
    if isinstance(obj, ScalarField2D):
        metadata = dict(obj.metadata)
        metadata["extent"] = [-1.0, 1.0]
        return SCALAR_FIELD, obj.values, metadata
    if isinstance(obj, SensorData):
        metadata = dict(obj.metadata)
        metadata.update({key: getattr(obj, key) for key in _SENSOR_KEYS})
        return SENSOR_DATA, obj.samples, metadata
    if isinstance(obj, BesselRootTable):
        metadata = {"maxOrder": obj.maxOrder, "rootsPerOrder": obj.rootsPerOrder}
        return ROOT_TABLE, obj.roots, metadata
    raise TypeError(f"Cannot store {type(obj).__name__} in a container")


def _build(typeName, values, metadata):
    metadata = dict(metadata)
    if typeName == SCALAR_FIELD:
        metadata.pop("extent", None)
        return ScalarField2D(values, metadata)
    if typeName == SENSOR_DATA:
        try:
            geometry = {key: float(metadata.pop(key)) for key in _SENSOR_KEYS}
        except (KeyError, TypeError, ValueError) as err:
            raise MalformedHeaderError(f"Sinogram header lacks a valid geometry entry: {err}")
        return SensorData(values, metadata=metadata, **geometry)
    if typeName == ROOT_TABLE:
        return BesselRootTable(values)
    raise MalformedHeaderError(f"Unknown container type `{typeName}`")


def _splitHeader(raw):
    end = raw.find(b"\0")
    if end < 0:
        raise MalformedHeaderError("Container has no header terminator")
    try:
        header = json.loads(raw[:end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as err:
        raise MalformedHeaderError(f"Container header is not valid JSON: {err}")
    if not isinstance(header, dict):
        raise MalformedHeaderError("Container header must be a JSON object")

    missing = [key for key in _REQUIRED_KEYS if key not in header]
    if missing:
        raise MalformedHeaderError(f"Container header misses {missing}")
    if header["format"] != FORMAT_NAME:
        raise MalformedHeaderError(f"Not a photoacoustic container: format `{header['format']}`")
    _checkVersion(header["version"])
    if header["dtype"] != DTYPE or header.get("order", "C") != "C":
        raise MalformedHeaderError(
            f"Unsupported payload layout dtype={header['dtype']} order={header.get('order')}"
        )
    shape = header["shape"]
    if not isinstance(shape, list) or not all(isinstance(n, int) and n >= 0 for n in shape):
        raise MalformedHeaderError(f"Bad shape {shape!r} in container header")
    return header, raw[end + 1 :]


def _checkVersion(version):
    try:
        major = int(str(version).split(".")[0])
    except ValueError:
        raise MalformedHeaderError(f"Bad container version `{version}`")
    if major != FORMAT_VERSION[0]:
        raise VersionMismatchError(
            f"Container version {version} is not readable by format {FORMAT_VERSION[0]}.x"
        )
