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
Test reading/writing of array containers.

Containers hold fields, sinograms and root tables behind a JSON header.
"""
import json
import unittest

import numpy as np

from armi.utils import directoryChangers

from ..binaryIO import containerFile
from ..errors import ContainerError, MalformedHeaderError, ShapeMismatchError, VersionMismatchError
from ..specfun import besselRoots
from ..wavesim import ScalarField2D, SensorData
from . import THIS_DIR


def sampleSinogram():
    samples = np.arange(24.0).reshape(4, 6) / 7.0
    return SensorData(samples, 0.9, 3.0, 1.0, 0.5, {"noisePercent": 10.0, "noiseSeed": 2})


def rawWithHeader(header, payload=b""):
    return json.dumps(header).encode("utf-8") + b"\0" + payload


class TestContainerIO(unittest.TestCase):
    """Ensure we can read/write containers."""

    def testSinogram(self):
        data = sampleSinogram()
        with directoryChangers.TemporaryDirectoryChanger(root=THIS_DIR):
            containerFile.save(data, "sinogram.pat")
            data2 = containerFile.load("sinogram.pat")
        self.assertEqual(data, data2)
        self.assertEqual(data2.metadata["noiseSeed"], 2)
        self.assertEqual((data2.radius, data2.c2), (0.9, 0.5))

    def testFieldAndRoots(self):
        field = ScalarField2D(np.linspace(-1.0, 1.0, 25).reshape(5, 5), {"formula": "B"})
        roots = besselRoots(3, 4)
        stream = containerFile.ContainerStream
        self.assertEqual(stream.fromBytes(stream.toBytes(field)), field)
        self.assertEqual(stream.fromBytes(stream.toBytes(roots)), roots)

    def testHeaderLayout(self):
        raw = containerFile.ContainerStream.toBytes(sampleSinogram())
        header, payload = raw.split(b"\0", 1)
        header = json.loads(header)
        self.assertEqual(header["format"], "photoacoustic-container")
        self.assertEqual(header["version"], "1.0")
        self.assertEqual(header["type"], "SensorData")
        self.assertEqual(header["shape"], [4, 6])
        self.assertEqual(header["metadata"]["finalTime"], 3.0)
        self.assertEqual(len(payload), 24 * 8)
        self.assertEqual(list(header), sorted(header))

    def testDeterministicBytes(self):
        self.assertEqual(
            containerFile.ContainerStream.toBytes(sampleSinogram()),
            containerFile.ContainerStream.toBytes(sampleSinogram()),
        )

    def testMinorVersionAndUnknownKeysAccepted(self):
        raw = containerFile.ContainerStream.toBytes(sampleSinogram())
        header, payload = raw.split(b"\0", 1)
        header = json.loads(header)
        header["version"] = "1.7"
        header["comment"] = "written by a newer release"
        loaded = containerFile.ContainerStream.fromBytes(rawWithHeader(header, payload))
        self.assertEqual(loaded, sampleSinogram())

    def testMalformedHeaders(self):
        raw = containerFile.ContainerStream.toBytes(sampleSinogram())
        header, payload = raw.split(b"\0", 1)
        header = json.loads(header)
        with self.assertRaises(MalformedHeaderError):
            containerFile.ContainerStream.fromBytes(b'{"format": "photoacoustic-container"}')
        with self.assertRaises(MalformedHeaderError):
            containerFile.ContainerStream.fromBytes(b"not json\0")
        badEntries = [("format", "other"), ("dtype", "<f4"), ("shape", [4, -6]), ("type", "Mesh")]
        for key, value in badEntries:
            broken = dict(header, **{key: value})
            with self.assertRaises(MalformedHeaderError, msg=key):
                containerFile.ContainerStream.fromBytes(rawWithHeader(broken, payload))
        missing = {k: v for k, v in header.items() if k != "shape"}
        with self.assertRaises(MalformedHeaderError):
            containerFile.ContainerStream.fromBytes(rawWithHeader(missing, payload))
        noGeometry = dict(header, metadata={})
        with self.assertRaises(MalformedHeaderError):
            containerFile.ContainerStream.fromBytes(rawWithHeader(noGeometry, payload))

    def testVersionMismatch(self):
        raw = containerFile.ContainerStream.toBytes(sampleSinogram())
        header, payload = raw.split(b"\0", 1)
        header = dict(json.loads(header), version="2.0")
        with self.assertRaises(VersionMismatchError):
            containerFile.ContainerStream.fromBytes(rawWithHeader(header, payload))

    def testTruncatedPayload(self):
        raw = containerFile.ContainerStream.toBytes(sampleSinogram())
        with self.assertRaises(ShapeMismatchError):
            containerFile.ContainerStream.fromBytes(raw[:-8])
        with self.assertRaises(ContainerError):
            containerFile.ContainerStream.fromBytes(raw + b"\0" * 8)

    def testUnsupportedObject(self):
        with self.assertRaises(TypeError):
            containerFile.ContainerStream.toBytes(np.zeros(3))

    def testSaveRootTable(self):
        with directoryChangers.TemporaryDirectoryChanger(root=THIS_DIR):
            containerFile.save(besselRoots(1, 2), "roots.pat")
            self.assertEqual(containerFile.load("roots.pat").rootsPerOrder, 2)


if __name__ == "__main__":
    unittest.main()
