##
# File:    ArtifactFile.py
# Date:    05-Oct-2026
#
# Updates:
#   12-Oct-2026  JSON-lines helpers for metrics and report records
#   19-Oct-2026  drop the destination-side copy/compare helpers
##
"""
Utility class of file methods for run artifacts (datasets, checkpoints,
metrics, reports, manifests): content hashing and deterministic
JSON / JSON-lines output.

Writes go through a temporary sibling and ``os.replace`` so a reader never
sees a half-written artifact.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import hashlib
import json
import logging
import os

from deepsup.dft.utils.DftExceptions import DftError

logger = logging.getLogger(__name__)


def sha256_file(fPath, blockSize=1 << 20):
    h = hashlib.sha256()
    with open(fPath, "rb") as ifh:
        for block in iter(lambda: ifh.read(blockSize), b""):
            h.update(block)
    return h.hexdigest()


def json_dumps(obj):
    """Canonical single-line JSON used for every machine-readable artifact."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class ArtifactFile(object):
    """One artifact path with read and write helpers, in the manner of a data-file utility."""

    def __init__(self, fPath=None, raiseExceptions=True):
        self.__raiseExceptions = raiseExceptions
        self.srcPath = None
        self.srcDirName = None
        self.srcFileName = None
        self.src(fPath)

    def src(self, fPath):
        """Set or reset the source file path"""
        if fPath is not None:
            self.srcPath = os.path.abspath(fPath)
            self.srcDirName, self.srcFileName = os.path.split(self.srcPath)

    def srcFileExists(self):
        return self.srcPath is not None and os.path.isfile(self.srcPath)

    def __mkdir(self, path):
        if path and not os.path.isdir(path):
            os.makedirs(path, 0o755)

    def __fail(self, msg):
        if self.__raiseExceptions:
            raise DftError(msg)
        logger.error("%s", msg)
        return False

    # ------------------------------------------------------------ read-side

    def readJson(self):
        if not self.srcFileExists():
            return self.__fail("missing artifact %s" % self.srcPath)
        with open(self.srcPath, "r", encoding="utf-8") as ifh:
            return json.load(ifh)

    def readJsonLines(self):
        if not self.srcFileExists():
            return self.__fail("missing artifact %s" % self.srcPath)
        with open(self.srcPath, "r", encoding="utf-8") as ifh:
            return [json.loads(line) for line in ifh if line.strip()]

    # ------------------------------------------------------------ write-side

    def __writeText(self, text):
        self.__mkdir(self.srcDirName)
        tmpPath = self.srcPath + ".tmp"
        try:
            with open(tmpPath, "w", encoding="utf-8", newline="\n") as ofh:
                ofh.write(text)
            os.replace(tmpPath, self.srcPath)
            return True
        except OSError as e:
            logger.exception("Failing write of %s", self.srcPath)
            return self.__fail("cannot write %s (%s)" % (self.srcPath, e))

    def writeText(self, text):
        return self.__writeText(text)

    def writeJson(self, obj):
        return self.__writeText(json.dumps(obj, sort_keys=True, indent=2) + "\n")

    def writeJsonLines(self, records):
        return self.__writeText("".join(json_dumps(r) + "\n" for r in records))
