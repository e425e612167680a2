##
# File:    CheckpointIo.py
# Date:    05-Oct-2026
#
# Updates:
#   11-Oct-2026  optimizer state stored in the same container for resume
##
"""
Self-describing checkpoint container.

Layout::

    DFTCKPT\\n
    <one JSON header line: version, model config, seed, step, optimizer, tensor index>\\n
    <raw little-endian float64 payloads in index order>

The header is written with sorted keys and the payload is the exact byte
image of each array, so save -> load -> save reproduces identical bytes.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import collections
import json
import logging
import os

import numpy as np

from deepsup.dft.autodiff.Tensor import DTYPE, Tensor
from deepsup.dft.model.ModelConfig import ModelConfig
from deepsup.dft.model.ModelParams import ModelParams
from deepsup.dft.utils.DftExceptions import CheckpointVersionError, ConfigError

logger = logging.getLogger(__name__)

MAGIC = b"DFTCKPT\n"
FORMAT_VERSION = 1
PARAM_PREFIX = "param/"
OPTIM_PREFIX = "optim."


class Checkpoint(object):
    """Everything read back from a checkpoint file."""

    def __init__(self, params, seed=None, step=0, optimizerState=None, meta=None):
        self.params = params
        self.seed = seed
        self.step = step
        self.optimizerState = optimizerState
        self.meta = meta or {}

    @property
    def config(self):
        return self.params.config


def _entries(params, optimizerState):
    out = [(PARAM_PREFIX + name, arr) for name, arr in params.arrays().items()]
    if optimizerState:
        for slot in sorted(optimizerState.get("slots", {})):
            for name, arr in optimizerState["slots"][slot].items():
                out.append(("%s%s/%s" % (OPTIM_PREFIX, slot, name), arr))
    return out


def save_checkpoint(path, params, seed=None, step=0, optimizerState=None, meta=None):
    """Write ``params`` (and optionally optimizer state) to ``path``; returns ``path``."""
    entries = _entries(params, optimizerState)
    index = []
    offset = 0
    blobs = []
    for name, arr in entries:
        blob = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        index.append({"name": name, "shape": list(arr.shape), "offset": offset, "nbytes": len(blob)})
        offset += len(blob)
        blobs.append(blob)
    optimizerHeader = None
    if optimizerState:
        optimizerHeader = {"name": optimizerState.get("name"), "step": int(optimizerState.get("step", 0))}
    header = {
        "format": "dft-checkpoint",
        "version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "seed": seed,
        "step": int(step),
        "optimizer": optimizerHeader,
        "meta": meta or {},
        "tensors": index,
    }
    dirName = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(dirName):
        os.makedirs(dirName, 0o755)
    tmpPath = path + ".tmp"
    with open(tmpPath, "wb") as ofh:
        ofh.write(MAGIC)
        ofh.write(json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8"))
        ofh.write(b"\n")
        for blob in blobs:
            ofh.write(blob)
    os.replace(tmpPath, path)
    logger.debug("wrote checkpoint %s (%d tensors, %d payload bytes)", path, len(index), offset)
    return path


def _readHeader(raw, path):
    if not raw.startswith(MAGIC):
        raise CheckpointVersionError("%s: not a checkpoint (bad magic)" % path)
    end = raw.find(b"\n", len(MAGIC))
    if end < 0:
        raise CheckpointVersionError("%s: truncated checkpoint header" % path)
    try:
        header = json.loads(raw[len(MAGIC) : end].decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise CheckpointVersionError("%s: corrupt checkpoint header (%s)" % (path, e))
    if not isinstance(header, dict) or header.get("format") != "dft-checkpoint":
        raise CheckpointVersionError("%s: corrupt checkpoint header" % path)
    if header.get("version") != FORMAT_VERSION:
        raise CheckpointVersionError("%s: checkpoint version %r, this build reads version %d" % (path, header.get("version"), FORMAT_VERSION))
    return header, end + 1


def load_checkpoint(path):
    with open(path, "rb") as ifh:
        raw = ifh.read()
    header, start = _readHeader(raw, path)
    try:
        config = ModelConfig.from_dict(header["config"])
    except (ConfigError, KeyError, TypeError) as e:
        raise CheckpointVersionError("%s: bad model config in header (%s)" % (path, e))
    payload = memoryview(raw)[start:]
    params = collections.OrderedDict()
    slots = collections.OrderedDict()
    for entry in header.get("tensors", []):
        nBytes, offset = int(entry["nbytes"]), int(entry["offset"])
        if offset + nBytes > len(payload):
            raise CheckpointVersionError("%s: payload truncated at tensor %s" % (path, entry["name"]))
        arr = np.frombuffer(payload[offset : offset + nBytes], dtype="<f8").astype(DTYPE).reshape(entry["shape"])
        name = entry["name"]
        if name.startswith(PARAM_PREFIX):
            pName = name[len(PARAM_PREFIX) :]
            params[pName] = Tensor.fromArray(arr, requires_grad=True, name=pName)
        elif name.startswith(OPTIM_PREFIX):
            slot, pName = name[len(OPTIM_PREFIX) :].split("/", 1)
            slots.setdefault(slot, collections.OrderedDict())[pName] = arr
    optimizerState = None
    if header.get("optimizer"):
        optimizerState = {"name": header["optimizer"]["name"], "step": header["optimizer"]["step"], "slots": slots}
    return Checkpoint(ModelParams(config, params), seed=header.get("seed"), step=header.get("step", 0), optimizerState=optimizerState, meta=header.get("meta", {}))
