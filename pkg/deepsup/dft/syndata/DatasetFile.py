##
# File:    DatasetFile.py
# Date:    07-Oct-2026
#
# Updates:
#   09-Oct-2026  optional header record carrying generation metadata
##
"""
Parallel datasets and their line-delimited file format.

File layout: an optional first line ``{"dataset": {...metadata...}}`` and
then one JSON object per example::

    {"split": "train", "x_en": [...], "x_tgt": [...], "y_en": [...], "y_tgt": [...]}

Keys are sorted and separators compact, so a dataset always serialises to
the same bytes.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import hashlib
import json
import logging

from deepsup.dft.supervision.ParallelExample import ParallelExample
from deepsup.dft.utils.ArtifactFile import ArtifactFile, json_dumps
from deepsup.dft.utils.DftExceptions import DatasetParseError, DftError, EmptySplitError, VocabMismatchError

logger = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")
EXAMPLE_FIELDS = ("x_tgt", "x_en", "y_tgt", "y_en")


class Dataset(object):
    """Ordered parallel examples, each tagged with a split."""

    def __init__(self, examples, splits=None, meta=None):
        self.examples = list(examples)
        self.splits = list(splits) if splits is not None else ["train"] * len(self.examples)
        if len(self.splits) != len(self.examples):
            raise DftError("dataset has %d examples but %d split tags" % (len(self.examples), len(self.splits)))
        for tag in self.splits:
            if tag not in SPLITS:
                raise DftError("unknown split tag %r" % tag)
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, idx):
        return self.examples[idx]

    def split(self, name):
        """Examples tagged ``name``; an empty split raises EmptySplitError."""
        if name not in SPLITS:
            raise DftError("unknown split %r (choose from %s)" % (name, ", ".join(SPLITS)))
        out = [ex for ex, tag in zip(self.examples, self.splits) if tag == name]
        if not out:
            raise EmptySplitError("dataset split %r holds no examples" % name)
        return out

    def split_sizes(self):
        return {name: sum(1 for tag in self.splits if tag == name) for name in SPLITS}

    def max_token(self):
        return max(ex.max_token() for ex in self.examples) if self.examples else -1

    def check_vocab(self, vocabSize):
        top = self.max_token()
        if top >= vocabSize:
            raise VocabMismatchError("dataset uses token id %d but the model vocabulary has %d ids" % (top, vocabSize))
        if self.meta.get("vocab_size") not in (None, vocabSize):
            raise VocabMismatchError("dataset was generated for vocab_size %s, model has %d" % (self.meta["vocab_size"], vocabSize))

    def records(self):
        out = []
        for ex, tag in zip(self.examples, self.splits):
            rec = ex.to_dict()
            rec["split"] = tag
            out.append(rec)
        return out

    def lines(self):
        head = [json_dumps({"dataset": self.meta})] if self.meta else []
        return head + [json_dumps(r) for r in self.records()]

    def content_hash(self):
        h = hashlib.sha256()
        for line in self.lines():
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, Dataset) and self.examples == other.examples and self.splits == other.splits and self.meta == other.meta


def write_dataset(fPath, dataset):
    ArtifactFile(fPath).writeText("".join(line + "\n" for line in dataset.lines()))
    logger.info("wrote %d examples to %s", len(dataset), fPath)
    return fPath


def _parseRecord(rec, lineNumber, fPath):
    if not isinstance(rec, dict):
        raise DatasetParseError("expected a JSON object", lineNumber, fPath)
    missing = [f for f in EXAMPLE_FIELDS if f not in rec]
    if missing:
        raise DatasetParseError("missing field(s) %s" % ", ".join(missing), lineNumber, fPath)
    for f in EXAMPLE_FIELDS:
        if not isinstance(rec[f], list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in rec[f]):
            raise DatasetParseError("field %s must be a list of integers" % f, lineNumber, fPath)
    try:
        ex = ParallelExample(rec["x_tgt"], rec["x_en"], rec["y_tgt"], rec["y_en"])
    except DftError as e:
        raise DatasetParseError(str(e), lineNumber, fPath)
    tag = rec.get("split", "train")
    if tag not in SPLITS:
        raise DatasetParseError("unknown split tag %r" % tag, lineNumber, fPath)
    return ex, tag


def read_dataset(fPath):
    """Read a dataset file in one pass, preserving example order."""
    examples, splits, meta = [], [], {}
    with open(fPath, "r", encoding="utf-8") as ifh:
        for lineNumber, line in enumerate(ifh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except ValueError as e:
                raise DatasetParseError("malformed JSON (%s)" % e, lineNumber, fPath)
            if lineNumber == 1 and isinstance(rec, dict) and "dataset" in rec:
                meta = rec["dataset"] or {}
                continue
            ex, tag = _parseRecord(rec, lineNumber, fPath)
            examples.append(ex)
            splits.append(tag)
    if not examples:
        raise DatasetParseError("file holds no examples", None, fPath)
    logger.debug("read %d examples from %s", len(examples), fPath)
    return Dataset(examples, splits, meta)
