##
# File:    ParallelExample.py
# Date:    06-Oct-2026
#
# Updates:
#   08-Oct-2026  right-padded ParallelBatch with per-role position masks
##
"""
Parallel query/answer quadruples and the padded batches built from them.

A sequence is always fed as ``query + answer``.  With ``n`` query tokens and
``m`` answer tokens (``T = n + m``) the position roles are:

  query positions               0 .. n-1        (hold the query tokens)
  answer positions              n .. T-1        (hold the answer tokens)
  answer-predicting positions   n-1 .. T-2      (their next token is an answer token)

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import dataclasses
import hashlib
import json
import logging

import numpy as np

from deepsup.dft.model.ModelConfig import PAD_ID
from deepsup.dft.utils.DftExceptions import ContractError, SequenceLengthError

logger = logging.getLogger(__name__)


def _ids(seq):
    return tuple(int(t) for t in seq)


@dataclasses.dataclass(frozen=True)
class ParallelExample(object):
    """Target-language query/answer with its pivot-language counterpart."""

    x_tgt: tuple
    x_en: tuple
    y_tgt: tuple
    y_en: tuple

    def __post_init__(self):
        for field in ("x_tgt", "x_en", "y_tgt", "y_en"):
            object.__setattr__(self, field, _ids(getattr(self, field)))
        self.validate()

    def validate(self):
        if not self.x_tgt or not self.y_tgt:
            raise ContractError("parallel example needs a non-empty query and answer")
        if len(self.x_tgt) != len(self.x_en):
            raise ContractError("query lengths differ: x_tgt has %d tokens, x_en has %d" % (len(self.x_tgt), len(self.x_en)))
        if len(self.y_tgt) != len(self.y_en):
            raise ContractError("answer lengths differ: y_tgt has %d tokens, y_en has %d" % (len(self.y_tgt), len(self.y_en)))
        for field in ("x_tgt", "x_en", "y_tgt", "y_en"):
            if PAD_ID in getattr(self, field):
                raise ContractError("pad token inside segment %s" % field)
            if min(getattr(self, field)) < 0:
                raise ContractError("negative token id in segment %s" % field)

    @property
    def query_len(self):
        return len(self.x_tgt)

    @property
    def answer_len(self):
        return len(self.y_tgt)

    def __len__(self):
        return len(self.x_tgt) + len(self.y_tgt)

    def target_sequence(self):
        return list(self.x_tgt + self.y_tgt)

    def english_sequence(self):
        return list(self.x_en + self.y_en)

    def max_token(self):
        return max(max(self.x_tgt), max(self.x_en), max(self.y_tgt), max(self.y_en))

    def to_dict(self):
        return {"x_tgt": list(self.x_tgt), "x_en": list(self.x_en), "y_tgt": list(self.y_tgt), "y_en": list(self.y_en)}

    def content_hash(self):
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


class ParallelBatch(object):
    """Right-padded batch of parallel examples.

    Arrays are B x T.  Target arrays hold, at each supervised position, the
    token that position is trained towards; elsewhere they hold ``PAD_ID``.
    """

    def __init__(self, examples, maxSeqLen=None):
        self.examples = list(examples)
        if not self.examples:
            raise ContractError("cannot build a batch from zero examples")
        tLen = max(len(ex) for ex in self.examples)
        if maxSeqLen is not None and tLen > maxSeqLen:
            raise SequenceLengthError("example of length %d exceeds max_seq_len %d" % (tLen, maxSeqLen))
        bsz = len(self.examples)
        shape = (bsz, tLen)
        self.tokens_tgt = np.full(shape, PAD_ID, dtype=np.int64)
        self.tokens_en = np.full(shape, PAD_ID, dtype=np.int64)
        self.query_mask = np.zeros(shape, dtype=bool)
        self.answer_mask = np.zeros(shape, dtype=bool)
        self.predict_mask = np.zeros(shape, dtype=bool)
        self.next_tgt = np.full(shape, PAD_ID, dtype=np.int64)
        self.next_en = np.full(shape, PAD_ID, dtype=np.int64)
        self.query_en = np.full(shape, PAD_ID, dtype=np.int64)
        for b, ex in enumerate(self.examples):
            n, m = ex.query_len, ex.answer_len
            self.tokens_tgt[b, : n + m] = ex.target_sequence()
            self.tokens_en[b, : n + m] = ex.english_sequence()
            self.query_mask[b, :n] = True
            self.answer_mask[b, n : n + m] = True
            self.predict_mask[b, n - 1 : n + m - 1] = True
            self.next_tgt[b, n - 1 : n + m - 1] = ex.y_tgt
            self.next_en[b, n - 1 : n + m - 1] = ex.y_en
            self.query_en[b, :n] = ex.x_en

    @property
    def size(self):
        return len(self.examples)

    @property
    def seq_len(self):
        return self.tokens_tgt.shape[1]

    def context_mask(self):
        """Positions whose next token lies inside the sequence (query context plus answers)."""
        mask = np.zeros_like(self.query_mask)
        for b, ex in enumerate(self.examples):
            mask[b, : len(ex) - 1] = True
        return mask

    def next_tokens_tgt(self):
        """Next-token targets over the whole target sequence (PAD_ID past the end)."""
        out = np.full_like(self.tokens_tgt, PAD_ID)
        out[:, :-1] = self.tokens_tgt[:, 1:]
        return out
