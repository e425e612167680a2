##
# File:    Evaluator.py
# Date:    10-Oct-2026
#
# Updates:
#   12-Oct-2026  logit-lens accuracies at the critical layers; report hashes
#   19-Oct-2026  greedy decode accuracy through the layer-j read-out
##
"""
Zero-shot evaluation of a checkpoint on one dataset split.

Per example:

  final answer   greedy decode from x_tgt for len(y_tgt) tokens vs. y_tgt
                 (exact match and per-token accuracy)
  layer i        argmax of the early-exit logits over the query positions vs. x_en
  layer j        teacher-forced early-exit argmax over answer-predicting positions vs. y_en
                 and greedy decoding through the layer-j read-out vs. y_en
  cosine         mean-pooled parallel cosine of the query states at every layer

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import collections
import logging
import math

import numpy as np

from deepsup.dft.autodiff.Tensor import no_grad
from deepsup.dft.autodiff.TensorOps import cosine_similarity_value
from deepsup.dft.model.Transformer import early_exit_logits, forward, greedy_decode
from deepsup.dft.supervision.ParallelExample import ParallelBatch
from deepsup.dft.utils.ArtifactFile import ArtifactFile
from deepsup.dft.utils.DftExceptions import EmptySplitError, VocabMismatchError
from deepsup.dft.utils.ReportFormat import ReportFormat
from deepsup.dft.utils.TimedOperation import TimedOperation

logger = logging.getLogger(__name__)

ROW_COLUMNS = ("method", "task", "split", "n", "exact_match", "token_accuracy", "lens_i", "lens_acc_i", "lens_j", "lens_acc_j", "lens_dec_j")


class EvalReport(object):
    """Rows of evaluation results plus the hashes of the inputs they came from."""

    def __init__(self, rows=None):
        self.rows = list(rows or [])

    def add_row(self, row):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def extend(self, other):
        self.rows.extend(other.rows)

    def records(self):
        return [dict(r) for r in self.rows]

    def text(self, title="Evaluation report"):
        out = ReportFormat(precision=4)
        out.title(title)
        out.table(list(ROW_COLUMNS), self.rows)
        layers = sorted({len(r.get("cosine_per_layer") or []) for r in self.rows})
        if layers and layers[-1]:
            out.blank()
            cosCols = ["method"] + ["cos_h%d" % k for k in range(layers[-1])]
            cosRows = []
            for r in self.rows:
                row = {"method": r["method"]}
                row.update({"cos_h%d" % k: v for k, v in enumerate(r.get("cosine_per_layer") or [])})
                cosRows.append(row)
            out.table(cosCols, cosRows)
        out.blank()
        hashCols = ["method", "checkpoint_sha256", "dataset_sha256"]
        out.table(hashCols, [{c: r.get(c) for c in hashCols} for r in self.rows])
        return out.getvalue()

    def write(self, textPath, recordsPath, title="Evaluation report"):
        ArtifactFile(textPath).writeText(self.text(title))
        ArtifactFile(recordsPath).writeJsonLines(self.records())


def _rate(hits, total):
    return float(hits) / float(total) if total else 0.0


def lens_query_accuracy(params, examples, layer):
    """Fraction of query positions whose layer-``layer`` read-out equals x_en."""
    hits = total = 0
    with no_grad():
        for ex in examples:
            _, acts = forward(params, ex.target_sequence())
            pred = np.argmax(early_exit_logits(acts, layer, params).data[: ex.query_len], axis=-1)
            hits += int(np.sum(pred == np.asarray(ex.x_en)))
            total += ex.query_len
    return _rate(hits, total)


def lens_answer_accuracy(params, examples, layer):
    """Teacher-forced read-out at ``layer`` over answer-predicting positions vs. y_en."""
    hits = total = 0
    with no_grad():
        for ex in examples:
            _, acts = forward(params, ex.target_sequence())
            n = ex.query_len
            pred = np.argmax(early_exit_logits(acts, layer, params).data[n - 1 : n - 1 + ex.answer_len], axis=-1)
            hits += int(np.sum(pred == np.asarray(ex.y_en)))
            total += ex.answer_len
    return _rate(hits, total)


def lens_decode_accuracy(params, examples, layer):
    """Token accuracy vs. y_en of answers greedily decoded through the layer-``layer`` read-out."""
    hits = total = 0
    for ex in examples:
        out = greedy_decode(params, ex.x_tgt, ex.answer_len, at_layer=layer)[ex.query_len :]
        hits += sum(1 for a, b in zip(out, ex.y_en) if a == b)
        total += ex.answer_len
    return _rate(hits, total)


def answer_accuracy(params, examples):
    """(exact-match rate, token accuracy) of greedy answers vs. y_tgt.

    Token accuracy is averaged per example first, so it never falls below
    the exact-match rate.
    """
    exact = 0
    perExample = []
    for ex in examples:
        out = greedy_decode(params, ex.x_tgt, ex.answer_len)[ex.query_len :]
        tokHits = sum(1 for a, b in zip(out, ex.y_tgt) if a == b)
        perExample.append(_rate(tokHits, ex.answer_len))
        exact += int(tokHits == ex.answer_len)
    return _rate(exact, len(examples)), math.fsum(perExample) / len(perExample)


def parallel_cosine_per_layer(params, examples, positions="query"):
    """Mean parallel cosine of pooled states per layer; degenerate pairs are skipped.

    :returns: (list of L+1 means, number of skipped pairs)
    """
    nLayers = params.config.n_layers
    sums = [[] for _ in range(nLayers + 1)]
    skipped = 0
    with no_grad():
        for ex in examples:
            batch = ParallelBatch([ex])
            mask = batch.query_mask[0] if positions == "query" else batch.answer_mask[0]
            _, actsT = forward(params, ex.target_sequence())
            _, actsE = forward(params, ex.english_sequence())
            for k in range(nLayers + 1):
                a = actsE[k].data[mask].mean(axis=0)
                b = actsT[k].data[mask].mean(axis=0)
                na2, nb2 = float(np.dot(a, a)), float(np.dot(b, b))
                if na2 == 0.0 or nb2 == 0.0:
                    skipped += 1
                    continue
                sums[k].append(cosine_similarity_value(a, b))
    if skipped:
        logger.warning("skipped %d degenerate pooled vectors", skipped)
    return [math.fsum(v) / len(v) if v else None for v in sums], skipped


@TimedOperation(logName=__name__)
def evaluate(params, examples, spec=None, method="model", task=None, split="test", checkpointHash=None, datasetHash=None, withCosine=True):
    """Evaluate ``params`` on ``examples``; returns an EvalReport with one row."""
    examples = list(examples)
    if not examples:
        raise EmptySplitError("cannot evaluate on an empty split")
    top = max(ex.max_token() for ex in examples)
    if top >= params.config.vocab_size:
        raise VocabMismatchError("split uses token id %d but the model vocabulary has %d ids" % (top, params.config.vocab_size))
    exact, tokAcc = answer_accuracy(params, examples)
    layerI = spec.layer_i if spec is not None else None
    layerJ = spec.layer_j if spec is not None else None
    row = collections.OrderedDict(
        [
            ("method", method),
            ("task", task),
            ("split", split),
            ("n", len(examples)),
            ("exact_match", exact),
            ("token_accuracy", tokAcc),
            ("lens_i", layerI),
            ("lens_acc_i", lens_query_accuracy(params, examples, layerI) if layerI is not None else None),
            ("lens_j", layerJ),
            ("lens_acc_j", lens_answer_accuracy(params, examples, layerJ) if layerJ is not None else None),
            ("lens_dec_j", lens_decode_accuracy(params, examples, layerJ) if layerJ is not None else None),
            ("cosine_per_layer", parallel_cosine_per_layer(params, examples)[0] if withCosine else None),
            ("checkpoint_sha256", checkpointHash or params.content_hash()),
            ("dataset_sha256", datasetHash),
        ]
    )
    logger.info("%s on %s/%s: exact %.4f token accuracy %.4f", method, task, split, exact, tokAcc)
    return EvalReport([row])
