##
# File:    DeepSupervisionLoss.py
# Date:    07-Oct-2026
#
# Updates:
#   08-Oct-2026  accept ParallelBatch everywhere; token-mean CE, example-mean cosine
#   10-Oct-2026  loss_total shares the target forward and a single pivot-language forward
##
"""
Training objectives for deep supervision fine-tuning.

  loss_tft          next-token cross-entropy on the target answer (query is context only)
  loss_lc_logits    logit-lens read-out at layer i over query positions vs. the pivot query
  loss_lc_feature   1 - cos(pooled pivot query state, pooled target query state) at layer i
  loss_et_logits    logit-lens read-out at layer j over answer-predicting positions vs. the pivot answer
  loss_et_feature   1 - cos(pooled pivot final-layer answer state, pooled target layer-j answer state)
  loss_total        l_tft + w_lc * l_lc + w_et * l_et

Every function takes either one ParallelExample or a ParallelBatch.  The
pivot-language branch of the feature losses runs without a tape, so its
states are constants to the optimiser; early-exit read-outs use a detached
final norm and output head.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import functools
import logging

from deepsup.dft.autodiff import TensorOps as ops
from deepsup.dft.autodiff.Tensor import no_grad
from deepsup.dft.model.Transformer import early_exit_logits, forward
from deepsup.dft.supervision.ParallelExample import ParallelBatch, ParallelExample
from deepsup.dft.supervision.SupervisionSpec import LossBreakdown
from deepsup.dft.utils.DftExceptions import ContractError

logger = logging.getLogger(__name__)


def as_batch(params, data):
    if isinstance(data, ParallelBatch):
        if data.seq_len > params.config.max_seq_len:
            return ParallelBatch(data.examples, maxSeqLen=params.config.max_seq_len)
        return data
    if isinstance(data, ParallelExample):
        return ParallelBatch([data], maxSeqLen=params.config.max_seq_len)
    raise ContractError("expected a ParallelExample or ParallelBatch, got %s" % type(data).__name__)


def _flatCrossEntropy(logits, targets, mask):
    bsz, tLen, vocab = logits.shape
    return ops.cross_entropy(ops.reshape(logits, (bsz * tLen, vocab)), targets.reshape(-1), mask.reshape(-1))


def _pooledCosine(hPivot, hTarget, maskPivot, maskTarget):
    """Example-mean of 1 - cos(pool(hPivot), pool(hTarget)); the pivot side is constant."""
    terms = []
    for b in range(hTarget.shape[0]):
        pooledPivot = ops.detach(ops.mean_pool(ops.take(hPivot, b), maskPivot[b]))
        pooledTarget = ops.mean_pool(ops.take(hTarget, b), maskTarget[b])
        terms.append(ops.cosine_loss(pooledPivot, pooledTarget))
    return ops.scale(functools.reduce(ops.add, terms), 1.0 / len(terms))


def _pivotActivations(params, batch):
    with no_grad():
        _, acts = forward(params, batch.tokens_en)
    return acts


def _checkLayer(layer, lo, hi, what):
    if not isinstance(layer, int) or isinstance(layer, bool) or not lo <= layer <= hi:
        raise ContractError("%s layer must lie in %d..%d, got %r" % (what, lo, hi, layer))


# ---------------------------------------------------------------- terms on a shared forward pass


def _tftTerm(logits, batch, includeQuery=False):
    mask = batch.context_mask() if includeQuery else batch.predict_mask
    return _flatCrossEntropy(logits, batch.next_tokens_tgt(), mask)


def _lcLogitsTerm(params, acts, batch, layer):
    return _flatCrossEntropy(early_exit_logits(acts, layer, params), batch.query_en, batch.query_mask)


def _etLogitsTerm(params, acts, batch, layer):
    return _flatCrossEntropy(early_exit_logits(acts, layer, params), batch.next_en, batch.predict_mask)


def _lcFeatureTerm(acts, pivotActs, batch, layer):
    return _pooledCosine(pivotActs[layer], acts[layer], batch.query_mask, batch.query_mask)


def _etFeatureTerm(acts, pivotActs, batch, layer):
    return _pooledCosine(pivotActs[pivotActs.n_layers], acts[layer], batch.answer_mask, batch.answer_mask)


# ---------------------------------------------------------------- public objectives


def loss_tft(params, example, include_query=False):
    """Answer-only next-token cross-entropy on ``x_tgt + y_tgt``.

    ``include_query`` widens the mask to every position with a next token,
    which is only useful to show the mask changes the value.
    """
    batch = as_batch(params, example)
    logits, _ = forward(params, batch.tokens_tgt)
    return _tftTerm(logits, batch, includeQuery=include_query)


def loss_lc_logits(params, example, layer_i):
    batch = as_batch(params, example)
    _checkLayer(layer_i, 1, params.config.n_layers - 1, "language-conversion")
    _, acts = forward(params, batch.tokens_tgt)
    return _lcLogitsTerm(params, acts, batch, layer_i)


def loss_lc_feature(params, example, layer_i):
    batch = as_batch(params, example)
    _checkLayer(layer_i, 1, params.config.n_layers - 1, "language-conversion")
    _, acts = forward(params, batch.tokens_tgt)
    return _lcFeatureTerm(acts, _pivotActivations(params, batch), batch, layer_i)


def loss_et_logits(params, example, layer_j):
    batch = as_batch(params, example)
    _checkLayer(layer_j, 1, params.config.n_layers, "english-thinking")
    _, acts = forward(params, batch.tokens_tgt)
    return _etLogitsTerm(params, acts, batch, layer_j)


def loss_et_feature(params, example, layer_j):
    batch = as_batch(params, example)
    _checkLayer(layer_j, 1, params.config.n_layers, "english-thinking")
    _, acts = forward(params, batch.tokens_tgt)
    return _etFeatureTerm(acts, _pivotActivations(params, batch), batch, layer_j)


def loss_total(params, example, spec):
    """Composite objective; returns a LossBreakdown whose ``loss`` is differentiable.

    Inactive stages add nothing to the graph.  With no active stage the
    returned ``loss`` is the translated-tuning term itself.
    """
    spec.validate(params.config.n_layers)
    batch = as_batch(params, example)
    logits, acts = forward(params, batch.tokens_tgt)
    lTft = _tftTerm(logits, batch)
    total = lTft
    lLc = lEt = None

    pivotActs = None
    if "feature" in (spec.lc_mode, spec.et_mode):
        pivotActs = _pivotActivations(params, batch)

    if spec.lc_mode == "logits":
        lLc = _lcLogitsTerm(params, acts, batch, spec.layer_i)
    elif spec.lc_mode == "feature":
        lLc = _lcFeatureTerm(acts, pivotActs, batch, spec.layer_i)
    if lLc is not None:
        total = ops.add(total, ops.scale(lLc, spec.weight_lc))

    if spec.et_mode == "logits":
        lEt = _etLogitsTerm(params, acts, batch, spec.layer_j)
    elif spec.et_mode == "feature":
        lEt = _etFeatureTerm(acts, pivotActs, batch, spec.layer_j)
    if lEt is not None:
        total = ops.add(total, ops.scale(lEt, spec.weight_et))

    return LossBreakdown(
        total,
        lTft.item(),
        0.0 if lLc is None else lLc.item(),
        0.0 if lEt is None else lEt.item(),
        weight_lc=spec.weight_lc,
        weight_et=spec.weight_et,
    )
