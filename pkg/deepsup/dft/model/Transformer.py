##
# File:    Transformer.py
# Date:    04-Oct-2026
#
# Updates:
#   06-Oct-2026  batched forward (right-padded batches) and multi-head reshape
#   09-Oct-2026  greedy_decode(at_layer=...) for logit-lens decoding
##
"""
Pre-norm decoder-only transformer whose forward pass exposes every layer.

Layer taps (LayerActivations.hidden):

  h_0       token + position embedding
  h_k       residual stream after block k   (1 <= k < L)
  h_L       final-normalised stream feeding the output head

The logit lens (early_exit_logits) applies the final normalisation and the
output head to any h_k with both detached, so W_out only takes part in the
forward computation of an intermediate read-out.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import logging
import math

import numpy as np

from deepsup.dft.autodiff import TensorOps as ops
from deepsup.dft.autodiff.Tensor import no_grad
from deepsup.dft.model.ModelConfig import EOS_ID
from deepsup.dft.utils.DftExceptions import ContractError, SequenceLengthError

logger = logging.getLogger(__name__)


class LayerActivations(object):
    """Hidden state of every layer for one forward pass (L+1 entries)."""

    def __init__(self, hidden, tokens):
        self.hidden = list(hidden)
        self.tokens = tokens

    @property
    def n_layers(self):
        return len(self.hidden) - 1

    def __len__(self):
        return len(self.hidden)

    def __getitem__(self, layer):
        return self.hidden[layer]


def _checkTokens(config, tokens):
    arr = np.asarray(tokens, dtype=np.int64)
    if arr.ndim not in (1, 2):
        raise ContractError("tokens must be a sequence or a batch of sequences, got shape %s" % (arr.shape,))
    if arr.shape[-1] == 0 or arr.size == 0:
        raise ContractError("cannot run the model on an empty sequence")
    if arr.shape[-1] > config.max_seq_len:
        raise SequenceLengthError("sequence length %d exceeds max_seq_len %d" % (arr.shape[-1], config.max_seq_len))
    return arr


def _block(params, k, x, nHeads):
    pfx = "layers.%d." % k
    bsz, tLen, d = x.shape
    dh = d // nHeads

    a = ops.rms_norm(x, params[pfx + "attn_norm"])

    def heads(w):
        return ops.transpose(ops.reshape(ops.matmul(a, params[pfx + w]), (bsz, tLen, nHeads, dh)), (0, 2, 1, 3))

    q, kk, v = heads("attn.wq"), heads("attn.wk"), heads("attn.wv")
    scores = ops.scale(ops.matmul(q, ops.transpose(kk)), 1.0 / math.sqrt(dh))
    probs = ops.softmax(ops.causal_mask(scores), axis=-1)
    ctx = ops.reshape(ops.transpose(ops.matmul(probs, v), (0, 2, 1, 3)), (bsz, tLen, d))
    x = ops.add(x, ops.matmul(ctx, params[pfx + "attn.wo"]))

    m = ops.rms_norm(x, params[pfx + "mlp_norm"])
    u = ops.gelu(ops.add(ops.matmul(m, params[pfx + "mlp.w_in"]), params[pfx + "mlp.b_in"]))
    return ops.add(x, ops.add(ops.matmul(u, params[pfx + "mlp.w_out"]), params[pfx + "mlp.b_out"]))


def forward(params, tokens):
    """Run the model.

    :param tokens: one id sequence (T,) or a right-padded batch (B, T)
    :returns: (logits, LayerActivations); logits are T x V (or B x T x V)
    """
    config = params.config
    arr = _checkTokens(config, tokens)
    single = arr.ndim == 1
    batch = arr[None, :] if single else arr
    bsz, tLen = batch.shape

    positions = np.tile(np.arange(tLen, dtype=np.int64), (bsz, 1))
    x = ops.add(ops.embedding_lookup(params["embed.token"], batch), ops.embedding_lookup(params["embed.position"], positions))
    hidden = [x]
    for k in range(1, config.n_layers + 1):
        x = _block(params, k, x, config.n_heads)
        if k < config.n_layers:
            hidden.append(x)
    hL = ops.rms_norm(x, params["final_norm"])
    hidden.append(hL)
    logits = ops.matmul(hL, params.output_head())

    if single:
        logits = ops.take(logits, 0)
        hidden = [ops.take(h, 0) for h in hidden]
    return logits, LayerActivations(hidden, arr)


def early_exit_logits(acts, layer, params):
    """Logit-lens read-out of layer ``layer`` through the frozen final norm and head."""
    nLayers = params.config.n_layers
    if not isinstance(layer, (int, np.integer)) or not 0 <= layer <= nLayers:
        raise ContractError("early-exit layer %r outside 0..%d" % (layer, nLayers))
    if acts.n_layers != nLayers:
        raise ContractError("activations hold %d layers, model has %d" % (acts.n_layers, nLayers))
    h = acts[layer]
    if layer < nLayers:
        h = ops.rms_norm(h, ops.detach(params["final_norm"]))
    return ops.matmul(h, ops.detach(params.output_head()))


def greedy_decode(params, prompt, max_new, at_layer=None):
    """Append argmax tokens until end-of-sequence or ``max_new`` new tokens."""
    seq = [int(t) for t in prompt]
    if not seq:
        raise ContractError("greedy_decode needs a non-empty prompt")
    with no_grad():
        for _ in range(int(max_new)):
            logits, acts = forward(params, seq)
            if at_layer is not None:
                logits = early_exit_logits(acts, at_layer, params)
            nxt = int(np.argmax(logits.data[-1]))
            seq.append(nxt)
            if nxt == EOS_ID:
                break
    return seq
