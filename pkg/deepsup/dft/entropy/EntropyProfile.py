##
# File:    EntropyProfile.py
# Date:    08-Oct-2026
#
# Updates:
#   10-Oct-2026  per-position matrix for the heatmap export
#   12-Oct-2026  exact (fsum) reduction so corpus order cannot change the profile
##
"""
Per-layer entropy of logit-lens distributions and critical-layer selection.

For every layer k the early-exit distribution softmax(W_out . norm(h_k)) is
computed at each non-pad position; its Shannon entropy (nats) is averaged
over positions and sequences.  Entropy drops along depth mark stage
boundaries:

  drop magnitude at k  = e[k - window] - e[k]
  a drop               = local maximum of the magnitude above
                         min_drop_fraction * (max e - min e)
  critical layers      = i at the earlier of the two largest drops,
                         j one window before the later one (its onset)

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import logging
import math

import numpy as np

from deepsup.dft.autodiff.Tensor import no_grad
from deepsup.dft.model.ModelConfig import PAD_ID
from deepsup.dft.model.Transformer import early_exit_logits, forward
from deepsup.dft.utils.ArtifactFile import ArtifactFile
from deepsup.dft.utils.DftExceptions import ContractError, InsufficientStructureError
from deepsup.dft.utils.TimedOperation import TimedOperation

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = 1
DEFAULT_MIN_DROP_FRACTION = 0.1


def row_entropy(logits):
    """Shannon entropy (nats) of softmax over the last axis, computed stably."""
    z = logits - np.max(logits, axis=-1, keepdims=True)
    lse = np.log(np.sum(np.exp(z), axis=-1))
    p = np.exp(z - lse[..., None])
    return lse - np.sum(p * z, axis=-1)


class EntropyProfile(object):
    """Mean entropy per layer (L+1 values) plus the derived drops and suggestion."""

    def __init__(self, per_layer, per_layer_per_position=None, vocab_size=None, n_positions=0, window=DEFAULT_WINDOW, min_drop_fraction=DEFAULT_MIN_DROP_FRACTION):
        self.per_layer = [float(e) for e in per_layer]
        self.per_layer_per_position = per_layer_per_position
        self.vocab_size = vocab_size
        self.n_positions = n_positions
        self.window = window
        self.min_drop_fraction = min_drop_fraction
        self.drops = detect_drops(self.per_layer, window=window, min_drop_fraction=min_drop_fraction) if len(self.per_layer) >= 3 else []
        self.suggested_i = None
        self.suggested_j = None
        if len(self.drops) >= 2:
            i, j = _pickLayers(self.drops, window)
            if i < j:
                self.suggested_i, self.suggested_j = i, j

    @property
    def n_layers(self):
        return len(self.per_layer) - 1

    def drop_magnitudes(self):
        """e[k - window] - e[k] per layer (None for the first ``window`` layers)."""
        w = self.window
        return [None if k < w else self.per_layer[k - w] - self.per_layer[k] for k in range(len(self.per_layer))]

    def records(self):
        mags = self.drop_magnitudes()
        dropLayers = {k for k, _ in self.drops}
        return [
            {"layer": k, "mean_entropy": e, "drop_magnitude": mags[k], "is_drop": k in dropLayers}
            for k, e in enumerate(self.per_layer)
        ]

    def summary(self):
        return {
            "n_layers": self.n_layers,
            "vocab_size": self.vocab_size,
            "max_entropy": math.log(self.vocab_size) if self.vocab_size else None,
            "n_positions": self.n_positions,
            "window": self.window,
            "min_drop_fraction": self.min_drop_fraction,
            "drops": [[k, m] for k, m in self.drops],
            "suggested_i": self.suggested_i,
            "suggested_j": self.suggested_j,
        }

    def write_records(self, fPath):
        """One JSON line per layer followed by a summary line."""
        records = self.records() + [{"summary": self.summary()}]
        return ArtifactFile(fPath).writeJsonLines(records)

    def write_heatmap(self, fPath):
        """CSV with one row per layer and one column per position (blank where no data)."""
        if self.per_layer_per_position is None:
            raise ContractError("profile holds no per-position entropies")
        mat = self.per_layer_per_position
        lines = ["layer," + ",".join("pos%d" % p for p in range(mat.shape[1]))]
        for k in range(mat.shape[0]):
            lines.append("%d," % k + ",".join("" if np.isnan(v) else repr(float(v)) for v in mat[k]))
        return ArtifactFile(fPath).writeText("\n".join(lines) + "\n")


def detect_drops(per_layer, window=DEFAULT_WINDOW, min_drop_fraction=DEFAULT_MIN_DROP_FRACTION):
    """Return [(layer, magnitude), ...] sorted by magnitude, largest first.

    A layer k >= window is a drop when its magnitude m[k] = e[k-window] - e[k]
    is a local maximum (strictly above the left neighbour, not below the right
    one; an end of the range compares only with its one neighbour, strictly)
    and exceeds both zero and ``min_drop_fraction`` of the curve's range.
    """
    e = [float(v) for v in per_layer]
    if len(e) < 3:
        raise ContractError("drop detection needs at least 3 layers, got %d" % len(e))
    if not isinstance(window, int) or window < 1 or window >= len(e):
        raise ContractError("drop window must lie in 1..%d, got %r" % (len(e) - 1, window))
    threshold = float(min_drop_fraction) * (max(e) - min(e))
    first, last = window, len(e) - 1
    mag = {k: e[k - window] - e[k] for k in range(first, last + 1)}
    drops = []
    for k in range(first, last + 1):
        m = mag[k]
        if m <= 0.0 or m <= threshold:
            continue
        if k == first and k < last:
            isPeak = m > mag[k + 1]
        elif k == last and k > first:
            isPeak = m > mag[k - 1]
        elif k == first:
            isPeak = True
        else:
            isPeak = m > mag[k - 1] and m >= mag[k + 1]
        if isPeak:
            drops.append((k, m))
    drops.sort(key=lambda t: (-t[1], t[0]))
    return drops


def _pickLayers(drops, window):
    (a, _), (b, _) = sorted(drops[:2])
    return a, b - window


def suggest_critical_layers(profile, window=DEFAULT_WINDOW, min_drop_fraction=DEFAULT_MIN_DROP_FRACTION):
    """(i, j) from the two largest drops; ``profile`` is an EntropyProfile or a list of entropies."""
    if not isinstance(profile, EntropyProfile):
        profile = EntropyProfile(profile, window=window, min_drop_fraction=min_drop_fraction)
    if len(profile.drops) < 2:
        raise InsufficientStructureError(
            "entropy curve shows %d significant drop(s); choose the critical layers by hand" % len(profile.drops),
            profile=profile,
        )
    i, j = _pickLayers(profile.drops, profile.window)
    if j <= i:
        raise InsufficientStructureError("drops at layers %d and %d leave no plateau between them (i=%d, j=%d)" % (i, j + profile.window, i, j), profile=profile)
    return i, j


@TimedOperation(logName=__name__)
def profile(params, corpus, window=DEFAULT_WINDOW, min_drop_fraction=DEFAULT_MIN_DROP_FRACTION):
    """Profile logit-lens entropies of ``params`` over ``corpus`` (token sequences)."""
    seqs = [[int(t) for t in seq] for seq in corpus]
    seqs = [s for s in seqs if any(t != PAD_ID for t in s)]
    if not seqs:
        raise ContractError("entropy profiling needs a non-empty corpus")
    nLayers = params.config.n_layers
    maxLen = max(len(s) for s in seqs)
    perLayer = [[] for _ in range(nLayers + 1)]
    perCell = [[[] for _ in range(maxLen)] for _ in range(nLayers + 1)]
    with no_grad():
        for seq in seqs:
            mask = np.asarray(seq) != PAD_ID
            _, acts = forward(params, seq)
            for k in range(nLayers + 1):
                ent = row_entropy(early_exit_logits(acts, k, params).data)
                for pos in np.nonzero(mask)[0]:
                    v = float(ent[pos])
                    perLayer[k].append(v)
                    perCell[k][pos].append(v)
    means = [math.fsum(vals) / len(vals) for vals in perLayer]
    mat = np.full((nLayers + 1, maxLen), np.nan)
    for k in range(nLayers + 1):
        for pos in range(maxLen):
            if perCell[k][pos]:
                mat[k, pos] = math.fsum(perCell[k][pos]) / len(perCell[k][pos])
    prof = EntropyProfile(
        means,
        per_layer_per_position=mat,
        vocab_size=params.config.vocab_size,
        n_positions=len(perLayer[0]),
        window=window,
        min_drop_fraction=min_drop_fraction,
    )
    if prof.suggested_i is None:
        logger.warning("entropy curve shows %d significant drop(s); no critical layers suggested", len(prof.drops))
    else:
        logger.info("suggested critical layers i=%d j=%d (drops %s)", prof.suggested_i, prof.suggested_j, prof.drops)
    return prof
