##
# File:    AlignmentAnalysis.py
# Date:    11-Oct-2026
#
# Updates:
##
"""
Cross-lingual representation alignment: per-layer parallel cosine curves
and a deterministic 2-D principal-component projection of pooled sentence
representations.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import logging
import math

import numpy as np

from deepsup.dft.autodiff.Tensor import no_grad
from deepsup.dft.model.Transformer import forward
from deepsup.dft.utils.ArtifactFile import ArtifactFile
from deepsup.dft.utils.DftExceptions import ContractError
from deepsup.dft.utils.TimedOperation import TimedOperation

logger = logging.getLogger(__name__)

RANK_TOL = 1.0e-12


class AlignmentCurve(object):
    def __init__(self, per_layer, skipped=0, n_pairs=0):
        self.per_layer = per_layer
        self.skipped = skipped
        self.n_pairs = n_pairs

    def records(self):
        return [{"layer": k, "mean_cosine": c} for k, c in enumerate(self.per_layer)] + [{"summary": {"n_pairs": self.n_pairs, "skipped": self.skipped}}]

    def write(self, fPath):
        return ArtifactFile(fPath).writeJsonLines(self.records())


class ProjectionOutput(object):
    def __init__(self, coords, labels, explained):
        self.coords = coords
        self.labels = list(labels)
        self.explained = explained

    def __len__(self):
        return self.coords.shape[0]

    def records(self):
        return [{"x": float(x), "y": float(y), "language": lab} for (x, y), lab in zip(self.coords, self.labels)]

    def write(self, fPath):
        return ArtifactFile(fPath).writeJsonLines(self.records() + [{"summary": {"explained_variance": [float(v) for v in self.explained]}}])


def _pairs(corpus):
    out = []
    for item in corpus:
        if hasattr(item, "x_en"):
            out.append((list(item.x_en), list(item.x_tgt)))
        else:
            xEn, xTgt = item
            out.append((list(xEn), list(xTgt)))
    return out


def _pooled(params, tokens):
    _, acts = forward(params, tokens)
    return [h.data.mean(axis=0) for h in acts.hidden]


@TimedOperation(logName=__name__)
def alignment_curve(params, corpus):
    """Mean over parallel (x_en, x_tgt) pairs of cos(pool h_k(en), pool h_k(tgt)) for every layer k."""
    pairs = _pairs(corpus)
    if not pairs:
        raise ContractError("alignment analysis needs at least one parallel pair")
    nLayers = params.config.n_layers
    values = [[] for _ in range(nLayers + 1)]
    skipped = 0
    with no_grad():
        for xEn, xTgt in pairs:
            pe, pt = _pooled(params, xEn), _pooled(params, xTgt)
            for k in range(nLayers + 1):
                na2, nb2 = float(np.dot(pe[k], pe[k])), float(np.dot(pt[k], pt[k]))
                if na2 == 0.0 or nb2 == 0.0:
                    skipped += 1
                    continue
                values[k].append(float(np.dot(pe[k], pt[k])) / math.sqrt(na2 * nb2))
    if skipped:
        logger.warning("skipped %d degenerate pooled vectors", skipped)
    perLayer = [min(1.0, max(-1.0, math.fsum(v) / len(v))) if v else None for v in values]
    return AlignmentCurve(perLayer, skipped=skipped, n_pairs=len(pairs))


def pooled_representations(params, corpus, layer):
    """Stacked pooled layer-``layer`` states: all pivot inputs first, then all target inputs."""
    pairs = _pairs(corpus)
    if not 0 <= layer <= params.config.n_layers:
        raise ContractError("layer %r outside 0..%d" % (layer, params.config.n_layers))
    vecs, labels = [], []
    with no_grad():
        for lang, pos in (("pivot", 0), ("target", 1)):
            for pair in pairs:
                vecs.append(_pooled(params, pair[pos])[layer])
                labels.append(lang)
    return np.vstack(vecs), labels


def project_2d(vectors, labels=None):
    """Top-2 principal-component coordinates of ``vectors`` (n x d, n >= 3).

    Each axis is oriented so its largest-magnitude loading is positive; a
    missing or numerically null second component gives a zero second axis.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 3:
        raise ContractError("projection needs at least 3 vectors, got shape %s" % (X.shape,))
    labels = list(labels) if labels is not None else [""] * X.shape[0]
    if len(labels) != X.shape[0]:
        raise ContractError("%d labels for %d vectors" % (len(labels), X.shape[0]))
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / (X.shape[0] - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    coords = np.zeros((X.shape[0], 2))
    explained = [0.0, 0.0]
    top = max(float(evals[0]), 0.0)
    for axis in range(min(2, X.shape[1])):
        if evals[axis] <= RANK_TOL * max(top, RANK_TOL):
            continue
        v = evecs[:, axis]
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        coords[:, axis] = Xc @ v
        explained[axis] = float(evals[axis])
    return ProjectionOutput(coords, labels, explained)
