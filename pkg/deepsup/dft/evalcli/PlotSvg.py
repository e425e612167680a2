##
# File:    PlotSvg.py
# Date:    12-Oct-2026
#
# Updates:
##
"""
SVG charts for entropy profiles, alignment curves, projections and the ET
layer sweep.  Output is byte-reproducible: fixed id salt, no date metadata.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import logging
import math
import os

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402 pylint: disable=wrong-import-position

logger = logging.getLogger(__name__)

_RC = {"svg.hashsalt": "deepsup-dft", "svg.fonttype": "none", "font.size": 9}


def _save(fig, fPath):
    dirName = os.path.dirname(os.path.abspath(fPath))
    if not os.path.isdir(dirName):
        os.makedirs(dirName, 0o755)
    with matplotlib.rc_context(_RC):
        fig.savefig(fPath, format="svg", metadata={"Date": None, "Creator": "deepsup.dft"})
    logger.debug("wrote %s", fPath)
    return fPath


def _figure(width=6.0, height=3.6):
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(width, height))
        ax = fig.add_subplot(1, 1, 1)
    return fig, ax


def plot_entropy(profile, fPath, title="Logit-lens entropy per layer"):
    fig, ax = _figure()
    layers = list(range(len(profile.per_layer)))
    ax.plot(layers, profile.per_layer, marker="o", color="tab:blue", label="mean entropy")
    if profile.vocab_size:
        ax.axhline(math.log(profile.vocab_size), color="grey", linestyle=":", label="ln V")
    for k, _ in profile.drops:
        ax.axvline(k, color="tab:red", alpha=0.3)
    if profile.suggested_i is not None:
        ax.axvline(profile.suggested_i, color="tab:green", linestyle="--", label="i = %d" % profile.suggested_i)
        ax.axvline(profile.suggested_j, color="tab:purple", linestyle="--", label="j = %d" % profile.suggested_j)
    ax.set_xlabel("layer")
    ax.set_ylabel("entropy (nats)")
    ax.set_title(title)
    ax.set_xticks(layers)
    ax.legend(loc="best")
    return _save(fig, fPath)


def plot_alignment(curves, fPath, title="Parallel cosine per layer"):
    """``curves`` maps a label to a per-layer list of mean cosines."""
    fig, ax = _figure()
    for label in sorted(curves):
        vals = curves[label]
        pts = [(k, v) for k, v in enumerate(vals) if v is not None]
        ax.plot([k for k, _ in pts], [v for _, v in pts], marker="o", label=label)
    ax.set_xlabel("layer")
    ax.set_ylabel("mean cosine")
    ax.set_ylim(-1.05, 1.05)
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, fPath)


def plot_projection(projection, fPath, title="Pooled representations (PCA)"):
    fig, ax = _figure(5.0, 5.0)
    for lang, color in (("pivot", "tab:blue"), ("target", "tab:orange")):
        pts = [c for c, lab in zip(projection.coords, projection.labels) if lab == lang]
        if pts:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=12, color=color, label=lang)
    ax.set_xlabel("PC 1")
    ax.set_ylabel("PC 2")
    ax.set_title(title)
    ax.legend(loc="best")
    return _save(fig, fPath)


def plot_sweep(sweep, fPath, tftAccuracy=None, entropy=None, metric="token_accuracy", title="English-thinking supervision by layer"):
    """Grouped bars per supervised layer (one bar per variant), dashed TFT line, entropy overlay.

    :param sweep: list of dicts with ``layer``, ``variant`` and ``metric`` keys
    """
    fig, ax = _figure(7.0, 3.8)
    layers = sorted({r["layer"] for r in sweep})
    variants = sorted({r["variant"] for r in sweep})
    width = 0.8 / max(len(variants), 1)
    for vi, variant in enumerate(variants):
        xs, ys = [], []
        for li, layer in enumerate(layers):
            for r in sweep:
                if r["layer"] == layer and r["variant"] == variant:
                    xs.append(li + (vi - (len(variants) - 1) / 2.0) * width)
                    ys.append(r[metric])
        ax.bar(xs, ys, width=width, label="ET-%s" % variant)
    if tftAccuracy is not None:
        ax.axhline(tftAccuracy, color="black", linestyle="--", label="TFT")
    ax.set_xticks(list(range(len(layers))))
    ax.set_xticklabels([str(k) for k in layers])
    ax.set_xlabel("supervised layer j")
    ax.set_ylabel(metric.replace("_", " "))
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    handles, labels = ax.get_legend_handles_labels()
    if entropy is not None:
        ax2 = ax.twinx()
        ax2.plot([layers.index(k) for k in layers if k < len(entropy)], [entropy[k] for k in layers if k < len(entropy)], color="tab:red", marker="x", label="TFT entropy")
        ax2.set_ylabel("entropy (nats)")
        h2, l2 = ax2.get_legend_handles_labels()
        handles, labels = handles + h2, labels + l2
    ax.legend(handles, labels, loc="lower right")
    return _save(fig, fPath)
