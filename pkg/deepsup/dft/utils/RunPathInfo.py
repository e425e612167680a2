##
# File:    RunPathInfo.py
# Date:    05-Oct-2026
#
# Updates:
#   13-Oct-2026  ablation sub-run directories
##
"""
Methods for finding the paths of the artifacts a run directory holds.

All names are relative to the run directory given at construction; nothing
is created here except on request (``make_dirs``).

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import logging
import os
import re

logger = logging.getLogger(__name__)


class RunPathInfo(object):
    def __init__(self, runDir):
        self.__runDir = os.path.abspath(runDir)
        #                  content          file name template
        self.__mapping = {
            "manifest": "manifest.json",
            "config": "train.cfg",
            "metrics": "metrics.jsonl",
            "checkpoint": os.path.join("checkpoints", "step-{:06d}.ckpt"),
            "final": os.path.join("checkpoints", "final.ckpt"),
            "init": os.path.join("checkpoints", "init.ckpt"),
            "last_good": os.path.join("checkpoints", "last-good.ckpt"),
            "report_text": "report.txt",
            "report_records": "report.jsonl",
            "entropy_records": "entropy.jsonl",
            "entropy_svg": "entropy.svg",
            "entropy_heatmap": "entropy-heatmap.csv",
            "alignment_records": "alignment.jsonl",
            "projection_records": "projection.jsonl",
            "sweep_svg": "sweep.svg",
            "ablation_run": os.path.join("runs", "{}"),
        }

    @property
    def run_dir(self):
        return self.__runDir

    def __getpath(self, content, *args):
        assert content in self.__mapping
        return os.path.join(self.__runDir, self.__mapping[content].format(*args))

    def make_dirs(self):
        for sub in ("", "checkpoints"):
            path = os.path.join(self.__runDir, sub)
            if not os.path.isdir(path):
                os.makedirs(path, 0o755)
        return self.__runDir

    def get_manifest_path(self):
        return self.__getpath("manifest")

    def get_config_path(self):
        return self.__getpath("config")

    def get_metrics_path(self):
        return self.__getpath("metrics")

    def get_checkpoint_path(self, step):
        return self.__getpath("checkpoint", int(step))

    def get_final_checkpoint_path(self):
        return self.__getpath("final")

    def get_init_checkpoint_path(self):
        return self.__getpath("init")

    def get_last_good_path(self):
        return self.__getpath("last_good")

    def get_report_text_path(self):
        return self.__getpath("report_text")

    def get_report_records_path(self):
        return self.__getpath("report_records")

    def get_entropy_records_path(self):
        return self.__getpath("entropy_records")

    def get_entropy_svg_path(self):
        return self.__getpath("entropy_svg")

    def get_entropy_heatmap_path(self):
        return self.__getpath("entropy_heatmap")

    def get_alignment_records_path(self):
        return self.__getpath("alignment_records")

    def get_projection_records_path(self):
        return self.__getpath("projection_records")

    def get_sweep_svg_path(self):
        return self.__getpath("sweep_svg")

    def get_ablation_run_dir(self, label):
        """Sub-run directory for one ablation row; the label is reduced to a safe file name."""
        safe = re.sub(r"[^A-Za-z0-9_.+-]+", "_", label).strip("_") or "run"
        return self.__getpath("ablation_run", safe)
