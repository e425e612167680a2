##
# File:    AblationRunner.py
# Date:    13-Oct-2026
#
# Updates:
#   14-Oct-2026  ET layer sweep with TFT baseline and entropy overlay
##
"""
Method comparison and layer sweep from one shared initialisation.

Every row trains a copy of the same initial parameters with its own
TrainConfig, then evaluates on the held-out split.  The sweep varies the
English-thinking layer for each supervision variant and records whether an
intermediate layer beats the last layer (logits variant).

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.002"

import logging

from deepsup.dft.entropy.EntropyProfile import profile as entropy_profile
from deepsup.dft.evalcli.Evaluator import EvalReport, evaluate
from deepsup.dft.evalcli.PlotSvg import plot_sweep
from deepsup.dft.model.ModelParams import init_params
from deepsup.dft.supervision.SupervisionSpec import SupervisionSpec
from deepsup.dft.trainer.Trainer import train
from deepsup.dft.utils.ArtifactFile import ArtifactFile
from deepsup.dft.utils.DftExceptions import ConfigError, ContractError
from deepsup.dft.utils.ReportFormat import ReportFormat
from deepsup.dft.utils.RunPathInfo import RunPathInfo
from deepsup.dft.utils.TimedOperation import TimedOperation

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ("variant", "layer", "exact_match", "token_accuracy", "lens_acc_j")


def standard_configs(base, layer_i, layer_j):
    """The comparison grid: SFT, TFT, +LC, +ET (each variant) and full DFT (each variant)."""
    rows = [base.replace(method="sft"), base.replace(method="tft")]
    for mode in ("logits", "feature"):
        rows.append(base.replace(method="dft", supervision=SupervisionSpec(lc_mode=mode, layer_i=layer_i)))
    for mode in ("logits", "feature"):
        rows.append(base.replace(method="dft", supervision=SupervisionSpec(et_mode=mode, layer_j=layer_j)))
    for mode in ("logits", "feature"):
        rows.append(base.replace(method="dft", supervision=SupervisionSpec(lc_mode=mode, et_mode=mode, layer_i=layer_i, layer_j=layer_j)))
    return rows


class AblationResult(object):
    def __init__(self, report, sweep=None, observed=None, init_hash=None, tft_entropy=None, tft_accuracy=None):
        self.report = report
        self.sweep = list(sweep or [])
        self.observed = observed
        self.init_hash = init_hash
        self.tft_entropy = tft_entropy
        self.tft_accuracy = tft_accuracy

    def observed_label(self):
        if self.observed is None:
            return "not evaluated"
        return "observed" if self.observed else "not observed"

    def text(self):
        out = ReportFormat(precision=4)
        out.indent(self.report.text("Method comparison"))
        if self.sweep:
            out.blank()
            out.title("English-thinking layer sweep")
            out.table(list(SWEEP_COLUMNS), self.sweep)
            out.blank()
            out.keyValues([("tft_token_accuracy", self.tft_accuracy), ("mid_layer_et_beats_last_layer (logits)", self.observed_label())])
        out.blank()
        out.keyValues([("init_param_hash", self.init_hash)])
        return out.getvalue()

    def records(self):
        recs = [dict(r, kind="method") for r in self.report.records()]
        recs.extend(dict(r, kind="sweep") for r in self.sweep)
        recs.append({"kind": "summary", "init_param_hash": self.init_hash, "mid_layer_beats_last": self.observed_label(), "tft_entropy": self.tft_entropy})
        return recs

    def write(self, pathInfo):
        ArtifactFile(pathInfo.get_report_text_path()).writeText(self.text())
        ArtifactFile(pathInfo.get_report_records_path()).writeJsonLines(self.records())
        if self.sweep:
            plot_sweep(self.sweep, pathInfo.get_sweep_svg_path(), tftAccuracy=self.tft_accuracy, entropy=self.tft_entropy)


def _checkShared(configs):
    if not configs:
        raise ConfigError("ablation needs at least one configuration")
    model = configs[0].model
    for c in configs[1:]:
        if c.model != model:
            raise ConfigError("ablation rows use different model configs (%s vs %s)" % (model, c.model))
        if c.init_seed != configs[0].init_seed:
            raise ConfigError("ablation rows use different init seeds (%d vs %d)" % (configs[0].init_seed, c.init_seed))


class AblationRunner(object):
    def __init__(self, dataset, runDir=None, evalSplit="test", initParams=None):
        self.__dataset = dataset
        self.__pathInfo = RunPathInfo(runDir) if runDir else None
        self.__evalSplit = evalSplit
        self.__init = initParams
        self.__initHash = initParams.content_hash() if initParams is not None else None
        self.__datasetHash = dataset.content_hash()

    @property
    def init_hash(self):
        return self.__initHash

    def __initFor(self, config):
        if self.__init is None:
            self.__init = init_params(config.model, config.init_seed)
            self.__initHash = self.__init.content_hash()
        elif self.__init.config != config.model:
            raise ConfigError("shared initialisation was built for a different model config")
        return self.__init.copy()

    def run_one(self, config, label=None):
        """Train one row from the shared init and evaluate it; returns (EvalReport, params)."""
        label = label or config.label()
        params = self.__initFor(config)
        if params.content_hash() != self.__initHash:
            raise ContractError("row %s does not start from the shared initialisation" % label)
        runDir = self.__pathInfo.get_ablation_run_dir(label) if self.__pathInfo else None
        params, _ = train(config, self.__dataset, params, runDir=runDir)
        spec = config.supervision if config.method == "dft" else None
        report = evaluate(
            params,
            self.__dataset.split(self.__evalSplit),
            spec=spec,
            method=label,
            task=self.__dataset.meta.get("task", {}).get("kind"),
            split=self.__evalSplit,
            datasetHash=self.__datasetHash,
        )
        return report, params

    @TimedOperation(logName=__name__)
    def run_ablation(self, configs, sweepLayers=None, sweepBase=None, sweepVariants=("logits", "feature")):
        """Train and evaluate every config (plus the optional ET sweep); returns an AblationResult."""
        configs = list(configs)
        _checkShared(configs + ([sweepBase] if sweepBase is not None else []))
        report = EvalReport()
        tftParams = None
        tftAccuracy = None
        for config in configs:
            rowReport, params = self.run_one(config)
            report.extend(rowReport)
            if config.method == "tft" and tftParams is None:
                tftParams, tftAccuracy = params, rowReport.rows[0]["token_accuracy"]

        sweep, observed, tftEntropy = [], None, None
        if sweepLayers:
            base = sweepBase or configs[0]
            nLayers = base.model.n_layers
            if tftParams is None:
                rowReport, tftParams = self.run_one(base.replace(method="tft"))
                tftAccuracy = rowReport.rows[0]["token_accuracy"]
            corpus = [ex.target_sequence() for ex in self.__dataset.split(self.__evalSplit)]
            tftEntropy = entropy_profile(tftParams, corpus).per_layer
            for variant in sweepVariants:
                for layer in sorted(set(int(k) for k in sweepLayers)):
                    config = base.replace(method="dft", supervision=SupervisionSpec(et_mode=variant, layer_j=layer))
                    row = self.run_one(config, label="sweep-et-%s-%d" % (variant, layer))[0].rows[0]
                    sweep.append({"variant": variant, "layer": layer, "exact_match": row["exact_match"], "token_accuracy": row["token_accuracy"], "lens_acc_j": row["lens_acc_j"]})
            logitRows = {r["layer"]: r["token_accuracy"] for r in sweep if r["variant"] == "logits"}
            mids = [v for k, v in logitRows.items() if k < nLayers]
            if nLayers in logitRows and mids:
                observed = max(mids) > logitRows[nLayers]
            logger.info("mid-layer ET beats last-layer ET (logits): %s", {None: "not evaluated", True: "observed", False: "not observed"}[observed])

        result = AblationResult(report, sweep, observed, self.__initHash, tftEntropy, tftAccuracy)
        if self.__pathInfo:
            self.__pathInfo.make_dirs()
            result.write(self.__pathInfo)
        return result


def run_ablation(configs, dataset, runDir=None, evalSplit="test", sweepLayers=None, sweepBase=None, initParams=None):
    return AblationRunner(dataset, runDir=runDir, evalSplit=evalSplit, initParams=initParams).run_ablation(configs, sweepLayers=sweepLayers, sweepBase=sweepBase)
