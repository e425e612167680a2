##
# File:    Trainer.py
# Date:    09-Oct-2026
#
# Updates:
#   11-Oct-2026  divergence guard with last-good checkpoint; resume from checkpoint
#   13-Oct-2026  run manifest
##
"""
Optimisation loop for SFT, TFT and DFT runs.

Batches follow a per-epoch permutation drawn from ``(seed, epoch)``; every
step is evaluated sequentially in a fixed order, so identical inputs give
bit-identical parameters, metrics and checkpoints.  SFT trains on the pivot
pair only, TFT on the target pair only, and DFT adds the active
intermediate terms of the supervision spec.

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.003"

import collections
import logging
import math
import time

import numpy as np

from deepsup.dft.autodiff.Tensor import Graph
from deepsup.dft.model.CheckpointIo import load_checkpoint, save_checkpoint
from deepsup.dft.model.ModelParams import init_params
from deepsup.dft.supervision.DeepSupervisionLoss import loss_total
from deepsup.dft.supervision.ParallelExample import ParallelBatch, ParallelExample
from deepsup.dft.syndata.DatasetFile import read_dataset
from deepsup.dft.trainer.Optimizers import check_finite_grads, clip_global_norm, learning_rate_at, make_optimizer
from deepsup.dft.utils.ArtifactFile import ArtifactFile, sha256_file
from deepsup.dft.utils.DftExceptions import ConfigError, ContractError, NonFiniteError, TrainingDivergedError
from deepsup.dft.utils.RunPathInfo import RunPathInfo
from deepsup.dft.utils.TimedOperation import TimedOperation

logger = logging.getLogger(__name__)

METRIC_FIELDS = ("step", "epoch", "l_tft", "l_lc", "l_et", "total", "grad_norm", "learning_rate")


class TrainMetrics(object):
    """Per-step records; wall time is kept beside them and written only on request."""

    def __init__(self, records=None):
        self.records = list(records or [])
        self.wall_times = [None] * len(self.records)

    def append(self, record, wallTime=None):
        self.records.append(record)
        self.wall_times.append(wallTime)

    def __len__(self):
        return len(self.records)

    def series(self, field):
        return [r[field] for r in self.records]

    def last(self):
        return self.records[-1] if self.records else None

    def moving_average(self, field="total", window=100):
        vals = self.series(field)
        if len(vals) < window:
            return []
        c = np.cumsum(np.asarray(vals, dtype=np.float64))
        out = [c[window - 1] / window]
        out.extend((c[k] - c[k - window]) / window for k in range(window, len(vals)))
        return [float(v) for v in out]

    def lines(self, recordWallTime=False):
        out = []
        for rec, wall in zip(self.records, self.wall_times):
            rec = dict(rec)
            if recordWallTime and wall is not None:
                rec["wall_time"] = wall
            out.append(rec)
        return out

    def write(self, fPath, recordWallTime=False):
        return ArtifactFile(fPath).writeJsonLines(self.lines(recordWallTime))

    @classmethod
    def read(cls, fPath):
        metrics = cls()
        for rec in ArtifactFile(fPath).readJsonLines():
            wall = rec.pop("wall_time", None)
            metrics.append(rec, wall)
        return metrics


def training_examples(config, dataset):
    """The examples a method trains on: pivot pairs for sft, target pairs otherwise."""
    examples = dataset.split(config.split)
    if config.method == "sft":
        return [ParallelExample(ex.x_en, ex.x_en, ex.y_en, ex.y_en) for ex in examples]
    return examples


def batch_schedule(config, nExamples):
    """List of (epoch, example indices) for every step of the run."""
    steps = []
    for epoch in range(config.epochs):
        order = np.random.default_rng([int(config.seed), epoch]).permutation(nExamples)
        for start in range(0, nExamples, config.batch_size):
            steps.append((epoch, [int(i) for i in order[start : start + config.batch_size]]))
            if config.max_steps is not None and len(steps) >= config.max_steps:
                return steps
    return steps


def _optimizerArrays(params):
    return collections.OrderedDict((n, t.data) for n, t in params.items())


def _saveLastGood(pathInfo, params, config, step, optimizer):
    if pathInfo is None:
        return None
    path = pathInfo.get_last_good_path()
    save_checkpoint(path, params, seed=config.seed, step=step, optimizerState=optimizer.state_dict(), meta={"label": config.label(), "kind": "last-good"})
    return path


@TimedOperation(logName=__name__)
def train(config, dataset, params, runDir=None, resumeFrom=None):
    """Train ``params`` in place; returns (params, TrainMetrics).

    :param runDir: optional run directory for metrics, checkpoints and the last-good state
    :param resumeFrom: checkpoint path whose params, optimizer state and step continue the run
    """
    config.validate()
    if params.config != config.model:
        raise ConfigError("parameters were built for %s, config asks for %s" % (params.config, config.model))
    dataset.check_vocab(config.model.vocab_size)
    spec = config.effective_supervision()
    examples = training_examples(config, dataset)
    schedule = batch_schedule(config, len(examples))
    pathInfo = RunPathInfo(runDir) if runDir else None
    if pathInfo:
        pathInfo.make_dirs()
    optimizer = make_optimizer(config.optimizer)
    metrics = TrainMetrics()
    startStep = 0

    if resumeFrom:
        ckpt = load_checkpoint(resumeFrom)
        if ckpt.config != config.model:
            raise ConfigError("checkpoint %s holds a different model shape" % resumeFrom)
        for name, t in params.items():
            t.data[...] = ckpt.params[name].data
        if ckpt.optimizerState:
            optimizer.load_state_dict(ckpt.optimizerState)
        startStep = int(ckpt.step)
        if startStep > len(schedule):
            raise ContractError("checkpoint step %d is past the end of the %d-step run" % (startStep, len(schedule)))
        if pathInfo and ArtifactFile(pathInfo.get_metrics_path()).srcFileExists():
            previous = TrainMetrics.read(pathInfo.get_metrics_path())
            for rec, wall in zip(previous.records, previous.wall_times):
                if rec["step"] <= startStep:
                    metrics.append(rec, wall)
        logger.warning("resuming %s at step %d of %d", config.label(), startStep, len(schedule))

    logger.info("training %s: %d examples, %d steps, batch %d", config.label(), len(examples), len(schedule), config.batch_size)
    arrays = _optimizerArrays(params)
    for stepIdx in range(startStep, len(schedule)):
        epoch, indices = schedule[stepIdx]
        tStart = time.perf_counter()
        params.zero_grad()
        batch = ParallelBatch([examples[i] for i in indices], maxSeqLen=config.model.max_seq_len)
        breakdown = loss_total(params, batch, spec)
        try:
            if not math.isfinite(breakdown.total):
                raise NonFiniteError("non-finite loss %r" % breakdown.total)
            graph = Graph(breakdown.loss)
            graph.backward()
            grads = params.grads()
            check_finite_grads(grads)
        except NonFiniteError as e:
            lastGood = _saveLastGood(pathInfo, params, config, stepIdx, optimizer)
            logger.error("training diverged at step %d (%s); last good state %s", stepIdx + 1, e, lastGood)
            raise TrainingDivergedError("training diverged at step %d: %s" % (stepIdx + 1, e), step=stepIdx + 1, lastGoodPath=lastGood)
        gradNorm = clip_global_norm(grads, config.optimizer.clip_norm)
        lr = learning_rate_at(config.optimizer.schedule, config.optimizer.learning_rate, stepIdx, len(schedule))
        optimizer.step(arrays, grads, lr)

        step = stepIdx + 1
        record = collections.OrderedDict(
            [
                ("step", step),
                ("epoch", epoch),
                ("l_tft", breakdown.l_tft),
                ("l_lc", breakdown.l_lc),
                ("l_et", breakdown.l_et),
                ("total", breakdown.total),
                ("grad_norm", gradNorm),
                ("learning_rate", lr),
            ]
        )
        metrics.append(record, time.perf_counter() - tStart)
        if step % 50 == 0 or step == len(schedule):
            logger.info("step %d/%d total %.6f (tft %.6f lc %.6f et %.6f) grad norm %.4f", step, len(schedule), breakdown.total, breakdown.l_tft, breakdown.l_lc, breakdown.l_et, gradNorm)
        if pathInfo and config.checkpoint_every and step % config.checkpoint_every == 0:
            save_checkpoint(pathInfo.get_checkpoint_path(step), params, seed=config.seed, step=step, optimizerState=optimizer.state_dict(), meta={"label": config.label()})
            metrics.write(pathInfo.get_metrics_path(), config.record_wall_time)

    params.zero_grad()
    if pathInfo:
        metrics.write(pathInfo.get_metrics_path(), config.record_wall_time)
        save_checkpoint(pathInfo.get_final_checkpoint_path(), params, seed=config.seed, step=len(schedule), optimizerState=optimizer.state_dict(), meta={"label": config.label()})
    return params, metrics


def train_run(config, runDir, configPath=None, resumeFrom=None, initParams=None):
    """Full run: read the data, initialise, train, and write the run manifest.

    :returns: the manifest dictionary
    """
    config.validate()
    if not config.train_path:
        raise ConfigError("no training data path configured")
    dataset = read_dataset(config.train_path)
    pathInfo = RunPathInfo(runDir)
    pathInfo.make_dirs()
    ArtifactFile(pathInfo.get_config_path()).writeText(config.to_ini())
    params = initParams.copy() if initParams is not None else init_params(config.model, config.init_seed)
    initPath = save_checkpoint(pathInfo.get_init_checkpoint_path(), params, seed=config.init_seed, step=0)
    initHash = params.content_hash()
    params, metrics = train(config, dataset, params, runDir=runDir, resumeFrom=resumeFrom)

    checkpoints = {"init": initPath, "final": pathInfo.get_final_checkpoint_path()}
    lastStep = metrics.last()["step"] if len(metrics) else 0
    if config.checkpoint_every:
        # a resumed run only holds the checkpoints written after its start step
        for step in range(config.checkpoint_every, lastStep + 1, config.checkpoint_every):
            if ArtifactFile(pathInfo.get_checkpoint_path(step)).srcFileExists():
                checkpoints["step-%06d" % step] = pathInfo.get_checkpoint_path(step)
    manifest = {
        "label": config.label(),
        "method": config.method,
        "config_path": configPath,
        "config_copy": pathInfo.get_config_path(),
        "config": config.to_dict(),
        "seeds": {"init": config.init_seed, "data_order": config.seed},
        "dataset": {"path": config.train_path, "sha256": sha256_file(config.train_path), "content_hash": dataset.content_hash()},
        "init_param_hash": initHash,
        "final_param_hash": params.content_hash(),
        "checkpoints": {name: {"path": p, "sha256": sha256_file(p)} for name, p in sorted(checkpoints.items())},
        "metrics_path": pathInfo.get_metrics_path(),
        "steps": lastStep,
    }
    ArtifactFile(pathInfo.get_manifest_path()).writeJson(manifest)
    logger.info("run manifest written to %s", pathInfo.get_manifest_path())
    return manifest


def read_manifest(runDir):
    pathInfo = RunPathInfo(runDir)
    af = ArtifactFile(pathInfo.get_manifest_path())
    if not af.srcFileExists():
        raise ConfigError("no run manifest in %s" % runDir)
    return af.readJson()
