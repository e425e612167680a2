##
# File:    DftCli.py
# Date:    14-Oct-2026
#
# Updates:
##
"""
Command-line front end: ``dft-toy <subcommand> ...``.

Failures end the command with one line on stderr (exit status 1 for library
errors, 2 for usage errors)::

    error <ExceptionClass>: <message>

"""
__docformat__ = "restructuredtext en"
__author__ = "DFT toy developers"
__license__ = "Apache 2.0"
__version__ = "V0.001"

import logging
import os
import sys

import click
import numpy as np

from deepsup.dft.entropy.EntropyProfile import DEFAULT_MIN_DROP_FRACTION, DEFAULT_WINDOW, EntropyProfile
from deepsup.dft.entropy.EntropyProfile import profile as entropy_profile
from deepsup.dft.evalcli.AblationRunner import run_ablation, standard_configs
from deepsup.dft.evalcli.AlignmentAnalysis import ProjectionOutput, alignment_curve, pooled_representations, project_2d
from deepsup.dft.evalcli.Evaluator import evaluate
from deepsup.dft.evalcli.PlotSvg import plot_alignment, plot_entropy, plot_projection, plot_sweep
from deepsup.dft.model.CheckpointIo import load_checkpoint
from deepsup.dft.supervision.SupervisionSpec import SupervisionSpec
from deepsup.dft.syndata.DatasetFile import read_dataset, write_dataset
from deepsup.dft.syndata.LanguageMap import make_language
from deepsup.dft.syndata.SyntheticTaskGenerator import generate_splits
from deepsup.dft.syndata.TaskSpec import TaskSpec
from deepsup.dft.trainer.TrainConfig import load_train_config
from deepsup.dft.trainer.Trainer import read_manifest, train_run
from deepsup.dft.utils.ArtifactFile import ArtifactFile, sha256_file
from deepsup.dft.utils.DftExceptions import ConfigError, DftError
from deepsup.dft.utils.RunPathInfo import RunPathInfo

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class DftGroup(click.Group):
    """Click group that reports every failure on one stderr line.

    Library errors exit with status 1; usage errors (unknown flags, bad
    values) keep click's status 2.
    """

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        if not standalone_mode:
            return super(DftGroup, self).main(args, prog_name, complete_var, standalone_mode=False, **extra)
        try:
            rv = super(DftGroup, self).main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.UsageError as e:
            click.echo("error UsageError: %s" % " ".join(e.format_message().split()), err=True)
            sys.exit(e.exit_code)
        except click.ClickException as e:
            click.echo("error %s: %s" % (type(e).__name__, " ".join(e.format_message().split())), err=True)
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("error Abort: aborted", err=True)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)

    def invoke(self, ctx):
        try:
            return super(DftGroup, self).invoke(ctx)
        except (DftError, OSError) as e:
            logger.debug("command failed", exc_info=True)
            click.echo("error %s: %s" % (type(e).__name__, e), err=True)
            ctx.exit(1)
        return None


def _range(text):
    try:
        lo, _, hi = text.partition(":")
        return (int(lo), int(hi or lo))
    except ValueError:
        raise click.BadParameter("expected MIN:MAX, got %r" % text)


class _Source(object):
    """Checkpoint, dataset and critical layers resolved from --run / --checkpoint / --data."""

    def __init__(self, run, checkpoint, data, split):
        self.manifest = read_manifest(run) if run else None
        self.outDir = run
        if checkpoint is None:
            if self.manifest is None:
                raise ConfigError("give --run DIR or --checkpoint FILE")
            checkpoint = self.manifest["checkpoints"]["final"]["path"]
        self.checkpointPath = checkpoint
        self.checkpoint = load_checkpoint(checkpoint)
        self.params = self.checkpoint.params
        if data is None and self.manifest is not None:
            cfg = self.manifest["config"]
            data = cfg.get("eval_path") or cfg.get("train_path")
        if data is None:
            raise ConfigError("give --data FILE (no run manifest to take it from)")
        self.dataPath = data
        self.dataset = read_dataset(data)
        self.dataset.check_vocab(self.params.config.vocab_size)
        self.split = split
        sup = self.manifest["config"]["supervision"] if self.manifest else {}
        self.layer_i = sup.get("layer_i")
        self.layer_j = sup.get("layer_j")

    def examples(self, limit=None):
        exs = self.dataset.split(self.split)
        return exs[:limit] if limit else exs

    def pathInfo(self, outDir):
        outDir = outDir or self.outDir
        if not outDir:
            raise ConfigError("give --out-dir DIR (no run directory to write into)")
        return RunPathInfo(outDir)


def _sourceOptions(fn):
    fn = click.option("--split", default="test", show_default=True, type=click.Choice(["train", "dev", "test"]))(fn)
    fn = click.option("--data", type=click.Path(exists=True, dir_okay=False), help="dataset file (default: from the run manifest)")(fn)
    fn = click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), help="checkpoint file (default: final checkpoint of --run)")(fn)
    fn = click.option("--run", "run", type=click.Path(exists=True, file_okay=False), help="run directory holding manifest.json")(fn)
    fn = click.option("--out-dir", type=click.Path(file_okay=False), help="output directory (default: the run directory)")(fn)
    return fn


@click.group(cls=DftGroup)
@click.option("--log-level", default="WARNING", show_default=True, type=click.Choice(LOG_LEVELS, case_sensitive=False))
def cli(log_level):
    """Deep supervision fine-tuning on a toy multilingual transformer."""
    logging.basicConfig(level=getattr(logging, log_level.upper()), format="%(asctime)s [%(levelname)s]-%(module)s.%(funcName)s: %(message)s")


@cli.command("gen-data")
@click.option("--task", "kind", default="kv", show_default=True, type=click.Choice(["copy", "reverse", "kv", "add"]))
@click.option("--vocab-size", default=256, show_default=True, type=int)
@click.option("--max-seq-len", default=32, show_default=True, type=int)
@click.option("--query-len", default="2:4", show_default=True, help="payload length range MIN:MAX")
@click.option("--answer-len", default="1:2", show_default=True, help="kv queries per example MIN:MAX")
@click.option("--modulus", default=10, show_default=True, type=int)
@click.option("--train", "nTrain", default=512, show_default=True, type=int)
@click.option("--dev", "nDev", default=64, show_default=True, type=int)
@click.option("--test", "nTest", default=64, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--language-seed", default=1, show_default=True, type=int)
@click.option("--out", "outPath", required=True, type=click.Path(dir_okay=False))
def gen_data(kind, vocab_size, max_seq_len, query_len, answer_len, modulus, nTrain, nDev, nTest, seed, language_seed, outPath):
    """Generate a parallel synthetic dataset file."""
    task = TaskSpec(kind=kind, vocab_size=vocab_size, query_len=_range(query_len), answer_len=_range(answer_len), modulus=modulus, seed=seed, max_seq_len=max_seq_len)
    language = make_language(language_seed, vocab_size)
    dataset = generate_splits(task, language, {"train": nTrain, "dev": nDev, "test": nTest})
    write_dataset(outPath, dataset)
    click.echo("%s %s" % (outPath, sha256_file(outPath)))


@cli.command("train")
@click.option("--config", "configPath", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--run-dir", type=click.Path(file_okay=False), help="run directory (default: [run] output_dir)")
@click.option("--resume", "resumeFrom", type=click.Path(exists=True, dir_okay=False), help="continue from this checkpoint")
def train_cmd(configPath, run_dir, resumeFrom):
    """Train one configuration and write its run manifest."""
    config = load_train_config(configPath)
    runDir = run_dir or config.output_dir
    if not runDir:
        raise ConfigError("no run directory: pass --run-dir or set [run] output_dir")
    manifest = train_run(config, runDir, configPath=os.path.abspath(configPath), resumeFrom=resumeFrom)
    click.echo("%s %s" % (RunPathInfo(runDir).get_manifest_path(), manifest["final_param_hash"]))


@cli.command("profile-entropy")
@_sourceOptions
@click.option("--limit", type=int, help="profile at most this many sequences")
@click.option("--window", default=DEFAULT_WINDOW, show_default=True, type=int)
@click.option("--min-drop-fraction", default=DEFAULT_MIN_DROP_FRACTION, show_default=True, type=float)
def profile_entropy(out_dir, run, checkpoint, data, split, limit, window, min_drop_fraction):
    """Per-layer logit-lens entropy and suggested critical layers."""
    src = _Source(run, checkpoint, data, split)
    corpus = [ex.target_sequence() for ex in src.examples(limit)]
    prof = entropy_profile(src.params, corpus, window=window, min_drop_fraction=min_drop_fraction)
    pathInfo = src.pathInfo(out_dir)
    pathInfo.make_dirs()
    prof.write_records(pathInfo.get_entropy_records_path())
    prof.write_heatmap(pathInfo.get_entropy_heatmap_path())
    plot_entropy(prof, pathInfo.get_entropy_svg_path())
    for rec in prof.records():
        click.echo("layer %2d  entropy %.6f" % (rec["layer"], rec["mean_entropy"]))
    click.echo("suggested i=%s j=%s" % (prof.suggested_i, prof.suggested_j))


@cli.command("evaluate")
@_sourceOptions
@click.option("--layer-i", type=int, help="logit-lens query layer (default: from the run)")
@click.option("--layer-j", type=int, help="logit-lens answer layer (default: from the run)")
@click.option("--label", default=None, help="row label (default: the run's method label)")
def evaluate_cmd(out_dir, run, checkpoint, data, split, layer_i, layer_j, label):
    """Exact match, token accuracy and logit-lens accuracies on one split."""
    src = _Source(run, checkpoint, data, split)
    spec = SupervisionSpec(layer_i=layer_i if layer_i is not None else src.layer_i, layer_j=layer_j if layer_j is not None else src.layer_j)
    label = label or (src.manifest["label"] if src.manifest else "checkpoint")
    report = evaluate(
        src.params,
        src.examples(),
        spec=spec,
        method=label,
        task=src.dataset.meta.get("task", {}).get("kind"),
        split=split,
        checkpointHash=sha256_file(src.checkpointPath),
        datasetHash=src.dataset.content_hash(),
    )
    pathInfo = src.pathInfo(out_dir)
    pathInfo.make_dirs()
    report.write(pathInfo.get_report_text_path(), pathInfo.get_report_records_path())
    click.echo(report.text())


@cli.command("align")
@_sourceOptions
def align_cmd(out_dir, run, checkpoint, data, split):
    """Mean parallel cosine of pooled query representations per layer."""
    src = _Source(run, checkpoint, data, split)
    curve = alignment_curve(src.params, src.examples())
    pathInfo = src.pathInfo(out_dir)
    pathInfo.make_dirs()
    curve.write(pathInfo.get_alignment_records_path())
    for k, c in enumerate(curve.per_layer):
        click.echo("layer %2d  cosine %s" % (k, "-" if c is None else "%.6f" % c))
    if curve.skipped:
        click.echo("skipped %d degenerate pooled vectors" % curve.skipped)


@cli.command("project")
@_sourceOptions
@click.option("--layer", type=int, help="layer to project (default: the run's layer i, else 1)")
@click.option("--limit", type=int, default=200, show_default=True)
def project_cmd(out_dir, run, checkpoint, data, split, layer, limit):
    """2-D principal-component projection of pivot and target representations."""
    src = _Source(run, checkpoint, data, split)
    if layer is None:
        layer = src.layer_i if src.layer_i is not None else 1
    vectors, labels = pooled_representations(src.params, src.examples(limit), layer)
    proj = project_2d(vectors, labels)
    pathInfo = src.pathInfo(out_dir)
    pathInfo.make_dirs()
    proj.write(pathInfo.get_projection_records_path())
    plot_projection(proj, os.path.splitext(pathInfo.get_projection_records_path())[0] + ".svg", title="Pooled representations at layer %d (PCA)" % layer)
    click.echo("projected %d vectors at layer %d" % (len(proj), layer))


@cli.command("ablate")
@click.option("--config", "configPath", required=True, type=click.Path(exists=True, dir_okay=False), help="base config; method and supervision are replaced per row")
@click.option("--layer-i", required=True, type=int)
@click.option("--layer-j", required=True, type=int)
@click.option("--sweep", default="", help="comma-separated ET layers for the sweep")
@click.option("--eval-split", default="test", show_default=True, type=click.Choice(["train", "dev", "test"]))
@click.option("--run-dir", required=True, type=click.Path(file_okay=False))
def ablate_cmd(configPath, layer_i, layer_j, sweep, eval_split, run_dir):
    """Method comparison grid (and optional ET layer sweep) from one shared init."""
    base = load_train_config(configPath)
    try:
        sweepLayers = [int(k) for k in sweep.split(",") if k.strip()]
    except ValueError:
        raise click.BadParameter("--sweep expects comma-separated integers, got %r" % sweep)
    dataset = read_dataset(base.train_path)
    result = run_ablation(standard_configs(base, layer_i, layer_j), dataset, runDir=run_dir, evalSplit=eval_split, sweepLayers=sweepLayers, sweepBase=base)
    click.echo(result.text())


@cli.command("plot")
@click.option("--kind", required=True, type=click.Choice(["entropy", "alignment", "projection", "sweep"]))
@click.option("--records", "recordsPath", required=True, multiple=True, type=click.Path(exists=True, dir_okay=False), help="JSON-lines file(s) written by another subcommand")
@click.option("--out", "outPath", required=True, type=click.Path(dir_okay=False))
def plot_cmd(kind, recordsPath, outPath):
    """Re-draw an SVG chart from saved records."""
    records = ArtifactFile(recordsPath[0]).readJsonLines()
    body = [r for r in records if "summary" not in r]
    summary = next((r["summary"] for r in records if "summary" in r), {})
    if kind == "entropy":
        prof = EntropyProfile([r["mean_entropy"] for r in body], vocab_size=summary.get("vocab_size"), window=summary.get("window", DEFAULT_WINDOW), min_drop_fraction=summary.get("min_drop_fraction", DEFAULT_MIN_DROP_FRACTION))
        plot_entropy(prof, outPath)
    elif kind == "alignment":
        curves = {}
        for path in recordsPath:
            rows = [r for r in ArtifactFile(path).readJsonLines() if "summary" not in r]
            curves[os.path.basename(os.path.dirname(os.path.abspath(path))) or path] = [r["mean_cosine"] for r in rows]
        plot_alignment(curves, outPath)
    elif kind == "projection":
        plot_projection(ProjectionOutput(np.array([[r["x"], r["y"]] for r in body]), [r["language"] for r in body], summary.get("explained_variance", [0.0, 0.0])), outPath)
    else:
        sweepRows = [r for r in records if r.get("kind") == "sweep"]
        if not sweepRows:
            raise ConfigError("%s holds no sweep records" % recordsPath[0])
        tft = next((r["token_accuracy"] for r in records if r.get("kind") == "method" and r.get("method") == "tft"), None)
        summ = next((r for r in records if r.get("kind") == "summary"), {})
        plot_sweep(sweepRows, outPath, tftAccuracy=tft, entropy=summ.get("tft_entropy"))
    click.echo(outPath)


def main():
    cli(prog_name="dft-toy")  # pylint: disable=no-value-for-parameter


if __name__ == "__main__":
    main()
