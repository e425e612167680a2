import os

import pytest
from click.testing import CliRunner

from deepsup.dft.evalcli.DftCli import cli
from deepsup.dft.utils.ArtifactFile import ArtifactFile, sha256_file

import logging

logging.basicConfig(level=logging.INFO)

GEN_ARGS = ["gen-data", "--task", "copy", "--vocab-size", "32", "--max-seq-len", "16", "--query-len", "1:3", "--train", "12", "--dev", "2", "--test", "4", "--seed", "2"]

CONFIG = """
[model]
n_layers = 3
hidden_size = 8
n_heads = 2
vocab_size = 32
max_seq_len = 16
mlp_ratio = 2
init_seed = 1

[data]
train_path = copy.jsonl

[method]
method = dft

[supervision]
lc_mode = logits
et_mode = logits
layer_i = 1
layer_j = 2

[optimizer]
learning_rate = 1e-2

[run]
batch_size = 4
epochs = 1
max_steps = 2
seed = 4
checkpoint_every = 1
"""


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset(runner, tmp_path):  # pylint: disable=redefined-outer-name
    path = str(tmp_path / "copy.jsonl")
    result = runner.invoke(cli, GEN_ARGS + ["--out", path])
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def run_dir(runner, dataset, tmp_path):  # pylint: disable=redefined-outer-name,unused-argument
    cfg = tmp_path / "dft.cfg"
    cfg.write_text(CONFIG, encoding="utf-8")
    out = str(tmp_path / "run")
    result = runner.invoke(cli, ["train", "--config", str(cfg), "--run-dir", out])
    assert result.exit_code == 0, result.output
    return out


def test_gen_data_is_reproducible(runner, dataset, tmp_path):  # pylint: disable=redefined-outer-name
    other = str(tmp_path / "copy-again.jsonl")
    result = runner.invoke(cli, GEN_ARGS + ["--out", other])
    assert result.exit_code == 0
    assert result.output.strip() == "%s %s" % (other, sha256_file(dataset))
    with open(dataset, "rb") as a, open(other, "rb") as b:
        assert a.read() == b.read()


def test_train_writes_run(run_dir):  # pylint: disable=redefined-outer-name
    manifest = ArtifactFile(os.path.join(run_dir, "manifest.json")).readJson()
    assert manifest["label"] == "dft[lc=logits@1,et=logits@2]"
    assert manifest["steps"] == 2
    assert os.path.exists(os.path.join(run_dir, "checkpoints", "step-000001.ckpt"))
    assert os.path.exists(os.path.join(run_dir, "train.cfg"))
    assert len(ArtifactFile(os.path.join(run_dir, "metrics.jsonl")).readJsonLines()) == 2


def test_resume_gives_same_final_state(runner, run_dir, tmp_path):  # pylint: disable=redefined-outer-name
    first = ArtifactFile(os.path.join(run_dir, "manifest.json")).readJson()["final_param_hash"]
    out = str(tmp_path / "resumed")
    ckpt = os.path.join(run_dir, "checkpoints", "step-000001.ckpt")
    result = runner.invoke(cli, ["train", "--config", str(tmp_path / "dft.cfg"), "--run-dir", out, "--resume", ckpt])
    assert result.exit_code == 0, result.output
    assert result.output.strip().endswith(first)


def test_analysis_commands(runner, run_dir):  # pylint: disable=redefined-outer-name
    result = runner.invoke(cli, ["evaluate", "--run", run_dir])
    assert result.exit_code == 0, result.output
    assert "exact_match" in result.output
    records = ArtifactFile(os.path.join(run_dir, "report.jsonl")).readJsonLines()
    assert records[0]["method"] == "dft[lc=logits@1,et=logits@2]"
    assert records[0]["lens_i"] == 1 and records[0]["lens_j"] == 2
    assert records[0]["checkpoint_sha256"] == sha256_file(os.path.join(run_dir, "checkpoints", "final.ckpt"))

    result = runner.invoke(cli, ["profile-entropy", "--run", run_dir])
    assert result.exit_code == 0, result.output
    assert "suggested i=" in result.output
    assert os.path.exists(os.path.join(run_dir, "entropy.svg"))
    assert os.path.exists(os.path.join(run_dir, "entropy-heatmap.csv"))

    result = runner.invoke(cli, ["align", "--run", run_dir])
    assert result.exit_code == 0, result.output
    assert result.output.count("cosine") == 4

    result = runner.invoke(cli, ["project", "--run", run_dir])
    assert result.exit_code == 0, result.output
    assert "projected 8 vectors at layer 1" in result.output

    out = os.path.join(run_dir, "entropy-again.svg")
    result = runner.invoke(cli, ["plot", "--kind", "entropy", "--records", os.path.join(run_dir, "entropy.jsonl"), "--out", out])
    assert result.exit_code == 0, result.output
    assert sha256_file(out) == sha256_file(os.path.join(run_dir, "entropy.svg"))


def test_ablate(runner, dataset, tmp_path):  # pylint: disable=redefined-outer-name,unused-argument
    cfg = tmp_path / "base.cfg"
    cfg.write_text(CONFIG.replace("method = dft", "method = tft").replace("checkpoint_every = 1", "checkpoint_every = 0"), encoding="utf-8")
    out = str(tmp_path / "ablation")
    result = runner.invoke(cli, ["ablate", "--config", str(cfg), "--layer-i", "1", "--layer-j", "2", "--sweep", "2,3", "--run-dir", out])
    assert result.exit_code == 0, result.output
    assert "English-thinking layer sweep" in result.output
    svg = str(tmp_path / "sweep.svg")
    result = runner.invoke(cli, ["plot", "--kind", "sweep", "--records", os.path.join(out, "report.jsonl"), "--out", svg])
    assert result.exit_code == 0, result.output
    assert os.path.exists(svg)


def test_errors_are_reported_on_one_line(runner, run_dir, tmp_path):  # pylint: disable=redefined-outer-name
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"x_tgt": [5, 2], "x_en": [5, 2]\n', encoding="utf-8")
    ckpt = os.path.join(run_dir, "checkpoints", "final.ckpt")
    result = runner.invoke(cli, ["evaluate", "--checkpoint", ckpt, "--data", str(bad), "--out-dir", str(tmp_path)])
    assert result.exit_code == 1
    assert "error DatasetParseError" in result.output

    result = runner.invoke(cli, ["evaluate", "--checkpoint", ckpt])
    assert result.exit_code == 1
    assert "error ConfigError" in result.output

    cfg = tmp_path / "no-run-dir.cfg"
    cfg.write_text(CONFIG, encoding="utf-8")
    result = runner.invoke(cli, ["train", "--config", str(cfg)])
    assert result.exit_code == 1
    assert "error ConfigError" in result.output

    result = runner.invoke(cli, ["gen-data", "--bogus", "1", "--out", str(tmp_path / "x.jsonl")])
    assert result.exit_code == 2
    assert result.output.strip().count("\n") == 0
    assert result.output.startswith("error UsageError: ")
    assert "--bogus" in result.output

    result = runner.invoke(cli, ["gen-data", "--query-len", "a:b", "--out", str(tmp_path / "x.jsonl")])
    assert result.exit_code == 2
    assert result.output.strip().count("\n") == 0
    assert result.output.startswith("error UsageError: ")
