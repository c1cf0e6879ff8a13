import json

import numpy as np
import pytest

from gnn_trainer import load_samples
from gnn_trainer.cli import main


@pytest.fixture(scope="module")
def small_file(data_dir, tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "small.jsonl"
    with open(data_dir / "r123.jsonl") as src, open(path, "w") as dst:
        for _, line in zip(range(96), src):
            dst.write(line)
    assert len(load_samples(path)) == 96
    return path


@pytest.fixture(scope="module")
def checkpoint(small_file, tmp_path_factory):
    path = tmp_path_factory.mktemp("ckpt") / "model.ckpt"
    code = main([
        "train", "--in", str(small_file), "--out", str(path),
        "--epochs", "2", "--batch-size", "32",
        "--hidden-dim", "16", "--heads", "2", "--dropout", "0.1",
    ])
    assert code == 0
    return path


def test_usage_errors():
    assert main([]) == 1
    assert main(["train"]) == 1
    assert main(["no-such-command"]) == 1


def test_train_writes_checkpoint(checkpoint):
    assert checkpoint.exists()


def test_predict_writes_prediction_file(small_file, checkpoint, tmp_path, capsys):
    out = tmp_path / "preds.jsonl"
    assert main([
        "predict", "--in", str(small_file), "--checkpoint", str(checkpoint),
        "--out", str(out),
    ]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_records"] == 96
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 96
    assert set(lines[0]) == {"s_vn", "s_pred", "baseline"}
    assert all(l["s_pred"] >= 0 for l in lines)


def test_mcdropout_writes_samples(small_file, checkpoint, tmp_path, capsys):
    out = tmp_path / "mc.jsonl"
    assert main([
        "mcdropout", "--in", str(small_file), "--checkpoint", str(checkpoint),
        "--out", str(out), "--k", "4", "--seed", "1",
    ]) == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert all(len(l["samples"]) == 4 for l in lines)
    means = [np.mean(l["samples"]) for l in lines]
    np.testing.assert_allclose([l["s_pred"] for l in lines], means, atol=1e-7)


def test_finetune_from_checkpoint(small_file, checkpoint, tmp_path):
    out = tmp_path / "tuned.ckpt"
    assert main([
        "finetune", "--in", str(small_file), "--checkpoint", str(checkpoint),
        "--out", str(out), "--epochs", "1", "--batch-size", "32",
    ]) == 0
    assert out.exists()


def test_missing_input_is_data_error(checkpoint, tmp_path):
    assert main([
        "predict", "--in", str(tmp_path / "absent.jsonl"),
        "--checkpoint", str(checkpoint), "--out", str(tmp_path / "o.jsonl"),
    ]) == 2


def test_bad_schema_is_data_error(checkpoint, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"schema_version": 2}) + "\n")
    assert main([
        "predict", "--in", str(bad), "--checkpoint", str(checkpoint),
        "--out", str(tmp_path / "o.jsonl"),
    ]) == 2
