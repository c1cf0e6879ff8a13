"""End-to-end acceptance suite for the trainer.

Each test prints one PASS/FAIL line.  The dataset engine is used only
through its command line and file formats (see conftest).
"""

import dataclasses
import json
import subprocess
import sys

import numpy as np
import torch

from gnn_trainer import (
    EntropyGNN,
    FineTuneConfig,
    ModelConfig,
    TrainConfig,
    collate,
    fine_tune,
    load_checkpoint,
    mc_dropout_predict,
    predict,
    save_checkpoint,
    train,
    write_prediction_file,
)
from gnn_trainer.training import log_cosh_loss


PRIMARY_CLI = [sys.executable, "-m", "rydberg_entropy.cli"]


def _report(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'} {name}{': ' + detail if detail else ''}")
    assert ok, f"{name}: {detail}"


def test_beats_half_mi_baseline(trained_model, r123_split):
    model, _ = trained_model
    _, held = r123_split
    preds = predict(model, held)
    truths = np.array([r.s_vn for r in held])
    baselines = np.array([r.half_mi for r in held])
    model_mae = float(np.mean(np.abs(preds - truths)))
    baseline_mae = float(np.mean(np.abs(baselines - truths)))
    _report(
        f"model beats half-MI baseline on {len(held)} held-out samples",
        model_mae < baseline_mae,
        f"model MAE {model_mae:.4f} vs baseline {baseline_mae:.4f}",
    )


def test_overfits_32_samples(r123_split):
    train_recs, _ = r123_split
    config = ModelConfig(
        hidden_dim=32, heads=4, head_dim=8, projection_dim=64,
        dropout=0.0, edge_dim=3,
    )
    model, history = train(
        train_recs[:32], config,
        TrainConfig(epochs=500, batch_size=32, seed=0, validation_fraction=0.0),
    )
    best = min(h["train_mae"] for h in history)
    _report(
        "32-sample overfit reaches training MAE < 1e-2 within 500 epochs",
        best < 1e-2,
        f"best training MAE {best:.2e}",
    )


def test_fine_tune_improves_out_of_range_rungs(trained_model, r4_records):
    frozen, _ = trained_model
    tune_recs, eval_recs = r4_records[:1000], r4_records[1000:]
    truths = np.array([r.s_vn for r in eval_recs])
    frozen_mae = float(np.mean(np.abs(predict(frozen, eval_recs) - truths)))

    tuned = EntropyGNN(frozen.config)
    tuned.load_state_dict(frozen.state_dict())
    tuned, _ = fine_tune(tuned, tune_recs, FineTuneConfig(epochs=60, seed=0))
    tuned_mae = float(np.mean(np.abs(predict(tuned, eval_recs) - truths)))
    _report(
        "fine-tuning on 1k out-of-range samples cuts their MAE by >= 20%",
        tuned_mae <= 0.8 * frozen_mae,
        f"frozen {frozen_mae:.4f} -> tuned {tuned_mae:.4f}",
    )


def test_mc_dropout_calibrates_through_analysis_cli(trained_model, r123_split, tmp_path):
    model, _ = trained_model
    _, held = r123_split
    samples, means = mc_dropout_predict(model, held, k=50, seed=7)
    pred_path = tmp_path / "mc_predictions.jsonl"
    write_prediction_file(
        pred_path,
        [r.s_vn for r in held], means, samples=samples,
        baselines=[r.half_mi for r in held],
    )
    cal_path = tmp_path / "calibration.json"
    result = subprocess.run(
        PRIMARY_CLI + ["calibrate", "--in", str(pred_path), "--out", str(cal_path)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0, result.stderr
    cal = json.loads(cal_path.read_text())
    _report(
        "50-sample dropout predictions calibrate to 95% coverage",
        cal["converged"] and abs(cal["coverage"] - 0.95) <= 0.02,
        f"T={cal['temperature']:.3f}, coverage {cal['coverage']:.4f}",
    )


def test_invariance_and_schedule_suite(trained_model, r123_split):
    model, history = trained_model
    train_recs, held = r123_split

    preds = predict(model, held)
    nonneg = bool((preds >= 0).all())

    rec = next(r for r in held if r.n_rungs == 3)
    model.eval()
    rng = torch.Generator().manual_seed(0)
    with torch.no_grad():
        base = float(model(collate([rec])))
        worst = 0.0
        for _ in range(10):
            perm = torch.randperm(rec.node_features.shape[0], generator=rng)
            inv = torch.argsort(perm)
            permuted = dataclasses.replace(
                rec, node_features=rec.node_features[perm],
                edge_index=inv[rec.edge_index],
            )
            worst = max(worst, abs(float(model(collate([permuted]))) - base))
    invariant = worst <= 1e-5

    torch.manual_seed(0)
    fresh = EntropyGNN(model.config)
    fresh.train()
    # Mixed rung counts so every attention pathway carries gradient.
    batch = collate(train_recs[::157][:128])
    log_cosh_loss(fresh(batch), batch.targets).backward()
    params = list(fresh.parameters())
    flow = sum(
        1 for p in params if p.grad is not None and float(p.grad.abs().max()) > 0
    ) / len(params)

    lr0 = history[0]["lr"]
    _report(
        "invariance suite (nonnegative, permutation, gradient flow, schedule)",
        nonneg and invariant and flow >= 0.95 and abs(lr0 - 1.5e-4) < 1e-12,
        f"perm diff {worst:.1e}, grad flow {flow:.2%}, initial lr {lr0:.1e}",
    )
