"""Training, fine-tuning, prediction, and MC-dropout inference."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .data import Batch, GraphRecord, collate, split_train_validation
from .model import EntropyGNN, ModelConfig


@dataclass
class TrainConfig:
    epochs: int = 500
    lr: float = 1.5e-4
    weight_decay: float = 1e-4
    grad_clip: float = 1.0
    # Cosine annealing with warm restarts: first cycle 50 epochs, each
    # subsequent cycle twice as long (restarts at epochs 50, 150, 350).
    restart_period: int = 50
    restart_mult: int = 2
    min_lr: float = 1e-6
    batch_size: int = 256
    validation_fraction: float = 0.1
    split_seed: int = 0
    seed: int = 0


@dataclass
class FineTuneConfig:
    epochs: int = 200
    lr: float = 5e-5
    weight_decay: float = 1.5e-4
    # Optional cap on how many records to use (first n after shuffle).
    dataset_size: int | None = None
    grad_clip: float = 1.0
    batch_size: int = 256
    validation_fraction: float = 0.1
    split_seed: int = 0
    seed: int = 0


def log_cosh_loss(predictions: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    d = predictions - targets
    a = torch.abs(d)
    return torch.mean(a + torch.log1p(torch.exp(-2.0 * a)) - math.log(2.0))


def _batches(records, batch_size, generator):
    order = torch.randperm(len(records), generator=generator).tolist()
    for start in range(0, len(order), batch_size):
        yield collate([records[i] for i in order[start : start + batch_size]])


@torch.no_grad()
def predict(model: EntropyGNN, records: list[GraphRecord], batch_size=256) -> np.ndarray:
    model.eval()
    outs = []
    for start in range(0, len(records), batch_size):
        outs.append(model(collate(records[start : start + batch_size])).numpy())
    return np.concatenate(outs)


def _mae(model, records, batch_size):
    preds = predict(model, records, batch_size)
    truths = np.array([r.s_vn for r in records])
    return float(np.mean(np.abs(preds - truths)))


def _run_epochs(model, records, *, epochs, lr, weight_decay, grad_clip, batch_size,
                validation_fraction, split_seed, seed, scheduler_config=None,
                progress=None):
    train_recs, val_recs = split_train_validation(
        records, validation_fraction, split_seed
    )
    if not train_recs:
        raise ValueError("no training records after validation split")
    optimizer = torch.optim.AdamW(model.parameters(), lr=lr, weight_decay=weight_decay)
    scheduler = None
    if scheduler_config is not None:
        scheduler = torch.optim.lr_scheduler.CosineAnnealingWarmRestarts(
            optimizer,
            T_0=scheduler_config["restart_period"],
            T_mult=scheduler_config["restart_mult"],
            eta_min=scheduler_config["min_lr"],
        )
    generator = torch.Generator().manual_seed(seed)
    history = []
    for epoch in range(epochs):
        model.train()
        losses = []
        for batch in _batches(train_recs, batch_size, generator):
            optimizer.zero_grad()
            loss = log_cosh_loss(model(batch), batch.targets)
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch} "
                    f"(lr {optimizer.param_groups[0]['lr']:.2e}, "
                    f"{len(train_recs)} training records)"
                )
            loss.backward()
            nn.utils.clip_grad_norm_(model.parameters(), grad_clip)
            optimizer.step()
            losses.append(loss.item())
        entry = {
            "epoch": epoch,
            "lr": float(optimizer.param_groups[0]["lr"]),
            "train_loss": float(np.mean(losses)),
            "train_mae": _mae(model, train_recs, batch_size),
            "val_mae": _mae(model, val_recs, batch_size) if val_recs else float("nan"),
        }
        history.append(entry)
        if progress is not None:
            progress(entry)
        if scheduler is not None:
            scheduler.step()
    return history


def train(records, model_config: ModelConfig, config: TrainConfig, progress=None):
    torch.manual_seed(config.seed)
    model = EntropyGNN(model_config)
    history = _run_epochs(
        model, records,
        epochs=config.epochs, lr=config.lr, weight_decay=config.weight_decay,
        grad_clip=config.grad_clip, batch_size=config.batch_size,
        validation_fraction=config.validation_fraction,
        split_seed=config.split_seed, seed=config.seed,
        scheduler_config={
            "restart_period": config.restart_period,
            "restart_mult": config.restart_mult,
            "min_lr": config.min_lr,
        },
        progress=progress,
    )
    return model, history


def fine_tune(model: EntropyGNN, records, config: FineTuneConfig, progress=None):
    if config.dataset_size is not None:
        order = np.random.default_rng(config.seed).permutation(len(records))
        records = [records[i] for i in order[: config.dataset_size]]
    if config.epochs == 0:
        return model, []
    torch.manual_seed(config.seed)
    history = _run_epochs(
        model, records,
        epochs=config.epochs, lr=config.lr, weight_decay=config.weight_decay,
        grad_clip=config.grad_clip, batch_size=config.batch_size,
        validation_fraction=config.validation_fraction,
        split_seed=config.split_seed, seed=config.seed,
        scheduler_config=None,
        progress=progress,
    )
    return model, history


def mc_dropout_predict(model: EntropyGNN, records, k=50, seed=0, batch_size=256):
    """k stochastic forward passes per graph with dropout active (batch
    normalization stays in inference mode).  Returns (samples, means)
    with samples shaped (n_records, k)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    model.eval()
    for module in model.modules():
        if isinstance(module, nn.Dropout):
            module.train()
    torch.manual_seed(seed)
    samples = np.empty((len(records), k))
    with torch.no_grad():
        for pass_idx in range(k):
            outs = []
            for start in range(0, len(records), batch_size):
                outs.append(model(collate(records[start : start + batch_size])).numpy())
            samples[:, pass_idx] = np.concatenate(outs)
    model.eval()
    return samples, samples.mean(axis=1)


def save_checkpoint(path, model: EntropyGNN, extra=None):
    payload = {
        "model_config": model.config.to_dict(),
        "state_dict": model.state_dict(),
        "extra": extra or {},
    }
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            torch.save(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path) -> EntropyGNN:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    model = EntropyGNN(ModelConfig.from_dict(payload["model_config"]))
    model.load_state_dict(payload["state_dict"])
    return model
