"""Command-line interface: ``gnn train | finetune | predict | mcdropout``.

Exit codes: 0 success, 1 usage error, 2 malformed or missing data.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .data import DataError, load_samples, split_train_validation, write_prediction_file
from .model import ModelConfig
from .training import (
    FineTuneConfig,
    TrainConfig,
    fine_tune,
    load_checkpoint,
    mc_dropout_predict,
    predict,
    save_checkpoint,
    train,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_model_flags(p):
    p.add_argument("--hidden-dim", type=int, default=None)
    p.add_argument("--mp-layers", type=int, default=None)
    p.add_argument("--heads", type=int, default=None)
    p.add_argument("--head-dim", type=int, default=None)
    p.add_argument("--dropout", type=float, default=None)
    p.add_argument("--layer-mode", choices=["alternate", "even", "odd"], default=None)
    p.add_argument("--readout", choices=["set2set", "max", "mean", "attention"],
                   default=None)


def _model_config(args, edge_dim):
    overrides = {
        key: getattr(args, key)
        for key in ("hidden_dim", "mp_layers", "heads", "head_dim", "dropout",
                    "layer_mode", "readout")
        if getattr(args, key) is not None
    }
    if "hidden_dim" in overrides and "head_dim" not in overrides:
        heads = overrides.get("heads", 8)
        if overrides["hidden_dim"] % heads:
            raise SystemExit(EXIT_USAGE)
        overrides["head_dim"] = overrides["hidden_dim"] // heads
    return ModelConfig(edge_dim=edge_dim, **overrides)


def build_parser():
    parser = _Parser(prog="gnn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a graph-sample file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--lr", type=float, default=TrainConfig.lr)
    p.add_argument("--weight-decay", type=float, default=TrainConfig.weight_decay)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--validation-fraction", type=float,
                   default=TrainConfig.validation_fraction)
    p.add_argument("--seed", type=int, default=0)
    _add_model_flags(p)

    p = sub.add_parser("finetune", help="continue training from a checkpoint")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=FineTuneConfig.epochs)
    p.add_argument("--lr", type=float, default=FineTuneConfig.lr)
    p.add_argument("--weight-decay", type=float, default=FineTuneConfig.weight_decay)
    p.add_argument("--dataset-size", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=FineTuneConfig.batch_size)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("predict", help="write deterministic predictions")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mcdropout", help="write dropout-sampled predictions")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_train(args):
    records = load_samples(args.inp)
    edge_dim = records[0].edge_features.shape[1]
    model_config = _model_config(args, edge_dim)
    config = TrainConfig(
        epochs=args.epochs, lr=args.lr, weight_decay=args.weight_decay,
        batch_size=args.batch_size, validation_fraction=args.validation_fraction,
        seed=args.seed, split_seed=args.seed,
    )
    model, history = train(
        records, model_config, config,
        progress=lambda e: print(
            f"epoch {e['epoch']:4d}  lr {e['lr']:.2e}  "
            f"loss {e['train_loss']:.5f}  val MAE {e['val_mae']:.5f}",
            file=sys.stderr,
        ),
    )
    save_checkpoint(args.out, model, extra={
        "history": history, "train_config": dataclasses.asdict(config),
    })
    print(json.dumps({
        "n_records": len(records),
        "final_train_loss": history[-1]["train_loss"],
        "final_val_mae": history[-1]["val_mae"],
    }))
    return EXIT_OK


def _cmd_finetune(args):
    records = load_samples(args.inp)
    model = load_checkpoint(args.checkpoint)
    config = FineTuneConfig(
        epochs=args.epochs, lr=args.lr, weight_decay=args.weight_decay,
        dataset_size=args.dataset_size, batch_size=args.batch_size,
        seed=args.seed, split_seed=args.seed,
    )
    model, history = fine_tune(model, records, config)
    save_checkpoint(args.out, model, extra={
        "history": history, "fine_tune_config": dataclasses.asdict(config),
    })
    print(json.dumps({
        "n_records": len(records),
        "final_val_mae": history[-1]["val_mae"] if history else None,
    }))
    return EXIT_OK


def _cmd_predict(args):
    records = load_samples(args.inp)
    model = load_checkpoint(args.checkpoint)
    preds = predict(model, records)
    truths = [r.s_vn for r in records]
    baselines = [r.half_mi for r in records]
    write_prediction_file(args.out, truths, preds, baselines=baselines)
    print(json.dumps({
        "n_records": len(records),
        "mae": float(np.mean(np.abs(preds - np.array(truths)))),
    }))
    return EXIT_OK


def _cmd_mcdropout(args):
    records = load_samples(args.inp)
    model = load_checkpoint(args.checkpoint)
    samples, means = mc_dropout_predict(model, records, k=args.k, seed=args.seed)
    truths = [r.s_vn for r in records]
    baselines = [r.half_mi for r in records]
    write_prediction_file(args.out, truths, means, samples=samples, baselines=baselines)
    print(json.dumps({"n_records": len(records), "k": args.k}))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    handlers = {
        "train": _cmd_train,
        "finetune": _cmd_finetune,
        "predict": _cmd_predict,
        "mcdropout": _cmd_mcdropout,
    }
    try:
        return handlers[args.command](args)
    except (DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
