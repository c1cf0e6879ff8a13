"""Graph neural network trainer for entanglement-entropy regression.

Consumes graph-sample JSONL files (one JSON object per line, schema
version 1) and writes prediction JSONL files; it shares no code with the
dataset engine, only these file formats.
"""

from .data import GraphDataset, GraphRecord, collate, load_samples, write_prediction_file
from .model import EntropyGNN, ModelConfig
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

__version__ = "0.1.0"

__all__ = [
    "EntropyGNN",
    "FineTuneConfig",
    "GraphDataset",
    "GraphRecord",
    "ModelConfig",
    "TrainConfig",
    "collate",
    "fine_tune",
    "load_checkpoint",
    "load_samples",
    "mc_dropout_predict",
    "predict",
    "save_checkpoint",
    "train",
    "write_prediction_file",
]
