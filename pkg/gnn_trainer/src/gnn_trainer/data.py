"""Reading graph-sample JSONL files and batching them for torch.

The input format is one JSON object per line with fields
``schema_version`` (must be 1), ``node_features`` (n x 4),
``edge_index`` (directed pairs), ``edge_features`` (3 or 4 wide),
``global_features`` (2 wide), the regression target ``s_vn`` and the
``half_mi`` baseline.  Prediction output is likewise one JSON object per
line with ``s_vn``, ``s_pred`` and optional ``samples``/``baseline``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import torch

SCHEMA_VERSION = 1


class DataError(ValueError):
    """Malformed or schema-incompatible input file."""


@dataclass
class GraphRecord:
    node_features: torch.Tensor  # (n_nodes, 4) float32
    edge_index: torch.Tensor  # (2, n_edges) int64
    edge_features: torch.Tensor  # (n_edges, e_dim) float32
    global_features: torch.Tensor  # (2,) float32
    s_vn: float
    half_mi: float
    n_rungs: int


def _record_from_dict(d: dict, lineno: int) -> GraphRecord:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"line {lineno}: unsupported schema version {d.get('schema_version')!r}"
        )
    try:
        nodes = torch.tensor(d["node_features"], dtype=torch.float32)
        edges = torch.tensor(d["edge_index"], dtype=torch.int64).t().reshape(2, -1)
        edge_feats = torch.tensor(d["edge_features"], dtype=torch.float32)
        global_feats = torch.tensor(d["global_features"], dtype=torch.float32)
        return GraphRecord(
            node_features=nodes,
            edge_index=edges,
            edge_features=edge_feats,
            global_features=global_feats,
            s_vn=float(d["s_vn"]),
            half_mi=float(d["half_mi"]),
            n_rungs=int(d["n_rungs"]),
        )
    except (KeyError, TypeError) as exc:
        raise DataError(f"line {lineno}: {exc!r}") from exc


def load_samples(path) -> list[GraphRecord]:
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {lineno}: malformed JSON ({exc.msg})") from exc
            records.append(_record_from_dict(d, lineno))
    return records


class GraphDataset(torch.utils.data.Dataset):
    def __init__(self, records: list[GraphRecord]):
        if not records:
            raise DataError("empty dataset")
        e_dims = {int(r.edge_features.shape[1]) for r in records}
        if len(e_dims) != 1:
            raise DataError(f"inconsistent edge feature widths {sorted(e_dims)}")
        self.records = records
        self.edge_dim = e_dims.pop()

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]


@dataclass
class Batch:
    """Graphs concatenated into one disjoint union.

    ``node_graph`` maps each node to its graph index; edge indices are
    offset so they address the concatenated node table.
    """

    node_features: torch.Tensor
    edge_index: torch.Tensor
    edge_features: torch.Tensor
    global_features: torch.Tensor  # (n_graphs, 2)
    node_graph: torch.Tensor  # (n_nodes,) int64
    targets: torch.Tensor  # (n_graphs,)
    baselines: torch.Tensor  # (n_graphs,) half_mi
    n_graphs: int


def collate(records: list[GraphRecord]) -> Batch:
    nodes, edges, edge_feats, node_graph = [], [], [], []
    offset = 0
    for g, rec in enumerate(records):
        n = rec.node_features.shape[0]
        nodes.append(rec.node_features)
        edges.append(rec.edge_index + offset)
        edge_feats.append(rec.edge_features)
        node_graph.append(torch.full((n,), g, dtype=torch.int64))
        offset += n
    return Batch(
        node_features=torch.cat(nodes),
        edge_index=torch.cat(edges, dim=1),
        edge_features=torch.cat(edge_feats),
        global_features=torch.stack([r.global_features for r in records]),
        node_graph=torch.cat(node_graph),
        targets=torch.tensor([r.s_vn for r in records], dtype=torch.float32),
        baselines=torch.tensor([r.half_mi for r in records], dtype=torch.float32),
        n_graphs=len(records),
    )


def split_train_validation(records, validation_fraction=0.1, seed=0):
    """Deterministic 90/10-style split by shuffled record index."""
    if validation_fraction <= 0:
        return list(records), []
    order = np.random.default_rng(seed).permutation(len(records))
    n_val = max(1, int(round(validation_fraction * len(records))))
    val_idx = set(order[:n_val].tolist())
    train = [r for i, r in enumerate(records) if i not in val_idx]
    val = [r for i, r in enumerate(records) if i in val_idx]
    return train, val


def write_prediction_file(path, truths, predictions, samples=None, baselines=None):
    truths = np.asarray(truths, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    with open(path, "w") as fh:
        for i in range(len(truths)):
            rec = {"s_vn": float(truths[i]), "s_pred": float(predictions[i])}
            if samples is not None:
                rec["samples"] = [float(x) for x in samples[i]]
            if baselines is not None:
                rec["baseline"] = float(baselines[i])
            fh.write(json.dumps(rec) + "\n")
