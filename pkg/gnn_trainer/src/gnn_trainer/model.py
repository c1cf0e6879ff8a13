"""Graph network for per-graph scalar regression.

Plain-torch implementation (no graph-library dependency): graphs are
batched as disjoint unions and neighborhood reductions are expressed
with ``index_add_``/``scatter_reduce_`` over the destination-node index.

Architecture: batch-normalized SiLU encoders for nodes and edges; a
stack of message-passing layers alternating between an isomorphism-style
convolution (sum aggregation with a deep internal transform) and an
edge-aware multi-head attention convolution with beta gating; residual
connections after every layer, a two-layer refinement after each
isomorphism layer, and per-layer edge-representation/edge-weight updates
(weights in [0, 1] via a sigmoid, multiplied into the edge features
before they enter either convolution).  Readout is a pair of
set-to-set aggregators whose concatenated output is projected down,
joined with a small global-feature branch, and mapped to a nonnegative
scalar through a multi-layer head with a softplus output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn

from .data import Batch


@dataclass
class ModelConfig:
    hidden_dim: int = 512
    mp_layers: int = 6
    heads: int = 8
    head_dim: int = 64
    dropout: float = 0.4
    set2set_steps: int = 4
    projection_dim: int = 1024
    global_layers: int = 3
    head_layers: int = 4
    edge_dim: int = 3
    edge_update_depth: int = 2
    # Refinement after the residual add (True) or before it (False).
    refine_after_residual: bool = True
    # Ablations: "alternate" (default), "even" (isomorphism only),
    # "odd" (attention only); readout in {"set2set", "max", "mean",
    # "attention"}.
    layer_mode: str = "alternate"
    readout: str = "set2set"

    def __post_init__(self):
        if self.heads * self.head_dim != self.hidden_dim:
            raise ValueError(
                f"heads*head_dim must equal hidden_dim "
                f"({self.heads}x{self.head_dim} != {self.hidden_dim})"
            )
        if self.layer_mode not in ("alternate", "even", "odd"):
            raise ValueError(f"unknown layer_mode {self.layer_mode!r}")
        if self.readout not in ("set2set", "max", "mean", "attention"):
            raise ValueError(f"unknown readout {self.readout!r}")

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def _mlp(dims, dropout=0.0, final_activation=True):
    layers = []
    for i in range(len(dims) - 1):
        layers.append(nn.Linear(dims[i], dims[i + 1]))
        last = i == len(dims) - 2
        if not last or final_activation:
            layers.append(nn.SiLU())
            if dropout > 0:
                layers.append(nn.Dropout(dropout))
    return nn.Sequential(*layers)


def _scatter_sum(src, index, n_out):
    out = src.new_zeros((n_out,) + src.shape[1:])
    out.index_add_(0, index, src)
    return out


def _segment_softmax(scores, index, n_out):
    """Softmax of ``scores`` within groups given by ``index``."""
    maxes = scores.new_full((n_out,) + scores.shape[1:], float("-inf"))
    maxes.scatter_reduce_(
        0, index.view(-1, *([1] * (scores.dim() - 1))).expand_as(scores),
        scores, reduce="amax", include_self=True,
    )
    shifted = torch.exp(scores - maxes[index])
    denom = _scatter_sum(shifted, index, n_out)
    return shifted / (denom[index] + 1e-16)


class IsomorphismConv(nn.Module):
    """Sum aggregation of edge-conditioned neighbor messages followed by
    a three-layer transform of ``(1 + eps) * x + sum(messages)``."""

    def __init__(self, hidden, dropout):
        super().__init__()
        self.eps = nn.Parameter(torch.zeros(()))
        self.transform = _mlp([hidden, hidden, hidden, hidden], dropout, final_activation=False)

    def forward(self, x, edge_index, edge_repr):
        src, dst = edge_index
        messages = nn.functional.silu(x[src] + edge_repr)
        agg = _scatter_sum(messages, dst, x.shape[0])
        return self.transform((1.0 + self.eps) * x + agg)


class AttentionConv(nn.Module):
    """Edge-aware multi-head attention with a sigmoid beta gate mixing
    the attended message with the incoming representation."""

    def __init__(self, hidden, heads, head_dim, dropout):
        super().__init__()
        self.heads = heads
        self.head_dim = head_dim
        self.q = nn.Linear(hidden, hidden)
        self.k = nn.Linear(hidden, hidden)
        self.v = nn.Linear(hidden, hidden)
        self.edge_k = nn.Linear(hidden, hidden)
        self.edge_v = nn.Linear(hidden, hidden)
        self.out = nn.Linear(hidden, hidden)
        self.beta = nn.Linear(3 * hidden, 1)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x, edge_index, edge_repr):
        src, dst = edge_index
        shape = (-1, self.heads, self.head_dim)
        q = self.q(x).view(shape)[dst]
        k = (self.k(x)[src] + self.edge_k(edge_repr)).view(shape)
        v = (self.v(x)[src] + self.edge_v(edge_repr)).view(shape)
        scores = (q * k).sum(-1) / self.head_dim**0.5  # (n_edges, heads)
        alpha = _segment_softmax(scores, dst, x.shape[0])
        attended = _scatter_sum(alpha.unsqueeze(-1) * v, dst, x.shape[0])
        attended = self.out(self.dropout(attended.reshape(x.shape[0], -1)))
        gate = torch.sigmoid(self.beta(torch.cat([x, attended, x - attended], dim=-1)))
        return gate * x + (1.0 - gate) * attended


class Set2Set(nn.Module):
    """LSTM-driven content-based attention pooling; output is twice the
    input width (query concatenated with the attended readout)."""

    def __init__(self, hidden, steps):
        super().__init__()
        self.hidden = hidden
        self.steps = steps
        self.lstm = nn.LSTM(2 * hidden, hidden)

    def forward(self, x, node_graph, n_graphs):
        q_star = x.new_zeros(n_graphs, 2 * self.hidden)
        state = (
            x.new_zeros(1, n_graphs, self.hidden),
            x.new_zeros(1, n_graphs, self.hidden),
        )
        for _ in range(self.steps):
            q, state = self.lstm(q_star.unsqueeze(0), state)
            q = q.squeeze(0)
            scores = (x * q[node_graph]).sum(-1)
            alpha = _segment_softmax(scores, node_graph, n_graphs)
            readout = _scatter_sum(alpha.unsqueeze(-1) * x, node_graph, n_graphs)
            q_star = torch.cat([q, readout], dim=-1)
        return q_star


class AttentionReadout(nn.Module):
    def __init__(self, hidden):
        super().__init__()
        self.gate = nn.Linear(hidden, 1)
        self.value = nn.Linear(hidden, hidden)

    def forward(self, x, node_graph, n_graphs):
        alpha = _segment_softmax(self.gate(x).squeeze(-1), node_graph, n_graphs)
        return _scatter_sum(alpha.unsqueeze(-1) * self.value(x), node_graph, n_graphs)


class EntropyGNN(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        h = config.hidden_dim
        d = config.dropout

        def encoder(in_dim):
            return nn.Sequential(
                nn.Linear(in_dim, h), nn.BatchNorm1d(h), nn.SiLU(),
                nn.Linear(h, h), nn.BatchNorm1d(h), nn.SiLU(),
            )

        self.node_encoder = encoder(4)
        self.edge_encoder = encoder(config.edge_dim)

        self.convs = nn.ModuleList()
        self.refinements = nn.ModuleList()
        self.edge_updates = nn.ModuleList()
        self.edge_weights = nn.ModuleList()
        self.dropout = nn.Dropout(d)
        for layer in range(config.mp_layers):
            if self._is_isomorphism_layer(layer):
                self.convs.append(IsomorphismConv(h, d))
                self.refinements.append(_mlp([h, h, h], d, final_activation=False))
            else:
                self.convs.append(AttentionConv(h, config.heads, config.head_dim, d))
                self.refinements.append(None)
            # The edge representation feeds the next layer's convolution;
            # after the final layer it is unused, so no update is built.
            if layer < config.mp_layers - 1:
                update_dims = [3 * h] + [h] * config.edge_update_depth
                self.edge_updates.append(_mlp(update_dims, final_activation=False))
            weight_dims = [h] * config.edge_update_depth + [1]
            self.edge_weights.append(_mlp(weight_dims, final_activation=False))

        if config.readout == "set2set":
            self.pool_a = Set2Set(h, config.set2set_steps)
            self.pool_b = Set2Set(h, config.set2set_steps)
            pooled = 4 * h
        elif config.readout == "attention":
            self.pool_a = AttentionReadout(h)
            pooled = h
        else:
            pooled = h
        self.projection = nn.Linear(pooled, config.projection_dim)

        global_dims = [2] + [h] * (config.global_layers - 1) + [h]
        self.global_branch = _mlp(global_dims, final_activation=True)

        head_in = config.projection_dim + h
        head_dims = [head_in] + [h] * (config.head_layers - 1) + [1]
        self.head = _mlp(head_dims, d, final_activation=False)

        self.apply(self._init)
        # Damp the last linear layer of every residual branch and of the
        # output head so the initial forward pass stays O(1) deep in the
        # stack instead of growing multiplicatively across layers.
        for conv in self.convs:
            if isinstance(conv, IsomorphismConv):
                self._damp(conv.transform, 0.1)
            else:
                self._damp(conv.out, 0.1)
        for refine in self.refinements:
            if refine is not None:
                self._damp(refine, 0.1)
        for update in self.edge_updates:
            self._damp(update, 0.1)
        self._damp(self.head, 0.01)

    def _is_isomorphism_layer(self, layer):
        if self.config.layer_mode == "even":
            return True
        if self.config.layer_mode == "odd":
            return False
        return layer % 2 == 0

    @staticmethod
    def _damp(module, factor):
        last = None
        for sub in module.modules():
            if isinstance(sub, nn.Linear):
                last = sub
        if last is not None:
            with torch.no_grad():
                last.weight.mul_(factor)

    @staticmethod
    def _init(module):
        if isinstance(module, nn.Linear):
            nn.init.kaiming_uniform_(module.weight, nonlinearity="relu")
            if module.bias is not None:
                nn.init.zeros_(module.bias)

    def forward(self, batch: Batch) -> torch.Tensor:
        x = self.node_encoder(batch.node_features)
        edge_repr = self.edge_encoder(batch.edge_features)
        src, dst = batch.edge_index

        for layer, conv in enumerate(self.convs):
            weight = torch.sigmoid(self.edge_weights[layer](edge_repr))
            weighted_edges = edge_repr * weight
            out = conv(x, batch.edge_index, weighted_edges)
            refine = self.refinements[layer]
            if refine is not None and not self.config.refine_after_residual:
                out = refine(out)
            x = x + self.dropout(out)
            if refine is not None and self.config.refine_after_residual:
                x = x + self.dropout(refine(x))
            if layer < len(self.edge_updates):
                edge_repr = edge_repr + self.edge_updates[layer](
                    torch.cat([edge_repr, x[src], x[dst]], dim=-1)
                )

        if self.config.readout == "set2set":
            pooled = torch.cat(
                [
                    self.pool_a(x, batch.node_graph, batch.n_graphs),
                    self.pool_b(x, batch.node_graph, batch.n_graphs),
                ],
                dim=-1,
            )
        elif self.config.readout == "attention":
            pooled = self.pool_a(x, batch.node_graph, batch.n_graphs)
        elif self.config.readout == "max":
            pooled = x.new_full((batch.n_graphs, x.shape[1]), float("-inf"))
            pooled.scatter_reduce_(
                0, batch.node_graph.unsqueeze(-1).expand_as(x), x,
                reduce="amax", include_self=True,
            )
        else:  # mean
            counts = _scatter_sum(torch.ones_like(batch.node_graph, dtype=x.dtype),
                                  batch.node_graph, batch.n_graphs)
            pooled = _scatter_sum(x, batch.node_graph, batch.n_graphs)
            pooled = pooled / counts.unsqueeze(-1)

        projected = self.dropout(nn.functional.silu(self.projection(pooled)))
        globs = self.global_branch(batch.global_features)
        out = self.head(torch.cat([projected, globs], dim=-1)).squeeze(-1)
        return nn.functional.softplus(out)
