"""Graph featurization and the line-record interchange format.

Node features (fixed order): x, y, excitation probability, subsystem
mask.  Edge features: distance / sqrt(n_sites), undirected line angle in
[0, pi), connected correlator C_ij, and optionally the fourth
cross-moment M_ij.  Global features: n_A / n_sites, n_B / n_sites.

Records are serialized one JSON object per line with a schema_version
field; floats round-trip exactly through the default JSON repr.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ParseError, SchemaVersionError
from .lattice import Bipartition, Lattice

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FeaturizeOptions:
    """Knobs for graph construction."""

    cutoff: float = math.inf
    fourth_moment: np.ndarray | None = None


@dataclass
class GraphSample:
    """One featurized (system, bipartition) record with its entropy target."""

    n_rungs: int
    delta_over_omega: float
    rb_over_a: float
    mask: list[bool]
    node_features: list[list[float]]
    edge_index: list[list[int]]
    edge_features: list[list[float]]
    global_features: list[float]
    s_vn: float = float("nan")
    mi: float = float("nan")
    half_mi: float = float("nan")
    shots: int | None = None
    noise: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    degenerate: bool = False
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": self.schema_version,
                "n_rungs": self.n_rungs,
                "delta_over_omega": self.delta_over_omega,
                "rb_over_a": self.rb_over_a,
                "mask": [int(m) for m in self.mask],
                "node_features": self.node_features,
                "edge_index": self.edge_index,
                "edge_features": self.edge_features,
                "global_features": self.global_features,
                "s_vn": self.s_vn,
                "mi": self.mi,
                "half_mi": self.half_mi,
                "shots": self.shots,
                "noise": self.noise,
                "seeds": self.seeds,
                "degenerate": self.degenerate,
            }
        )

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSample":
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"record declares schema_version {version!r}, expected {SCHEMA_VERSION}"
            )
        return cls(
            n_rungs=d["n_rungs"],
            delta_over_omega=d["delta_over_omega"],
            rb_over_a=d["rb_over_a"],
            mask=[bool(m) for m in d["mask"]],
            node_features=d["node_features"],
            edge_index=d["edge_index"],
            edge_features=d["edge_features"],
            global_features=d["global_features"],
            s_vn=d["s_vn"],
            mi=d["mi"],
            half_mi=d["half_mi"],
            shots=d["shots"],
            noise=d["noise"],
            seeds=d["seeds"],
            degenerate=d["degenerate"],
        )


def edge_list(lattice: Lattice, cutoff: float = math.inf) -> list[tuple[int, int]]:
    """All ordered site pairs within the Euclidean cutoff (inf = fully connected)."""
    if not cutoff > 0:
        raise InvalidArgumentError("cutoff must be positive")
    n = lattice.n_sites
    pairs = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if lattice.distance(i, j) <= cutoff + 1e-12:
                pairs.append((i, j))
    return pairs


def _edge_angle(dx: float, dy: float) -> float:
    """Undirected line angle with the horizontal axis, folded to [0, pi)."""
    angle = math.atan2(dy, dx) % math.pi
    if angle >= math.pi - 1e-12:
        angle = 0.0
    return angle


def featurize(
    lattice: Lattice,
    bipartition: Bipartition,
    p: np.ndarray,
    c: np.ndarray,
    options: FeaturizeOptions | None = None,
) -> GraphSample:
    """Assemble the graph record from geometry, probabilities, and correlations.

    Both directions of every included pair are emitted with identical
    features.  Metadata fields (targets, params, provenance) start empty
    and are filled by the caller.
    """
    options = options or FeaturizeOptions()
    n = lattice.n_sites
    if len(p) != n or np.shape(c) != (n, n):
        raise InvalidArgumentError("p and c must be dimensioned to the lattice")
    m4 = options.fourth_moment
    if m4 is not None and np.shape(m4) != (n, n):
        raise InvalidArgumentError("fourth_moment must be an n_sites square matrix")
    pos = lattice.position_array()
    nodes = [
        [float(pos[i, 0]), float(pos[i, 1]), float(p[i]), float(bipartition.mask[i])]
        for i in range(n)
    ]
    norm = math.sqrt(n)
    edge_index = []
    edge_features = []
    for i, j in edge_list(lattice, options.cutoff):
        dx = pos[j, 0] - pos[i, 0]
        dy = pos[j, 1] - pos[i, 1]
        feats = [
            math.hypot(dx, dy) / norm,
            _edge_angle(dx, dy),
            float(c[i, j]),
        ]
        if m4 is not None:
            feats.append(float(m4[i, j]))
        edge_index.append([i, j])
        edge_features.append(feats)
    return GraphSample(
        n_rungs=lattice.n_rungs,
        delta_over_omega=float("nan"),
        rb_over_a=float("nan"),
        mask=list(bipartition.mask),
        node_features=nodes,
        edge_index=edge_index,
        edge_features=edge_features,
        global_features=[bipartition.n_a / n, bipartition.n_b / n],
    )


def write_samples(path, samples) -> None:
    with open(path, "w") as fh:
        for sample in samples:
            fh.write(sample.to_json() + "\n")


def read_samples(path):
    """Stream GraphSamples from a line-record file."""
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(
                    f"line {lineno}: malformed record ({exc.msg})", line_number=lineno
                ) from exc
            try:
                yield GraphSample.from_dict(d)
            except SchemaVersionError:
                raise
            except KeyError as exc:
                raise ParseError(
                    f"line {lineno}: missing field {exc.args[0]!r}", line_number=lineno
                ) from exc
