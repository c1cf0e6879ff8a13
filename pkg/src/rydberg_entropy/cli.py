"""Command-line surface.

Subcommands: generate, sweep, featurize, sample, analyze, calibrate.
Exit codes: 0 success, 1 usage error, 2 data error, 3 excess sample
failures during generation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np
import yaml

from . import pipeline
from .errors import (
    ExcessFailureError,
    InvalidArgumentError,
    ParseError,
    SchemaVersionError,
)
from .features import FeaturizeOptions, featurize, read_samples, write_samples
from .lattice import Bipartition, build_ladder
from .metrics import calibrate_temperature, read_predictions, summarize
from .pipeline import (
    GenerationConfig,
    NoiseOptions,
    SweepConfig,
    generate_dataset,
    mi_bound_report,
    read_sweep,
    sweep_grid,
    write_sweep,
)
from .quantum_info import (
    basis_probabilities,
    classical_mutual_information,
    fourth_cross_moment,
    rydberg_probabilities,
    two_point_correlations,
)
from .sampler import apply_bitflip_noise, empirical_distribution, sample_bitstrings, write_shots
from .spectrum import SolverConfig, SystemParams, ground_state

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_FAILURES = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--bitflip-p", type=float, default=0.0)
    p.add_argument("--boundary-flip-p", type=float, default=0.0)
    p.add_argument("--partition", choices=["random", "symmetric"], default="random")
    p.add_argument("--cutoff", type=float, default=math.inf)
    p.add_argument("--fourth-moment", action="store_true")
    p.add_argument("--solver", choices=["auto", "dense", "lanczos"], default="auto")


def _solver(args) -> SolverConfig:
    force = None if args.solver == "auto" else args.solver
    return SolverConfig(force=force, seed=args.seed)


def _parse_rungs(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> _Parser:
    parser = _Parser(prog="rydberg-entropy")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a featurized dataset")
    _add_common(g)
    g.add_argument("--config", help="YAML file with GenerationConfig fields; flags override")
    g.add_argument("--rungs", default="1,2,3", help="comma-separated rung counts")
    g.add_argument("--samples-per-rung", type=int, default=100)
    g.add_argument("--delta-range", nargs=2, type=float, default=list(pipeline.DEFAULT_DELTA_RANGE))
    g.add_argument("--rb-range", nargs=2, type=float, default=list(pipeline.DEFAULT_RB_RANGE))

    s = sub.add_parser("sweep", help="emit a (delta, rb) grid for one system size")
    _add_common(s)
    s.set_defaults(partition="symmetric")
    s.add_argument("--rungs", type=int, required=True)
    s.add_argument("--delta-range", nargs=2, type=float, default=list(pipeline.DEFAULT_DELTA_RANGE))
    s.add_argument("--rb-range", nargs=2, type=float, default=list(pipeline.DEFAULT_RB_RANGE))
    s.add_argument("--delta-steps", type=int, default=20)
    s.add_argument("--rb-steps", type=int, default=20)

    f = sub.add_parser("featurize", help="re-featurize an existing dataset with new options")
    _add_common(f)
    f.add_argument("--in", dest="input", required=True)

    m = sub.add_parser("sample", help="shot/noise simulation of one stored case")
    _add_common(m)
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--index", type=int, default=0)

    a = sub.add_parser("analyze", help="metrics summary for prediction or sweep files")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--out", default=None, help="summary JSON path (default stdout)")

    c = sub.add_parser("calibrate", help="temperature calibration from dropout samples")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--out", default=None)
    c.add_argument("--target-coverage", type=float, default=0.95)
    return parser


def _cmd_generate(args) -> int:
    values = {
        "rungs": _parse_rungs(args.rungs),
        "samples_per_rung": args.samples_per_rung,
        "delta_range": tuple(args.delta_range),
        "rb_range": tuple(args.rb_range),
        "master_seed": args.seed,
        "partition": args.partition,
        "shots": args.shots,
        "bitflip_p": args.bitflip_p,
        "boundary_flip_p": args.boundary_flip_p,
        "cutoff": args.cutoff,
        "fourth_moment": args.fourth_moment,
        "workers": args.workers,
    }
    if args.config:
        with open(args.config) as fh:
            file_values = yaml.safe_load(fh) or {}
        # CLI flags override file values only when explicitly given, so
        # apply file values under the parser defaults.
        defaults = {
            "rungs": [1, 2, 3], "samples_per_rung": 100,
            "delta_range": pipeline.DEFAULT_DELTA_RANGE,
            "rb_range": pipeline.DEFAULT_RB_RANGE,
            "master_seed": 0, "partition": "random", "shots": None,
            "bitflip_p": 0.0, "boundary_flip_p": 0.0,
            "cutoff": math.inf, "fourth_moment": False, "workers": 1,
        }
        for key, val in file_values.items():
            if key not in defaults:
                print(f"error: unknown config key {key!r}", file=sys.stderr)
                return EXIT_USAGE
            if values.get(key) == defaults[key]:
                values[key] = val
    per_rung = values["samples_per_rung"]
    if isinstance(per_rung, int):
        per_rung = {int(r): per_rung for r in values["rungs"]}
    else:
        per_rung = {int(k): int(v) for k, v in per_rung.items()}
    config = GenerationConfig(
        samples_per_rung=per_rung,
        delta_range=tuple(values["delta_range"]),
        rb_range=tuple(values["rb_range"]),
        master_seed=values["master_seed"],
        partition=values["partition"],
        noise=NoiseOptions(
            shots=values["shots"],
            bitflip_p=values["bitflip_p"],
            boundary_flip_p=values["boundary_flip_p"],
        ),
        cutoff=values["cutoff"],
        fourth_moment=values["fourth_moment"],
        solver=_solver(args),
        workers=values["workers"],
    )
    try:
        summary = generate_dataset(config, args.out)
    except ExcessFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURES
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = SweepConfig(
        n_rungs=args.rungs,
        delta_range=tuple(args.delta_range),
        rb_range=tuple(args.rb_range),
        delta_steps=args.delta_steps,
        rb_steps=args.rb_steps,
        partition=args.partition,
        noise=NoiseOptions(shots=args.shots, bitflip_p=args.bitflip_p),
        solver=_solver(args),
        master_seed=args.seed,
    )
    rows = sweep_grid(config)
    write_sweep(args.out, rows)
    print(json.dumps(mi_bound_report(rows), indent=2))
    return EXIT_OK


def _rebuild_distribution(record, args):
    """Ground state for a stored record, redone with current options."""
    params = SystemParams(
        delta_over_omega=record.delta_over_omega,
        rb_over_a=record.rb_over_a,
        n_rungs=record.n_rungs,
    )
    lattice = build_ladder(record.n_rungs)
    state = ground_state(params, lattice, _solver(args))
    return lattice, state, basis_probabilities(state.amplitudes)


def _cmd_featurize(args) -> int:
    out = []
    for record in read_samples(args.input):
        lattice, state, dist = _rebuild_distribution(record, args)
        bipartition = Bipartition(tuple(record.mask))
        if args.shots is not None:
            seed = np.random.SeedSequence(
                entropy=args.seed, spawn_key=(record.seeds.get("index", 0),)
            )
            shot_set = sample_bitstrings(dist, args.shots, seed)
            if args.bitflip_p > 0:
                shot_set = apply_bitflip_noise(shot_set, args.bitflip_p, seed.spawn(1)[0])
            dist = empirical_distribution(shot_set)
        p = rydberg_probabilities(dist)
        c = two_point_correlations(dist)
        m4 = fourth_cross_moment(dist) if args.fourth_moment else None
        new = featurize(
            lattice, bipartition, p, c,
            FeaturizeOptions(cutoff=args.cutoff, fourth_moment=m4),
        )
        rec = classical_mutual_information(dist, bipartition)
        new.delta_over_omega = record.delta_over_omega
        new.rb_over_a = record.rb_over_a
        new.s_vn = record.s_vn
        new.mi = rec.mi
        new.half_mi = rec.half_mi
        new.shots = args.shots
        new.noise = {"bitflip_p": args.bitflip_p} if args.shots is not None else {}
        new.seeds = record.seeds
        new.degenerate = state.degenerate
        out.append(new)
    write_samples(args.out, out)
    print(f"re-featurized {len(out)} records -> {args.out}")
    return EXIT_OK


def _cmd_sample(args) -> int:
    records = list(read_samples(args.input))
    if not 0 <= args.index < len(records):
        print(f"error: index {args.index} out of range (0..{len(records) - 1})", file=sys.stderr)
        return EXIT_DATA
    record = records[args.index]
    _lattice, _state, dist = _rebuild_distribution(record, args)
    n_shots = args.shots if args.shots is not None else 10000
    shot_set = sample_bitstrings(dist, n_shots, args.seed)
    if args.bitflip_p > 0:
        shot_set = apply_bitflip_noise(shot_set, args.bitflip_p, args.seed + 1)
    write_shots(args.out, shot_set)
    print(f"wrote {n_shots} shots for record {args.index} -> {args.out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    if args.input.endswith(".csv"):
        summary = mi_bound_report(read_sweep(args.input))
    else:
        with open(args.input) as fh:
            first = ""
            for line in fh:
                if line.strip():
                    first = line
                    break
        if '"s_pred"' in first:
            summary = summarize(read_predictions(args.input))
        else:
            summary = mi_bound_report(read_samples(args.input))
    text = json.dumps(summary, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    preds = read_predictions(args.input)
    result = calibrate_temperature(preds, target_coverage=args.target_coverage)
    out = {
        "temperature": result.temperature,
        "coverage": result.coverage,
        "mean_width": result.mean_width,
        "converged": result.converged,
    }
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "sweep": _cmd_sweep,
    "featurize": _cmd_featurize,
    "sample": _cmd_sample,
    "analyze": _cmd_analyze,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, SchemaVersionError, FileNotFoundError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
