"""Evaluation metrics, paired statistics, and temperature calibration.

Operates on files of (truth, prediction[, dropout samples, baseline])
records so the whole suite runs without any trained model present.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    ParseError,
)

PERCENTILES = (2.5, 97.5)
TEMPERATURE_RANGE = (0.25, 4.0)
TEMPERATURE_RESOLUTION = 1e-3
MAPE_THRESHOLD_FRACTION = 0.01


@dataclass(frozen=True)
class PredictionSet:
    """Truths, point predictions, and optional dropout samples / baseline."""

    truths: np.ndarray
    predictions: np.ndarray
    samples: np.ndarray | None = None  # (n_records, k)
    baselines: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.truths)
        if len(self.predictions) != n:
            raise InvalidArgumentError("truth and prediction columns differ in length")
        if self.samples is not None and self.samples.shape[0] != n:
            raise InvalidArgumentError("sample rows do not match record count")
        if self.baselines is not None and len(self.baselines) != n:
            raise InvalidArgumentError("baseline column does not match record count")


@dataclass(frozen=True)
class CalibrationResult:
    temperature: float
    coverage: float
    mean_width: float
    converged: bool = True


def _check_pair(preds, truths):
    preds = np.asarray(preds, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if preds.shape != truths.shape or preds.ndim != 1 or len(preds) == 0:
        raise InvalidArgumentError("need two equal-length nonempty vectors")
    return preds, truths


def log_cosh_loss(preds, truths) -> float:
    """Mean ln cosh(pred - truth), stable for large residuals."""
    preds, truths = _check_pair(preds, truths)
    d = np.abs(preds - truths)
    # ln cosh d = d + ln(1 + exp(-2d)) - ln 2, exact for all magnitudes.
    return float(np.mean(d + np.log1p(np.exp(-2.0 * d)) - math.log(2.0)))


def mae(preds, truths) -> float:
    preds, truths = _check_pair(preds, truths)
    return float(np.mean(np.abs(preds - truths)))


def mape_thresholded(preds, truths) -> float:
    """Mean absolute percentage error over records whose truth exceeds
    1% of the dataset maximum; NaN when no record qualifies."""
    preds, truths = _check_pair(preds, truths)
    keep = truths > MAPE_THRESHOLD_FRACTION * truths.max()
    if not keep.any():
        return float("nan")
    return float(np.mean(100.0 * np.abs(preds[keep] - truths[keep]) / truths[keep]))


@dataclass(frozen=True)
class PairedComparison:
    t: float
    p_two_sided: float
    cohens_d: float
    mean_diff: float
    n: int


def paired_comparison(abs_err_a, abs_err_b) -> PairedComparison:
    """Paired t-test of method B's errors against method A's.

    Positive t means B's errors are larger, i.e. A wins.
    """
    a, b = _check_pair(abs_err_a, abs_err_b)
    if len(a) < 2:
        raise InvalidArgumentError("need at least 2 paired records")
    d = b - a
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("paired differences have zero variance")
    mean = float(np.mean(d))
    n = len(d)
    t = mean * math.sqrt(n) / sd
    p = 2.0 * float(stats.t.sf(abs(t), n - 1))
    return PairedComparison(t=t, p_two_sided=p, cohens_d=mean / sd, mean_diff=mean, n=n)


@dataclass(frozen=True)
class BiasTest:
    mean_bias: float
    t: float
    p_two_sided: float
    n: int


def bias_test(signed_errors) -> BiasTest:
    """One-sample t-test of signed prediction error against zero."""
    e = np.asarray(signed_errors, dtype=float)
    if e.ndim != 1 or len(e) < 2:
        raise InvalidArgumentError("need at least 2 signed errors")
    sd = float(np.std(e, ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("signed errors have zero variance")
    mean = float(np.mean(e))
    n = len(e)
    t = mean * math.sqrt(n) / sd
    p = 2.0 * float(stats.t.sf(abs(t), n - 1))
    return BiasTest(mean_bias=mean, t=t, p_two_sided=p, n=n)


def apply_temperature(samples: np.ndarray, temperature: float) -> np.ndarray:
    """Per-record 95% interval after widening the spread about the mean.

    Returns an (n_records, 2) array of (2.5th, 97.5th) percentiles of
    mean + T * (sample - mean), linear-interpolation convention.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] < 2:
        raise InvalidArgumentError("need at least 2 dropout samples per record")
    if temperature <= 0:
        raise InvalidArgumentError("temperature must be positive")
    means = samples.mean(axis=1, keepdims=True)
    scaled = means + temperature * (samples - means)
    lo, hi = np.percentile(scaled, PERCENTILES, axis=1)
    return np.column_stack([lo, hi])


def coverage(intervals: np.ndarray, truths) -> float:
    """Fraction of truths inside the closed intervals."""
    intervals = np.asarray(intervals, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if intervals.shape != (len(truths), 2):
        raise InvalidArgumentError("intervals must be (n_records, 2)")
    inside = (truths >= intervals[:, 0]) & (truths <= intervals[:, 1])
    return float(np.mean(inside))


def calibrate_temperature(
    prediction_set: PredictionSet, target_coverage: float = 0.95
) -> CalibrationResult:
    """Find the spread temperature whose interval coverage hits the target.

    Coverage is nondecreasing in T, so a bisection over [0.25, 4] at 1e-3
    resolution suffices.  If the target is unreachable inside the range
    the best endpoint is returned flagged unconverged.
    """
    if prediction_set.samples is None:
        raise InvalidArgumentError("calibration needs dropout samples")
    truths = prediction_set.truths
    samples = prediction_set.samples

    def cov(t: float) -> float:
        return coverage(apply_temperature(samples, t), truths)

    lo, hi = TEMPERATURE_RANGE
    cov_lo, cov_hi = cov(lo), cov(hi)
    if cov_lo >= target_coverage:
        t = lo
        converged = cov_lo - target_coverage <= 0.01
    elif cov_hi < target_coverage:
        t = hi
        converged = False
    else:
        a, b = lo, hi
        while b - a > TEMPERATURE_RESOLUTION:
            mid = 0.5 * (a + b)
            if cov(mid) >= target_coverage:
                b = mid
            else:
                a = mid
        t = min((a, b), key=lambda x: abs(cov(x) - target_coverage))
        converged = True
    intervals = apply_temperature(samples, t)
    achieved = coverage(intervals, truths)
    width = float(np.mean(intervals[:, 1] - intervals[:, 0]))
    return CalibrationResult(
        temperature=float(t), coverage=achieved, mean_width=width, converged=converged
    )


def write_predictions(path, prediction_set: PredictionSet) -> None:
    """One JSON record per line: s_vn, s_pred, optional samples/baseline."""
    with open(path, "w") as fh:
        for i in range(len(prediction_set.truths)):
            rec = {
                "s_vn": float(prediction_set.truths[i]),
                "s_pred": float(prediction_set.predictions[i]),
            }
            if prediction_set.samples is not None:
                rec["samples"] = [float(x) for x in prediction_set.samples[i]]
            if prediction_set.baselines is not None:
                rec["baseline"] = float(prediction_set.baselines[i])
            fh.write(json.dumps(rec) + "\n")


def read_predictions(path) -> PredictionSet:
    truths, preds, samples, baselines = [], [], [], []
    k = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(
                    f"line {lineno}: malformed record ({exc.msg})", line_number=lineno
                ) from exc
            try:
                truths.append(float(rec["s_vn"]))
                preds.append(float(rec["s_pred"]))
            except KeyError as exc:
                raise ParseError(
                    f"line {lineno}: missing field {exc.args[0]!r}", line_number=lineno
                ) from exc
            if "samples" in rec:
                if k is None:
                    k = len(rec["samples"])
                elif len(rec["samples"]) != k:
                    raise ParseError(
                        f"line {lineno}: inconsistent sample count", line_number=lineno
                    )
                samples.append(rec["samples"])
            if "baseline" in rec:
                baselines.append(float(rec["baseline"]))
    if not truths:
        raise ParseError("no prediction records in file")
    n = len(truths)
    if samples and len(samples) != n:
        raise ParseError("samples present on only some records")
    if baselines and len(baselines) != n:
        raise ParseError("baseline present on only some records")
    return PredictionSet(
        truths=np.asarray(truths),
        predictions=np.asarray(preds),
        samples=np.asarray(samples) if samples else None,
        baselines=np.asarray(baselines) if baselines else None,
    )


def summarize(prediction_set: PredictionSet, comparator: str = "baseline") -> dict:
    """Every point metric plus, when a baseline column exists, the paired
    comparison and bias tests against it."""
    truths = prediction_set.truths
    preds = prediction_set.predictions
    out = {
        "n_records": len(truths),
        "log_cosh_loss": log_cosh_loss(preds, truths),
        "mae": mae(preds, truths),
        "mape_percent": mape_thresholded(preds, truths),
    }
    try:
        bias = bias_test(preds - truths)
        out["bias"] = {"mean_bias": bias.mean_bias, "t": bias.t, "p": bias.p_two_sided}
    except DegenerateInputError:
        out["bias"] = None
    if prediction_set.baselines is not None:
        base = prediction_set.baselines
        out["baseline_mae"] = mae(base, truths)
        try:
            cmp = paired_comparison(
                np.abs(preds - truths), np.abs(base - truths)
            )
            out["paired_vs_baseline"] = {
                "t": cmp.t,
                "p": cmp.p_two_sided,
                "cohens_d": cmp.cohens_d,
                "mean_diff": cmp.mean_diff,
            }
        except DegenerateInputError:
            out["paired_vs_baseline"] = None
    return out
