"""CSV wire formats and the binary-agnostic file plumbing.

Formats (headers are exact):

    PPG trace        time_s,value
    RR ground truth  beat_time_s,rr_ms      (first row's rr_ms is empty)
    per-second HR    time_s,hr_bpm
    dataset          window_end_time_s,f0..f{d-1},label
    results table    activity,metric,n_s,model,mape_pct,sigproc_mape_pct,model_bytes,latency_us_mean
    estimation trace window_end_s,truth_ms,sigproc_ms,model_ms
    amplification    rr_mape,rmssd_mape,sdnn_mape,trials,seed

Floats are written with repr (shortest round-trip), so write->read returns
the exact in-memory values.  Readers raise ParseError with a line number,
NonMonotoneTime for unsorted timestamps, and RateMismatch when a PPG file's
inferred sampling rate is off the declared one by more than 1%.
"""

from __future__ import annotations

import csv
from typing import Iterable, Sequence

import numpy as np

from .data import Dataset
from .errors import NonMonotoneTime, ParseError, RateMismatch
from .metrics import RrSeries
from .sigproc import DEFAULT_SAMPLING_RATE_HZ, PpgSignal, SmoothedHrSeries
from .synth import GroundTruth

PPG_HEADER = ["time_s", "value"]
RR_HEADER = ["beat_time_s", "rr_ms"]
HR_HEADER = ["time_s", "hr_bpm"]
RESULTS_HEADER = [
    "activity",
    "metric",
    "n_s",
    "model",
    "mape_pct",
    "sigproc_mape_pct",
    "model_bytes",
    "latency_us_mean",
]
TRACE_HEADER = ["window_end_s", "truth_ms", "sigproc_ms", "model_ms"]
AMPLIFICATION_HEADER = ["rr_mape", "rmssd_mape", "sdnn_mape", "trials", "seed"]

RATE_TOLERANCE = 0.01  # inferred vs declared sampling rate


def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(path, expected_header: Sequence[str]):
    """Yield (line_number, row) for data rows; validates the header."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if header != list(expected_header):
            raise ParseError(
                f"{path}:1: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(expected_header)} fields, "
                    f"got {len(row)}"
                )
            yield lineno, row


def _parse_float(path, lineno: int, text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: bad {column} value {text!r}") from None


def write_ppg_csv(path, signal: PpgSignal) -> None:
    fs = signal.sampling_rate_hz
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PPG_HEADER)
        for i, v in enumerate(signal.samples):
            w.writerow([_fmt(signal.start_time_s + i / fs), _fmt(v)])


def read_ppg_csv(path, declared_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ) -> PpgSignal:
    times, values = [], []
    for lineno, row in _rows(path, PPG_HEADER):
        times.append(_parse_float(path, lineno, row[0], "time_s"))
        values.append(_parse_float(path, lineno, row[1], "value"))
    if len(times) < 2:
        raise ParseError(f"{path}: need at least 2 samples, got {len(times)}")
    t = np.asarray(times)
    dt = np.diff(t)
    if np.any(dt <= 0):
        bad = int(np.argmax(dt <= 0)) + 3  # +2 header/1-base, +1 second row of the pair
        raise NonMonotoneTime(f"{path}:{bad}: time_s does not strictly increase")
    inferred = 1.0 / float(np.median(dt))
    if abs(inferred - declared_rate_hz) > RATE_TOLERANCE * declared_rate_hz:
        raise RateMismatch(
            f"{path}: inferred rate {inferred:.3f} Hz is more than 1% off "
            f"the declared {declared_rate_hz:g} Hz"
        )
    return PpgSignal(declared_rate_hz, np.asarray(values), start_time_s=float(t[0]))


def write_rr_csv(path, gt: GroundTruth) -> None:
    rr = gt.rr.intervals_ms
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RR_HEADER)
        for i, bt in enumerate(gt.beat_times_s):
            w.writerow([_fmt(bt), "" if i == 0 else _fmt(rr[i - 1])])


def read_rr_csv(path) -> GroundTruth:
    beats, rr = [], []
    first = True
    for lineno, row in _rows(path, RR_HEADER):
        beats.append(_parse_float(path, lineno, row[0], "beat_time_s"))
        if first:
            if row[1] != "":
                raise ParseError(f"{path}:{lineno}: first row must leave rr_ms empty")
            first = False
        else:
            rr.append(_parse_float(path, lineno, row[1], "rr_ms"))
    if len(beats) < 2:
        raise ParseError(f"{path}: need at least 2 beats, got {len(beats)}")
    bt = np.asarray(beats)
    if np.any(np.diff(bt) <= 0):
        bad = int(np.argmax(np.diff(bt) <= 0)) + 3
        raise NonMonotoneTime(f"{path}:{bad}: beat_time_s does not strictly increase")
    try:
        return GroundTruth(beat_times_s=bt, rr=RrSeries(np.asarray(rr)))
    except ValueError as err:
        raise ParseError(f"{path}: {err}") from None


def write_hr_csv(path, shr: SmoothedHrSeries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HR_HEADER)
        for i, v in enumerate(shr.values):
            w.writerow([_fmt(shr.start_time_s + i), _fmt(v)])


def read_hr_csv(path) -> SmoothedHrSeries:
    times, values = [], []
    for lineno, row in _rows(path, HR_HEADER):
        times.append(_parse_float(path, lineno, row[0], "time_s"))
        values.append(_parse_float(path, lineno, row[1], "hr_bpm"))
    if not times:
        raise ParseError(f"{path}: no data rows")
    t = np.asarray(times)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        bad = int(np.argmax(np.diff(t) <= 0)) + 3
        raise NonMonotoneTime(f"{path}:{bad}: time_s does not strictly increase")
    return SmoothedHrSeries(np.asarray(values), start_time_s=float(t[0]))


def _dataset_header(n_features: int) -> list[str]:
    return ["window_end_time_s"] + [f"f{i}" for i in range(n_features)] + ["label"]


def write_dataset_csv(path, ds: Dataset) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_dataset_header(ds.n_features))
        for i in range(len(ds)):
            row = [_fmt(ds.window_end_times_s[i])]
            row += [_fmt(v) for v in ds.features[i]]
            row.append(_fmt(ds.labels[i]))
            w.writerow(row)


def read_dataset_csv(path) -> Dataset:
    """Exchange format carries no metric metadata; kind comes back None."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if (
            len(header) < 3
            or header[0] != "window_end_time_s"
            or header[-1] != "label"
            or header[1:-1] != [f"f{i}" for i in range(len(header) - 2)]
        ):
            raise ParseError(f"{path}:1: not a dataset header: {','.join(header)!r}")
        d = len(header) - 2
        times, feats, labels = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 2:
                raise ParseError(
                    f"{path}:{lineno}: expected {d + 2} fields, got {len(row)}"
                )
            times.append(_parse_float(path, lineno, row[0], "window_end_time_s"))
            feats.append([_parse_float(path, lineno, v, "feature") for v in row[1:-1]])
            labels.append(_parse_float(path, lineno, row[-1], "label"))
    if not times:
        raise ParseError(f"{path}: no data rows")
    t = np.asarray(times)
    if t.size > 1 and np.any(np.diff(t) <= 0):
        bad = int(np.argmax(np.diff(t) <= 0)) + 3
        raise NonMonotoneTime(f"{path}:{bad}: window_end_time_s must strictly increase")
    return Dataset(
        np.asarray(feats),
        np.asarray(labels),
        t,
        kind=None,
        monitor_len_s=0.0,
    )


def write_results_csv(path, rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for r in rows:
            w.writerow(
                [
                    r.activity,
                    r.metric,
                    str(r.n_s),
                    r.model,
                    _fmt(r.mape_pct),
                    _fmt(r.sigproc_mape_pct),
                    str(r.model_bytes),
                    "" if r.latency_us_mean is None else _fmt(r.latency_us_mean),
                ]
            )


def write_trace_csv(path, window_end_s, truth_ms, sigproc_ms, model_ms) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for t, tr, sp, mo in zip(window_end_s, truth_ms, sigproc_ms, model_ms):
            w.writerow([_fmt(t), _fmt(tr), _fmt(sp), _fmt(mo)])


def write_amplification_csv(path, rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(AMPLIFICATION_HEADER)
        for r in rows:
            w.writerow(
                [
                    _fmt(r.rr_mape_pct),
                    _fmt(r.rmssd_mape_pct),
                    _fmt(r.sdnn_mape_pct),
                    str(r.trials),
                    str(r.seed),
                ]
            )
