"""Supervised datasets pairing processed HR features with exact labels.

An HRV sample holds n consecutive per-second HRs plus their rough HRV as
features; its label is the true metric over the ground-truth intervals in
the same time span.  An HR sample holds the k most recent raw estimates
with the true instantaneous HR as label.  Splitting is chronological; time
series must never be shuffled across the train/test boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyWindow, TooFewSamples, TraceTooShort
from .metrics import MS_PER_MINUTE, HrvMetricKind, RrSeries, rmssd, rough_hrv, sdnn
from .sigproc import RawHrSeries, SmoothedHrSeries
from .synth import GroundTruth


@dataclass(frozen=True)
class HrvSample:
    features: np.ndarray  # n smoothed HRs followed by their rough HRV
    label_ms: float
    window_end_time_s: float


@dataclass(frozen=True)
class HrSample:
    features: np.ndarray  # k most recent raw HR estimates
    label_bpm: float
    time_s: float


@dataclass(frozen=True)
class Dataset:
    """Time-ordered samples as dense arrays, one row per window."""

    features: np.ndarray          # (m, d)
    labels: np.ndarray            # (m,)
    window_end_times_s: np.ndarray  # (m,), strictly increasing
    kind: HrvMetricKind | None    # None for instantaneous-HR datasets
    monitor_len_s: float

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.float64)
        t = np.asarray(self.window_end_times_s, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1 or t.ndim != 1:
            raise ValueError("features must be 2-D; labels and times 1-D")
        if not (X.shape[0] == y.size == t.size):
            raise ValueError("features, labels and times must agree in length")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("window end times must strictly increase")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "window_end_times_s", t)

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def sample(self, i: int) -> HrvSample:
        return HrvSample(self.features[i], float(self.labels[i]),
                         float(self.window_end_times_s[i]))


def _true_hrv_in_window(gt: GroundTruth, t0: float, t1: float, kind: HrvMetricKind) -> float:
    """Metric over intervals whose beats both fall inside [t0, t1]."""
    bt = gt.beat_times_s
    a = int(np.searchsorted(bt, t0 - 1e-9, side="left"))
    b = int(np.searchsorted(bt, t1 + 1e-9, side="right"))
    beats = bt[a:b]
    if beats.size < 3:  # fewer than two intervals
        raise EmptyWindow(
            f"window [{t0:.1f}, {t1:.1f}]s holds {beats.size} beats; "
            "need at least 3 for an HRV label"
        )
    rr = RrSeries(np.diff(beats) * 1000.0)
    return sdnn(rr) if kind is HrvMetricKind.SDNN else rmssd(rr)


def build_hrv_dataset(
    shr: SmoothedHrSeries,
    gt: GroundTruth,
    n_s: int,
    kind: HrvMetricKind,
    stride_s: int = 1,
) -> Dataset:
    """Sliding n-second windows over the per-second HRs, exactly labelled.

    Window w covers smoothed indices [w*stride, w*stride + n); its feature
    vector is those n HRs plus their rough HRV, and its label is the true
    metric over the ground-truth beats inside the same time span.  With
    stride 1 the dataset holds len(shr) - n + 1 samples.
    """
    n = int(n_s)
    stride = int(stride_s)
    if n < 2:
        raise ConfigError("n_s must be at least 2")
    if stride < 1:
        raise ConfigError("stride_s must be at least 1")
    vals = shr.values
    if vals.size < n:
        raise TraceTooShort(
            f"need {n} smoothed HRs for one window, trace has {vals.size}"
        )
    m = (vals.size - n) // stride + 1
    X = np.empty((m, n + 1), dtype=np.float64)
    y = np.empty(m, dtype=np.float64)
    t_end = np.empty(m, dtype=np.float64)
    for w in range(m):
        lo = w * stride
        hi = lo + n
        hrs = vals[lo:hi]
        t0 = shr.start_time_s + lo
        t1 = shr.start_time_s + hi
        X[w, :n] = hrs
        X[w, n] = rough_hrv(hrs, kind).value_ms
        y[w] = _true_hrv_in_window(gt, t0, t1, kind)
        t_end[w] = t1
    return Dataset(X, y, t_end, kind=kind, monitor_len_s=float(n))


def build_hr_dataset(raw: RawHrSeries, gt: GroundTruth, k: int) -> Dataset:
    """Windows of the k most recent raw HR estimates, labelled with true HR.

    The label for a window ending at estimate i is the instantaneous HR of
    the ground-truth interval containing that emission time.  Dataset size
    is len(raw) - k + 1.
    """
    if k < 1:
        raise ConfigError("k must be at least 1")
    vals = raw.values
    if vals.size < k:
        raise TraceTooShort(f"need {k} HR estimates, trace has {vals.size}")
    m = vals.size - k + 1
    bt = gt.beat_times_s
    rr = gt.rr.intervals_ms
    X = np.empty((m, k), dtype=np.float64)
    y = np.empty(m, dtype=np.float64)
    t_end = np.empty(m, dtype=np.float64)
    step = 1.0 / raw.rate_per_s
    for w in range(m):
        i = w + k - 1
        t = raw.start_time_s + i * step
        X[w] = vals[w : w + k]
        j = int(np.searchsorted(bt, t, side="right")) - 1
        j = min(max(j, 0), rr.size - 1)
        y[w] = MS_PER_MINUTE / rr[j]
        t_end[w] = t
    return Dataset(X, y, t_end, kind=None, monitor_len_s=k * step)


def chronological_split(d: Dataset, train_fraction: float = 0.8) -> tuple[Dataset, Dataset]:
    """First ceil(fraction * m) samples train, the rest test; no shuffling.

    Both halves are guaranteed non-empty, nudging the boundary by one
    sample when rounding would empty either side.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError("train_fraction must lie strictly between 0 and 1")
    m = len(d)
    if m < 2:
        raise TooFewSamples(f"cannot split {m} sample(s) into train and test")
    n_train = int(np.ceil(train_fraction * m))
    n_train = min(max(n_train, 1), m - 1)

    def _slice(a, b):
        return Dataset(
            d.features[a:b],
            d.labels[a:b],
            d.window_end_times_s[a:b],
            kind=d.kind,
            monitor_len_s=d.monitor_len_s,
        )

    return _slice(0, n_train), _slice(n_train, m)
