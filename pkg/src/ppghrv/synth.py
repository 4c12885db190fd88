"""Synthetic PPG traces with exact RR ground truth.

Beats are laid down sequentially from an instantaneous HR curve plus
Gaussian beat-to-beat jitter; the PPG is a train of asymmetric raised-cosine
pulses with optional motion-artifact bursts, sensor gain, and additive
noise.  Everything is a pure function of the config including its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, TooShort
from .metrics import MS_PER_MINUTE, RrSeries
from .sigproc import DEFAULT_SAMPLING_RATE_HZ, PpgSignal

RR_CLAMP_MS = (250.0, 2000.0)        # physiological interval bounds
PULSE_RISE_FRACTION = 0.3            # systolic upstroke share of the period
ARTIFACT_AMPLITUDE_RANGE = (1.0, 3.0)  # multiples of the pulse amplitude
ARTIFACT_BAND_HZ = (0.5, 5.0)        # rough band of the burst content

# independent RNG streams per stage, all derived from cfg.seed
_RR_STREAM = 0
_NOISE_STREAM = 1
_ARTIFACT_STREAM = 2


@dataclass(frozen=True)
class SynthConfig:
    duration_s: float
    sampling_rate_hz: float = DEFAULT_SAMPLING_RATE_HZ
    base_hr_bpm: float = 70.0
    hr_drift_amplitude_bpm: float = 0.0
    hr_drift_period_s: float = 300.0
    rr_jitter_ms: float = 0.0
    artifact_rate_per_min: float = 0.0
    artifact_duration_range_s: tuple[float, float] = (0.5, 2.0)
    sensor_bias_gain: float = 1.0
    additive_noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.sampling_rate_hz <= 0:
            raise ConfigError("sampling_rate_hz must be positive")
        if not 30.0 < self.base_hr_bpm < 200.0:
            raise ConfigError("base_hr_bpm must lie in (30, 200)")
        if self.hr_drift_amplitude_bpm < 0:
            raise ConfigError("hr_drift_amplitude_bpm must be >= 0")
        lo = self.base_hr_bpm - self.hr_drift_amplitude_bpm
        hi = self.base_hr_bpm + self.hr_drift_amplitude_bpm
        if not (30.0 < lo and hi < 200.0):
            raise ConfigError("HR drift would leave the (30, 200) bpm band")
        if self.hr_drift_period_s <= 0:
            raise ConfigError("hr_drift_period_s must be positive")
        if self.rr_jitter_ms < 0:
            raise ConfigError("rr_jitter_ms must be >= 0")
        if self.artifact_rate_per_min < 0:
            raise ConfigError("artifact_rate_per_min must be >= 0")
        dlo, dhi = self.artifact_duration_range_s
        if not 0 < dlo <= dhi:
            raise ConfigError("artifact_duration_range_s must satisfy 0 < lo <= hi")
        if self.sensor_bias_gain <= 0:
            raise ConfigError("sensor_bias_gain must be positive")
        if self.additive_noise_sigma < 0:
            raise ConfigError("additive_noise_sigma must be >= 0")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")


@dataclass(frozen=True)
class GroundTruth:
    """Exact beat times plus the RR intervals derived from them."""

    beat_times_s: np.ndarray
    rr: RrSeries

    def __post_init__(self):
        bt = np.asarray(self.beat_times_s, dtype=np.float64)
        if bt.ndim != 1 or bt.size < 2:
            raise ValueError("need at least two beat times")
        if not np.all(np.diff(bt) > 0):
            raise ValueError("beat times must strictly increase")
        object.__setattr__(self, "beat_times_s", bt)
        if len(self.rr) != bt.size - 1:
            raise ValueError("rr length must be len(beat_times) - 1")


def _rng(cfg: SynthConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((cfg.seed, stream)))


def generate_rr_trace(cfg: SynthConfig) -> GroundTruth:
    """Sequential beats from the instantaneous-HR curve plus jitter.

    The interval drawn at beat time t is 60000 / hr(t) plus Gaussian jitter,
    clamped to physiological bounds.  RR intervals are recomputed from the
    final beat times so gt.rr always equals diff(beat_times) * 1000 exactly.
    """
    rng = _rng(cfg, _RR_STREAM)
    two_pi = 2.0 * np.pi
    beats = [0.0]
    t = 0.0
    while True:
        hr = cfg.base_hr_bpm + cfg.hr_drift_amplitude_bpm * np.sin(
            two_pi * t / cfg.hr_drift_period_s
        )
        rr_ms = MS_PER_MINUTE / hr + rng.normal(0.0, cfg.rr_jitter_ms)
        rr_ms = min(max(rr_ms, RR_CLAMP_MS[0]), RR_CLAMP_MS[1])
        nxt = t + rr_ms / 1000.0
        if nxt > cfg.duration_s + 1e-9:
            break
        beats.append(nxt)
        t = nxt
    if len(beats) < 2:
        raise TooShort(
            f"duration_s={cfg.duration_s} is too short for a single beat interval"
        )
    bt = np.asarray(beats)
    return GroundTruth(beat_times_s=bt, rr=RrSeries(np.diff(bt) * 1000.0))


def _pulse_curve(tt: np.ndarray, beat_t: float, rise_s: float, decay_s: float) -> np.ndarray:
    """Asymmetric raised cosine peaking (value 1) at beat_t."""
    out = np.zeros_like(tt)
    rising = (tt >= beat_t - rise_s) & (tt <= beat_t)
    u = (tt[rising] - (beat_t - rise_s)) / rise_s
    out[rising] = 0.5 * (1.0 - np.cos(np.pi * u))
    falling = (tt > beat_t) & (tt <= beat_t + decay_s)
    v = (tt[falling] - beat_t) / decay_s
    out[falling] = 0.5 * (1.0 + np.cos(np.pi * v))
    return out


def render_ppg(gt: GroundTruth, cfg: SynthConfig) -> PpgSignal:
    """Render the beat train into a sampled PPG signal.

    Each beat contributes a raised-cosine pulse peaking at the beat time:
    the upstroke spans 30% of the preceding interval and the decay 70% of
    the following one, so consecutive templates tile without overlap.  The
    result is gain * pulses + Gaussian noise + motion artifacts.
    """
    fs = cfg.sampling_rate_hz
    n = int(round(cfg.duration_s * fs))
    t = np.arange(n) / fs
    clean = np.zeros(n)
    bt = gt.beat_times_s
    rr_s = gt.rr.intervals_ms / 1000.0
    n_rr = rr_s.size
    for i, b in enumerate(bt):
        rise_s = PULSE_RISE_FRACTION * (rr_s[i - 1] if i > 0 else rr_s[0])
        decay_s = (1.0 - PULSE_RISE_FRACTION) * (rr_s[i] if i < n_rr else rr_s[-1])
        j0 = max(0, int(np.ceil((b - rise_s) * fs)))
        j1 = min(n - 1, int(np.floor((b + decay_s) * fs)))
        if j1 < j0:
            continue
        clean[j0 : j1 + 1] += _pulse_curve(t[j0 : j1 + 1], b, rise_s, decay_s)
    signal = cfg.sensor_bias_gain * clean
    if cfg.additive_noise_sigma > 0:
        signal = signal + _rng(cfg, _NOISE_STREAM).normal(
            0.0, cfg.additive_noise_sigma, n
        )
    out = PpgSignal(fs, signal)
    if cfg.artifact_rate_per_min > 0:
        out = inject_motion_artifacts(out, cfg)
    return out


def sample_artifact_epochs(cfg: SynthConfig, rng: np.random.Generator) -> list[tuple[float, float]]:
    """Poisson-process artifact epochs as (start_s, duration_s) pairs."""
    lam = cfg.artifact_rate_per_min * cfg.duration_s / 60.0
    count = int(rng.poisson(lam))
    if count == 0:
        return []
    starts = np.sort(rng.uniform(0.0, cfg.duration_s, size=count))
    lo, hi = cfg.artifact_duration_range_s
    durations = rng.uniform(lo, hi, size=count)
    return list(zip(starts.tolist(), durations.tolist()))


def _movavg(x: np.ndarray, w: int) -> np.ndarray:
    w = max(1, min(w, x.size))
    kernel = np.ones(w)
    return np.convolve(x, kernel, mode="same") / np.convolve(
        np.ones_like(x), kernel, mode="same"
    )


def _burst(rng: np.random.Generator, m: int, fs: float) -> np.ndarray:
    """Band-limited random-walk segment, normalized to unit peak."""
    walk = np.cumsum(rng.standard_normal(m))
    walk = _movavg(walk, int(round(fs / (2.0 * ARTIFACT_BAND_HZ[1]))))  # kill > 5 Hz
    walk = walk - _movavg(walk, int(round(fs / ARTIFACT_BAND_HZ[0])))   # kill < 0.5 Hz
    peak = float(np.max(np.abs(walk)))
    return walk / peak if peak > 0 else walk


def inject_motion_artifacts(signal: PpgSignal, cfg: SynthConfig) -> PpgSignal:
    """Add wrist-motion bursts to a rendered signal.

    Epoch starts follow a Poisson process at artifact_rate_per_min; each
    epoch adds a Hann-windowed band-limited burst with amplitude 1-3x the
    pulse amplitude.  Rate zero returns the input unchanged.
    """
    if cfg.artifact_rate_per_min == 0:
        return signal
    rng = _rng(cfg, _ARTIFACT_STREAM)
    fs = signal.sampling_rate_hz
    x = signal.samples.copy()
    n = x.size
    pulse_amplitude = cfg.sensor_bias_gain  # templates peak at 1.0 before gain
    for start_s, dur_s in sample_artifact_epochs(cfg, rng):
        j0 = int(round(start_s * fs))
        j1 = min(n, j0 + max(2, int(round(dur_s * fs))))
        if j0 >= n:
            continue
        m = j1 - j0
        amp = rng.uniform(*ARTIFACT_AMPLITUDE_RANGE) * pulse_amplitude
        x[j0:j1] += amp * _burst(rng, m, fs) * np.hanning(m)
    return PpgSignal(fs, x, signal.start_time_s)


# Activity presets, ordered by artifact intensity: sit < sleep < office_work.
# Sleep sits lowest in HR and richest in beat-to-beat jitter; office work
# brings the most wrist motion.
ACTIVITY_PRESETS: dict[str, dict] = {
    "sit": dict(
        base_hr_bpm=65.0,
        hr_drift_amplitude_bpm=2.0,
        hr_drift_period_s=120.0,
        rr_jitter_ms=25.0,
        artifact_rate_per_min=0.5,
        additive_noise_sigma=0.02,
    ),
    "sleep": dict(
        base_hr_bpm=55.0,
        hr_drift_amplitude_bpm=3.0,
        hr_drift_period_s=180.0,
        rr_jitter_ms=35.0,
        artifact_rate_per_min=2.0,
        additive_noise_sigma=0.03,
    ),
    "office_work": dict(
        base_hr_bpm=75.0,
        hr_drift_amplitude_bpm=6.0,
        hr_drift_period_s=90.0,
        rr_jitter_ms=30.0,
        artifact_rate_per_min=6.0,
        additive_noise_sigma=0.05,
    ),
}


def activity_preset(name: str, duration_s: float, seed: int = 0) -> SynthConfig:
    """Config for a named activity; see ACTIVITY_PRESETS for the knobs."""
    try:
        params = ACTIVITY_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(ACTIVITY_PRESETS))
        raise ConfigError(f"unknown activity {name!r}; choose one of: {known}") from None
    return SynthConfig(duration_s=duration_s, seed=seed, **params)


def with_seed(cfg: SynthConfig, seed: int) -> SynthConfig:
    """Same configuration, different RNG seed."""
    return replace(cfg, seed=seed)
