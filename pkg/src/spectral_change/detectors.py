"""Mean-spectrum divergence and entropy-prediction change detectors."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .infomeasures import (
    DEFAULT_FLOOR,
    block_entropy,
    predicted_entropy,
    renyi_divergence,
)
from .signal_io import METHODS, AudioBuffer, ChangeEvent
from .stft import Spectrogram, StftParams, normalize_block, spectrogram

__all__ = [
    "DetectorConfig",
    "mean_spectrum",
    "divergence_scores",
    "prediction_scores",
    "detect_divergence",
    "detect_prediction",
    "run_detector",
]

log = logging.getLogger(__name__)

TRIGGER_MODES = ("ratio_above", "two_sided_deviation")
RESTART_POLICIES = ("continue_sliding", "reset_after_event")
# added to both divergences before taking their ratio, in bits
DEFAULT_DIV_OFFSET = 1e-2
# divergences this small are rounding residue of identical densities
ZERO_DIVERGENCE = 1e-12


@dataclass(frozen=True)
class DetectorConfig:
    alpha: float = 2.0
    threshold: float = 1.5
    mean_len: int = 20
    block_len: int = 6
    trigger_mode: str = "ratio_above"
    restart_policy: str = "continue_sliding"
    floor: float = DEFAULT_FLOOR
    div_offset: float = DEFAULT_DIV_OFFSET
    merge: bool = True

    def __post_init__(self):
        if not (self.alpha >= 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not self.threshold > 0:
            raise ValueError(f"threshold must be > 0, got {self.threshold}")
        if self.mean_len < 2:
            raise ValueError(f"mean_len must be >= 2, got {self.mean_len}")
        if self.block_len < 1:
            raise ValueError(f"block_len must be >= 1, got {self.block_len}")
        if self.trigger_mode not in TRIGGER_MODES:
            raise ValueError(f"unknown trigger mode {self.trigger_mode!r}")
        if self.restart_policy not in RESTART_POLICIES:
            raise ValueError(f"unknown restart policy {self.restart_policy!r}")
        if self.floor < 0:
            raise ValueError("floor must be >= 0")
        if self.div_offset < 0:
            raise ValueError("div_offset must be >= 0")

    def fires(self, score: float) -> bool:
        if self.trigger_mode == "ratio_above":
            return score > self.threshold
        return abs(score - 1.0) > self.threshold


def mean_spectrum(frames) -> np.ndarray:
    """Per-bin mean of unit-sum frames, renormalized against rounding drift."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2 or frames.shape[0] == 0:
        raise ValueError("mean_spectrum needs a non-empty stack of equal-length frames")
    mean = frames.mean(axis=0)
    return mean / mean.sum()


def _row_densities(spec: Spectrogram) -> tuple[np.ndarray, np.ndarray]:
    power = np.asarray(spec.frames, dtype=np.float64)
    totals = power.sum(axis=1)
    live = totals > 0
    dens = np.zeros_like(power)
    dens[live] = power[live] / totals[live, None]
    return dens, live


def _ratio(cur: float, prev: float, offset: float) -> float:
    if cur <= ZERO_DIVERGENCE:
        cur = 0.0
    if prev <= ZERO_DIVERGENCE:
        prev = 0.0
    cur, prev = cur + offset, prev + offset
    if prev == 0.0:
        return 1.0 if cur == 0.0 else math.inf
    return cur / prev


def _require_frames(spec: Spectrogram, needed: int, what: str) -> None:
    if spec.n_frames < needed:
        raise ValueError(
            f"{what} needs at least {needed} frames, spectrogram has {spec.n_frames}")


def _scan_divergence(spec: Spectrogram, config: DetectorConfig, on_score):
    dens, live = _row_densities(spec)
    n = config.mean_len
    s = 0
    d_prev = None
    while s + n < spec.n_frames:
        target = s + n
        window = dens[s:target][live[s:target]]
        if not live[target] or window.shape[0] == 0:
            log.warning("skipping degenerate (all-zero) frame at index %d",
                        target if not live[target] else s)
            d_prev = None
            s += 1
            continue
        d_cur = renyi_divergence(dens[target], mean_spectrum(window),
                                 config.alpha, floor=config.floor)
        if d_prev is not None and on_score(target, _ratio(d_cur, d_prev, config.div_offset)):
            s, d_prev = target, None
            continue
        d_prev = d_cur
        s += 1


def _scan_prediction(spec: Spectrogram, config: DetectorConfig, on_score):
    power = np.asarray(spec.frames, dtype=np.float64)
    live = power.sum(axis=1) > 0
    a, b = spec.time_step_a, spec.freq_step_b
    n = config.block_len
    s = 0
    while s + n < spec.n_frames:
        target = s + n
        if not live[target] or not live[s:target].any():
            log.warning("skipping degenerate (all-zero) frame at index %d", target)
            s += 1
            continue
        h_cur = block_entropy(normalize_block(power[s:target]), a, b, config.alpha)
        h_pred = predicted_entropy(h_cur, n)
        h_next = block_entropy(normalize_block(power[s:target + 1]), a, b, config.alpha)
        if on_score(target, h_next / h_pred):
            s = target
            continue
        s += 1


def _trace(scan, spec, config) -> list[tuple[int, float]]:
    out = []

    def record(m, score):
        out.append((m, score))
        return False

    scan(spec, replace(config, restart_policy="continue_sliding"), record)
    return out


def divergence_scores(spec: Spectrogram, config: DetectorConfig) -> list[tuple[int, float]]:
    """(frame index, divergence ratio) for every comparison of a continuous scan."""
    _require_frames(spec, config.mean_len + 2, "divergence detector")
    return _trace(_scan_divergence, spec, config)


def prediction_scores(spec: Spectrogram, config: DetectorConfig) -> list[tuple[int, float]]:
    """(frame index, actual / predicted entropy) for every step of a continuous scan."""
    _require_frames(spec, config.block_len + 1, "prediction detector")
    return _trace(_scan_prediction, spec, config)


def _detect(scan, spec: Spectrogram, config: DetectorConfig, method: str) -> list[ChangeEvent]:
    hits: list[tuple[int, float]] = []
    reset = config.restart_policy == "reset_after_event"

    def on_score(m, score):
        if config.fires(score):
            hits.append((m, score))
            return reset
        return False

    scan(spec, config, on_score)

    events = []
    last = None
    for m, score in hits:
        # a run of consecutive triggering frames is one transition
        if config.merge and last is not None and m == last + 1:
            last = m
            continue
        events.append(ChangeEvent.at_frame(m, spec.params.hop_size, spec.sample_rate,
                                           score, method))
        last = m
    return events


def detect_divergence(spec: Spectrogram, config: DetectorConfig) -> list[ChangeEvent]:
    """Compare each incoming frame with the mean of the preceding ``mean_len`` frames.

    The divergence I_alpha(new frame || mean spectrum) is computed for every
    window position; a change is flagged at the incoming frame when the
    ratio of the current divergence to the previous one triggers. The
    first divergence after a (re)start only seeds the chain.
    """
    _require_frames(spec, config.mean_len + 2, "divergence detector")
    return _detect(_scan_divergence, spec, config, "divergence")


def detect_prediction(spec: Spectrogram, config: DetectorConfig) -> list[ChangeEvent]:
    """Flag frames whose addition moves block entropy away from its prediction.

    For each window of ``block_len`` frames the jointly normalized block
    entropy predicts the entropy with one more coherent frame; the score
    is actual / predicted.
    """
    _require_frames(spec, config.block_len + 1, "prediction detector")
    return _detect(_scan_prediction, spec, config, "prediction")


def run_detector(audio: AudioBuffer, stft: StftParams, config: DetectorConfig,
                 method: str) -> list[ChangeEvent]:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    spec = spectrogram(audio, stft)
    if method == "divergence":
        return detect_divergence(spec, config)
    return detect_prediction(spec, config)
