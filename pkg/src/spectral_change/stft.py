"""Power spectrogram and unit-sum normalization of frames and blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fft import is_power_of_two, rfft_power
from .signal_io import AudioBuffer

__all__ = [
    "DegenerateFrameError",
    "StftParams",
    "Spectrogram",
    "make_window",
    "spectrogram",
    "frame_count",
    "normalize_frame",
    "normalize_block",
]

WINDOW_KINDS = ("hamming",)


class DegenerateFrameError(ValueError):
    """An all-zero frame or block cannot be normalized to a density."""


@dataclass(frozen=True)
class StftParams:
    """Analysis grid. Defaults: 1024-sample Hamming window, 768 overlap, 2048-point FFT."""

    window_size: int = 1024
    hop_size: int = 256
    fft_size: int = 2048
    window_kind: str = "hamming"

    def __post_init__(self):
        if not 0 < self.hop_size <= self.window_size <= self.fft_size:
            raise ValueError(
                "need 0 < hop_size <= window_size <= fft_size, got "
                f"hop={self.hop_size} window={self.window_size} fft={self.fft_size}")
        if not is_power_of_two(self.fft_size):
            raise ValueError(f"fft_size must be a power of two, got {self.fft_size}")
        if self.window_kind not in WINDOW_KINDS:
            raise ValueError(f"unknown window kind {self.window_kind!r}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1


@dataclass(frozen=True)
class Spectrogram:
    """Power coefficients ``frames[m, k]`` on the lattice (time_step_a, freq_step_b)."""

    frames: np.ndarray
    params: StftParams
    sample_rate: int

    @property
    def time_step_a(self) -> float:
        return self.params.hop_size / self.sample_rate

    @property
    def freq_step_b(self) -> float:
        return self.sample_rate / self.params.fft_size

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_bins(self) -> int:
        return self.frames.shape[1]

    def frame_time(self, m: int) -> float:
        return m * self.params.hop_size / self.sample_rate


def make_window(kind: str, size: int) -> np.ndarray:
    """Symmetric window, w[n] = 0.54 - 0.46 cos(2 pi n / (size - 1)) for Hamming."""
    if size < 2:
        raise ValueError(f"window size must be >= 2, got {size}")
    if kind != "hamming":
        raise ValueError(f"unknown window kind {kind!r}")
    n = np.arange(size)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (size - 1))


def frame_count(n_samples: int, params: StftParams) -> int:
    if n_samples < params.window_size:
        return 0
    return (n_samples - params.window_size) // params.hop_size + 1


def spectrogram(audio: AudioBuffer, params: StftParams) -> Spectrogram:
    """Frame m covers samples [m*hop, m*hop + window); leftover tail samples are dropped."""
    x = np.asarray(audio.samples, dtype=np.float64)
    if x.size < params.window_size:
        raise ValueError(
            f"audio has {x.size} samples, shorter than one window ({params.window_size})")
    m = frame_count(x.size, params)
    view = np.lib.stride_tricks.sliding_window_view(x, params.window_size)[::params.hop_size][:m]
    windowed = view * make_window(params.window_kind, params.window_size)
    power = rfft_power(windowed, params.fft_size)
    power.setflags(write=False)
    return Spectrogram(power, params, audio.sample_rate)


def normalize_frame(frame) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 1:
        raise ValueError("expected a single frame (1-D)")
    if np.any(frame < 0):
        raise ValueError("power coefficients must be nonnegative")
    total = frame.sum()
    if not total > 0:
        raise DegenerateFrameError("all-zero frame")
    return frame / total


def normalize_block(frames) -> np.ndarray:
    """Divide an L x N block by its joint sum."""
    block = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    if block.ndim != 2 or block.shape[0] < 1:
        raise ValueError("expected an L x N block with L >= 1")
    if np.any(block < 0):
        raise ValueError("power coefficients must be nonnegative")
    total = block.sum()
    if not total > 0:
        raise DegenerateFrameError("all-zero block")
    return block / total
