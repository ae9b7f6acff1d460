"""Audio input, synthetic test signals and event serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

__all__ = [
    "AudioBuffer",
    "ChangeEvent",
    "Segment",
    "SyntheticSpec",
    "WavFormatError",
    "load_wav",
    "write_wav",
    "synthesize",
    "load_synthetic_spec",
    "write_events",
]

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

METHODS = ("divergence", "prediction")
SEGMENT_KINDS = ("white_noise", "sine", "silence")


class WavFormatError(ValueError):
    """Raised for malformed or unsupported WAV content."""


@dataclass(frozen=True)
class AudioBuffer:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer holds mono samples (1-D)")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def scaled(self, factor: float) -> "AudioBuffer":
        return AudioBuffer(self.samples * factor, self.sample_rate)


@dataclass(frozen=True)
class ChangeEvent:
    """A detected spectral change at the frame entering the analysis."""

    frame_index: int
    time_s: float
    score: float
    method: str

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError("frame_index must be >= 0")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    @classmethod
    def at_frame(cls, frame_index: int, hop_size: int, sample_rate: int,
                 score: float, method: str) -> "ChangeEvent":
        return cls(frame_index, frame_index * hop_size / sample_rate, float(score), method)


@dataclass(frozen=True)
class Segment:
    kind: str
    duration_s: float
    amplitude: float = 1.0
    freq_hz: float | None = None

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if not self.duration_s > 0:
            raise ValueError("segment duration must be > 0")
        if self.kind == "sine" and (self.freq_hz is None or self.freq_hz < 0):
            raise ValueError("sine segment needs a nonnegative freq_hz")


@dataclass(frozen=True)
class SyntheticSpec:
    segments: tuple[Segment, ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("synthetic spec needs at least one segment")

    @classmethod
    def from_dict(cls, doc: dict) -> "SyntheticSpec":
        segments = []
        for raw in doc.get("segments", []):
            segments.append(Segment(
                kind=raw["kind"],
                duration_s=float(raw["duration_s"]),
                amplitude=float(raw.get("amplitude", 1.0)),
                freq_hz=None if raw.get("freq") is None else float(raw["freq"]),
            ))
        return cls(tuple(segments), int(doc.get("seed", 0)))

    def to_dict(self) -> dict:
        segs = []
        for s in self.segments:
            d = {"kind": s.kind, "duration_s": s.duration_s, "amplitude": s.amplitude}
            if s.freq_hz is not None:
                d["freq"] = s.freq_hz
            segs.append(d)
        return {"segments": segs, "seed": self.seed}


def load_synthetic_spec(path: str | Path) -> SyntheticSpec:
    with open(path, encoding="utf-8") as fh:
        return SyntheticSpec.from_dict(json.load(fh))


def _iter_chunks(data: bytes, start: int):
    pos = start
    while pos + 8 <= len(data):
        chunk_id, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8:pos + 8 + size]
        yield chunk_id, body
        # chunks are word aligned
        pos += 8 + size + (size & 1)


def load_wav(path: str | Path) -> AudioBuffer:
    """Decode a PCM WAV file into a mono buffer.

    Accepts 16-bit integer PCM and 32-bit IEEE float, plain or
    WAVE_FORMAT_EXTENSIBLE. Channels are averaged. 16-bit codes are
    divided by 32768 so that -32768 maps to exactly -1.0.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    for chunk_id, body in _iter_chunks(data, 12):
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavFormatError(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            tag = fmt[0]
            if tag == WAVE_FORMAT_EXTENSIBLE:
                if len(body) < 26:
                    raise WavFormatError(f"{path}: truncated extensible fmt chunk")
                # first two bytes of the SubFormat GUID carry the real tag
                tag = struct.unpack_from("<H", body, 24)[0]
                fmt = (tag,) + fmt[1:]
        elif chunk_id == b"data":
            payload = body
    if fmt is None or payload is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _, block_align, bits = fmt
    if channels < 1 or rate < 1:
        raise WavFormatError(f"{path}: invalid channel count or sample rate")
    if tag == WAVE_FORMAT_PCM and bits == 16:
        dtype, scale = np.dtype("<i2"), 1.0 / 32768.0
    elif tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        dtype, scale = np.dtype("<f4"), 1.0
    else:
        raise WavFormatError(
            f"{path}: unsupported encoding (format tag {tag:#06x}, {bits} bits)")

    frame_bytes = channels * dtype.itemsize
    n_frames = len(payload) // frame_bytes
    if n_frames == 0:
        raise WavFormatError(f"{path}: zero-length audio")
    raw = np.frombuffer(payload[:n_frames * frame_bytes], dtype=dtype)
    samples = raw.reshape(n_frames, channels).astype(np.float64) * scale
    return AudioBuffer(samples.mean(axis=1), rate)


def write_wav(path: str | Path, audio: AudioBuffer, float32: bool = False) -> None:
    """Write a mono WAV, 16-bit PCM by default or 32-bit float."""
    x = np.asarray(audio.samples, dtype=np.float64)
    if float32:
        tag, bits, body = WAVE_FORMAT_IEEE_FLOAT, 32, x.astype("<f4").tobytes()
    else:
        codes = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
        tag, bits, body = WAVE_FORMAT_PCM, 16, codes.tobytes()
    block_align = bits // 8
    fmt = struct.pack("<HHIIHH", tag, 1, audio.sample_rate,
                      audio.sample_rate * block_align, block_align, bits)
    riff = b"WAVE" + b"fmt " + struct.pack("<I", len(fmt)) + fmt
    riff += b"data" + struct.pack("<I", len(body)) + body
    if len(body) & 1:
        riff += b"\x00"
    Path(path).write_bytes(b"RIFF" + struct.pack("<I", len(riff)) + riff)


def synthesize(spec: SyntheticSpec, sample_rate: int) -> tuple[AudioBuffer, list[float]]:
    """Concatenate the segments of `spec` and report the inner boundaries in seconds.

    White noise is uniform on [-amplitude, amplitude], drawn from numpy's
    PCG64 generator seeded with ``spec.seed``; segments consume the stream
    in order. Each sine starts at phase zero at its own onset.
    """
    rng = np.random.default_rng(spec.seed)
    pieces = []
    boundaries = []
    total = 0
    for seg in spec.segments:
        n = int(round(seg.duration_s * sample_rate))
        if n <= 0:
            raise ValueError(f"segment of {seg.duration_s} s is empty at {sample_rate} Hz")
        if seg.kind == "white_noise":
            x = rng.uniform(-seg.amplitude, seg.amplitude, size=n)
        elif seg.kind == "sine":
            t = np.arange(n) / sample_rate
            x = seg.amplitude * np.sin(2.0 * math.pi * seg.freq_hz * t)
        else:
            x = np.zeros(n)
        pieces.append(x)
        total += n
        boundaries.append(total / sample_rate)
    return AudioBuffer(np.concatenate(pieces), sample_rate), boundaries[:-1]


def _check_sorted(events: Sequence[ChangeEvent]) -> None:
    for prev, cur in zip(events, events[1:]):
        if cur.frame_index < prev.frame_index:
            raise ValueError("events must be sorted by frame_index")


FIELDS = ("frame_index", "time_s", "score", "method")


def _json_number(x: float) -> str:
    # JSON has no inf/nan literal
    return json.dumps(x) if math.isfinite(x) else "null"


def _format_events(events: Sequence[ChangeEvent], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELDS)
        for ev in events:
            writer.writerow([ev.frame_index, f"{ev.time_s:.9f}", repr(ev.score), ev.method])
        return buf.getvalue()
    if fmt == "json":
        # hand-assembled so time_s keeps a fixed number of decimals
        rows = [
            "{"
            f'"frame_index": {ev.frame_index}, "time_s": {ev.time_s:.9f}, '
            f'"score": {_json_number(ev.score)}, "method": {json.dumps(ev.method)}'
            "}"
            for ev in events
        ]
        return "[\n" + ",\n".join("  " + r for r in rows) + ("\n" if rows else "") + "]\n"
    raise ValueError(f"unknown event format {fmt!r}")


def write_events(events: Iterable[ChangeEvent], fmt: str, path: str | Path | TextIO) -> None:
    """Write events as CSV (header ``frame_index,time_s,score,method``) or a JSON array.

    `path` may also be an open text stream. Events must already be sorted
    by frame index.
    """
    events = list(events)
    _check_sorted(events)
    text = _format_events(events, fmt)
    if hasattr(path, "write"):
        path.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
