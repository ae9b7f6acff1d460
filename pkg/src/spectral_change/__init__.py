"""Spectral change detection from Renyi information measures on spectrograms."""

from .detectors import (
    DetectorConfig,
    detect_divergence,
    detect_prediction,
    mean_spectrum,
    run_detector,
)
from .infomeasures import (
    block_entropy,
    kullback_divergence,
    predicted_entropy,
    rearrangement_check,
    renyi_divergence,
    renyi_entropy,
    shannon_entropy,
)
from .signal_io import (
    AudioBuffer,
    ChangeEvent,
    Segment,
    SyntheticSpec,
    WavFormatError,
    load_wav,
    synthesize,
    write_events,
)
from .stft import (
    DegenerateFrameError,
    Spectrogram,
    StftParams,
    make_window,
    normalize_block,
    normalize_frame,
    spectrogram,
)

__version__ = "0.1.0"
