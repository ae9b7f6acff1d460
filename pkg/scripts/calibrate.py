"""Derive detection thresholds for the noise -> tone fixture and freeze them.

For each detector the trigger statistic is traced over the fixture and
over the stationary tone. The threshold is the geometric mean of the
peak statistic inside the boundary window and the largest statistic
anywhere else, so both margins are equal on a log scale.

Run from the repository root:  python scripts/calibrate.py
"""

import json
import math
from pathlib import Path

from spectral_change.detectors import DetectorConfig, divergence_scores, prediction_scores
from spectral_change.signal_io import load_synthetic_spec, synthesize
from spectral_change.stft import StftParams, spectrogram

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
SAMPLE_RATE = 8000
ALPHA = 2.0
WINDOW_FRAMES = 5

PLAN = {
    "divergence": (divergence_scores, "ratio_above"),
    "prediction": (prediction_scores, "two_sided_deviation"),
}


def statistic(score, mode):
    return score if mode == "ratio_above" else abs(score - 1.0)


def main():
    params = StftParams()
    audio, changes = synthesize(load_synthetic_spec(FIXTURES / "noise_tone.json"), SAMPLE_RATE)
    tone, _ = synthesize(load_synthetic_spec(FIXTURES / "stationary_tone.json"), SAMPLE_RATE)
    fixture_spec = spectrogram(audio, params)
    tone_spec = spectrogram(tone, params)
    boundary = changes[0] * SAMPLE_RATE / params.hop_size

    out = {"sample_rate": SAMPLE_RATE, "alpha": ALPHA, "boundary_frame": boundary,
           "window_frames": WINDOW_FRAMES, "detectors": {}}
    for method, (trace, mode) in PLAN.items():
        config = DetectorConfig(alpha=ALPHA, trigger_mode=mode)
        inside, outside = [], []
        for m, score in trace(fixture_spec, config):
            (inside if abs(m - boundary) <= WINDOW_FRAMES else outside).append(statistic(score, mode))
        outside += [statistic(s, mode) for _, s in trace(tone_spec, config)]
        peak, clutter = max(inside), max(outside)
        if peak <= clutter:
            raise SystemExit(f"{method}: boundary peak {peak} does not clear clutter {clutter}")
        threshold = float(f"{math.sqrt(peak * clutter):.3g}")
        out["detectors"][method] = {
            "trigger_mode": mode, "threshold": threshold,
            "boundary_peak": peak, "max_elsewhere": clutter,
        }
        print(f"{method:10s} mode={mode:20s} peak={peak:.4g} clutter={clutter:.4g} "
              f"threshold={threshold}")
    (FIXTURES / "calibration.json").write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
