import csv
import json
import math

import numpy as np
import pytest

from conftest import FIXTURES
from spectral_change.cli import main, parse_grid
from spectral_change.signal_io import AudioBuffer, write_wav
from spectral_change.stft import StftParams, frame_count

NOISE_TONE = str(FIXTURES / "noise_tone.json")
TONE = str(FIXTURES / "stationary_tone.json")


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestDetect:
    def test_prediction_on_fixture(self, tmp_path, capsys):
        out = tmp_path / "ev.csv"
        code = main(["detect", NOISE_TONE, "--method", "prediction", "--alpha", "2",
                     "--trigger-mode", "two_sided_deviation", "--threshold", "0.05", "-o", str(out)])
        assert code == 0
        rows = _rows(out)
        assert rows[0] == ["frame_index", "time_s", "score", "method"]
        assert len(rows) == 2
        assert abs(float(rows[1][1]) - 1.0) <= 5 * 256 / 8000
        summary = capsys.readouterr().out
        assert summary.startswith("1 events")
        assert "prediction" in summary and "alpha 2" in summary and "threshold 0.05" in summary

    def test_divergence_json(self, tmp_path, calibration):
        out = tmp_path / "ev.json"
        thr = calibration["detectors"]["divergence"]["threshold"]
        code = main(["detect", NOISE_TONE, "--method", "divergence", "--threshold", str(thr),
                     "--format", "json", "-o", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc) == 1 and doc[0]["method"] == "divergence"

    def test_stationary_tone_header_only(self, tmp_path):
        out = tmp_path / "ev.csv"
        assert main(["detect", TONE, "--threshold", "1.05", "-o", str(out)]) == 0
        assert out.read_text() == "frame_index,time_s,score,method\n"

    def test_events_to_stdout(self, capsys):
        assert main(["detect", TONE]) == 0
        captured = capsys.readouterr()
        assert captured.out == "frame_index,time_s,score,method\n"
        assert captured.err.startswith("0 events")

    def test_wav_input(self, tmp_path):
        t = np.arange(16000) / 8000
        x = np.where(t < 1.0, 0.4 * np.sin(2 * np.pi * 300 * t), 0.4 * np.sin(2 * np.pi * 1300 * t))
        wav = tmp_path / "two_tones.wav"
        write_wav(wav, AudioBuffer(x, 8000))
        out = tmp_path / "ev.csv"
        assert main(["detect", str(wav), "--method", "divergence", "--threshold", "3", "-o", str(out)]) == 0
        rows = _rows(out)[1:]
        assert rows and all(abs(float(r[1]) - 1.0) < 0.2 for r in rows)

    def test_no_merge_reports_more(self, tmp_path):
        args = ["detect", NOISE_TONE, "--trigger-mode", "two_sided_deviation", "--threshold", "0.03"]
        merged, raw = tmp_path / "m.csv", tmp_path / "r.csv"
        main(args + ["-o", str(merged)])
        main(args + ["--no-merge", "-o", str(raw)])
        assert len(_rows(raw)) > len(_rows(merged))

    def test_seed_override(self, tmp_path):
        out_a, out_b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        main(["spectrogram", NOISE_TONE, "--seed", "1", "-o", str(out_a)])
        main(["spectrogram", NOISE_TONE, "--seed", "2", "-o", str(out_b)])
        assert out_a.read_text() != out_b.read_text()

    def test_emit_spectrogram(self, tmp_path):
        tsv = tmp_path / "spec.tsv"
        assert main(["detect", NOISE_TONE, "--emit-spectrogram", str(tsv), "-o", str(tmp_path / "e.csv")]) == 0
        lines = tsv.read_text().splitlines()
        assert lines[0].startswith("# a=")
        assert len(lines) - 1 == frame_count(16000, StftParams())

    @pytest.mark.parametrize("flags", [
        ["--fft-size", "1000"],
        ["--hop-size", "0"],
        ["--threshold", "0"],
        ["--mean-len", "1"],
        ["--alpha", "-1"],
        ["--method", "hmm"],
        ["--format", "xml"],
        ["--bogus"],
    ])
    def test_usage_errors(self, flags, tmp_path):
        assert main(["detect", TONE, "-o", str(tmp_path / "e.csv")] + flags) == 1

    def test_missing_input(self, tmp_path, capsys):
        assert main(["detect", str(tmp_path / "missing.wav")]) == 2
        assert "missing.wav" in capsys.readouterr().err

    def test_bad_wav(self, tmp_path):
        bad = tmp_path / "bad.wav"
        bad.write_bytes(b"RIFF\x04\x00\x00\x00WAVE")
        assert main(["detect", str(bad)]) == 2

    def test_too_short(self, tmp_path):
        wav = tmp_path / "short.wav"
        write_wav(wav, AudioBuffer(np.zeros(100), 8000))
        assert main(["detect", str(wav)]) == 2

    def test_unwritable_output(self, tmp_path):
        assert main(["detect", TONE, "-o", str(tmp_path / "nodir" / "e.csv")]) == 2

    def test_defaults_are_the_reference_grid(self):
        from spectral_change.cli import build_parser
        args = build_parser().parse_args(["detect", "x.wav"])
        assert (args.window_size, args.hop_size, args.fft_size) == (1024, 256, 2048)
        assert (args.mean_len, args.block_len) == (20, 6)


class TestAlphaSweep:
    def test_table(self, tmp_path):
        out = tmp_path / "sweep.tsv"
        assert main(["alpha-sweep", "--seed", "0", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        header = lines[0].split("\t")
        assert header[0] == "M" and header[1] == "0" and header[-1] == "30"
        table = np.array([[float(v) for v in line.split("\t")] for line in lines[1:]])
        assert table[:, 0].tolist() == list(range(10, 101, 10))
        h = table[:, 1:]
        np.testing.assert_allclose(h[:, 0], math.log2(100), atol=1e-9)
        assert np.all(np.diff(h, axis=1) <= 1e-9)
        assert h[0, -1] < h[8, -1]

    def test_deterministic(self, capsys):
        main(["alpha-sweep", "--alphas", "0,1,2", "--m-values", "5,50"])
        first = capsys.readouterr().out
        main(["alpha-sweep", "--alphas", "0,1,2", "--m-values", "5,50"])
        assert capsys.readouterr().out == first

    @pytest.mark.parametrize("flags", [["--m-values", "0,10"], ["--m-values", "101"],
                                       ["--alphas=-1,2"], ["--alphas", "a,b"],
                                       ["--m-values", "1.5"], ["--alphas", "0:30:0"]])
    def test_invalid_grid(self, flags):
        assert main(["alpha-sweep"] + flags) == 1


class TestSpectrogramCommand:
    def test_zero_signal(self, tmp_path):
        wav = tmp_path / "z.wav"
        write_wav(wav, AudioBuffer(np.zeros(4000), 8000))
        out = tmp_path / "z.tsv"
        assert main(["spectrogram", str(wav), "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        header = dict(kv.split("=") for kv in lines[0][2:].split("\t"))
        assert float(header["a"]) == 256 / 8000
        assert float(header["b"]) == 8000 / 2048
        assert int(header["N"]) == 1025
        assert int(header["M"]) == (4000 - 1024) // 256 + 1 == len(lines) - 1
        rows = np.loadtxt(out, comments="#", delimiter="\t")
        assert rows.shape == (12, 1025) and not rows.any()


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("10:100:10", int) == list(range(10, 101, 10))
    assert parse_grid("1, 2,3") == [1.0, 2.0, 3.0]
