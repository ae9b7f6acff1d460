"""Command-line driver: ``detect``, ``alpha-sweep`` and ``spectrogram``.

Exit codes: 0 success, 1 usage or validation error, 2 I/O or data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .detectors import (
    DEFAULT_DIV_OFFSET,
    RESTART_POLICIES,
    TRIGGER_MODES,
    DetectorConfig,
    run_detector,
)
from .infomeasures import DEFAULT_FLOOR
from .signal_io import METHODS, AudioBuffer, load_synthetic_spec, load_wav, synthesize, write_events
from .stft import Spectrogram, StftParams, spectrogram
from .sweep import DRAWS, alpha_sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

DEFAULT_SWEEP_M = "10:100:10"
DEFAULT_SWEEP_ALPHAS = "0:30:0.5"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str, kind=float) -> list:
    """'a,b,c' or an inclusive range 'start:stop:step'."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(n)]
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None
    if not values:
        raise UsageError(f"empty grid {text!r}")
    if kind is int:
        if any(v != int(v) for v in values):
            raise UsageError(f"grid {text!r} must hold integers")
        values = [int(v) for v in values]
    return values


def _add_stft_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("analysis grid")
    g.add_argument("--window-size", type=int, default=1024)
    g.add_argument("--hop-size", type=int, default=256)
    g.add_argument("--fft-size", type=int, default=2048)


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="PCM WAV file, or a synthetic-spec JSON document (*.json)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the seed of a synthetic spec")
    p.add_argument("--sample-rate", type=int, default=8000,
                   help="rate used to render a synthetic spec (default 8000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spectral-change", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    det = sub.add_parser("detect", help="run a change detector and write events")
    _add_input_args(det)
    _add_stft_args(det)
    det.add_argument("--method", choices=METHODS, default="prediction")
    det.add_argument("--alpha", type=float, default=2.0)
    det.add_argument("--threshold", type=float, default=DetectorConfig.threshold)
    det.add_argument("--trigger-mode", choices=TRIGGER_MODES, default="ratio_above")
    det.add_argument("--restart-policy", choices=RESTART_POLICIES, default="continue_sliding")
    det.add_argument("--mean-len", type=int, default=20)
    det.add_argument("--block-len", type=int, default=6)
    det.add_argument("--floor", type=float, default=DEFAULT_FLOOR,
                     help="relative floor applied before divergences (0 disables)")
    det.add_argument("--div-offset", type=float, default=DEFAULT_DIV_OFFSET,
                     help="bits added to both divergences before their ratio")
    det.add_argument("--no-merge", action="store_true",
                     help="report every triggering frame instead of one per run")
    det.add_argument("-o", "--output", default=None,
                     help="event file (default: standard output)")
    det.add_argument("--format", choices=("csv", "json"), default="csv")
    det.add_argument("--emit-spectrogram", metavar="PATH", default=None,
                     help="also dump the power spectrogram as TSV")

    sw = sub.add_parser("alpha-sweep", help="entropy of attenuated random vectors over alpha")
    sw.add_argument("--bins", type=int, default=100)
    sw.add_argument("--m-values", default=DEFAULT_SWEEP_M,
                    help="comma list or start:stop:step (default %(default)s)")
    sw.add_argument("--alphas", default=DEFAULT_SWEEP_ALPHAS,
                    help="comma list or start:stop:step (default %(default)s)")
    sw.add_argument("--draw", choices=DRAWS, default="uniform")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("-o", "--output", default=None)

    sg = sub.add_parser("spectrogram", help="dump the power spectrogram as TSV")
    _add_input_args(sg)
    _add_stft_args(sg)
    sg.add_argument("-o", "--output", default=None)
    return parser


def load_input(path: str, seed: int | None, sample_rate: int) -> AudioBuffer:
    if Path(path).suffix.lower() == ".json":
        spec = load_synthetic_spec(path)
        if seed is not None:
            spec = type(spec)(spec.segments, seed)
        audio, _ = synthesize(spec, sample_rate)
        return audio
    return load_wav(path)


def write_spectrogram_tsv(spec: Spectrogram, out: TextIO) -> None:
    out.write(f"# a={spec.time_step_a!r}\tb={spec.freq_step_b!r}\t"
              f"N={spec.n_bins}\tM={spec.n_frames}\n")
    np.savetxt(out, spec.frames, fmt="%.10g", delimiter="\t", newline="\n")


def write_sweep_tsv(table: np.ndarray, m_values, alphas, out: TextIO) -> None:
    out.write("M\t" + "\t".join(f"{a:g}" for a in alphas) + "\n")
    for m, row in zip(m_values, table):
        out.write(f"{m}\t" + "\t".join(f"{h:.10g}" for h in row) + "\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return _NoClose(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="")


class _NoClose:
    def __init__(self, stream):
        self.stream = stream

    def __enter__(self):
        return self.stream

    def __exit__(self, *exc):
        self.stream.flush()


def cmd_detect(args) -> int:
    try:
        stft = StftParams(args.window_size, args.hop_size, args.fft_size)
        config = DetectorConfig(
            alpha=args.alpha, threshold=args.threshold, mean_len=args.mean_len,
            block_len=args.block_len, trigger_mode=args.trigger_mode,
            restart_policy=args.restart_policy, floor=args.floor,
            div_offset=args.div_offset, merge=not args.no_merge)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    audio = load_input(args.input, args.seed, args.sample_rate)
    events = run_detector(audio, stft, config, args.method)
    if args.emit_spectrogram:
        with _open_out(args.emit_spectrogram) as fh:
            write_spectrogram_tsv(spectrogram(audio, stft), fh)
    if args.output is None:
        write_events(events, args.format, sys.stdout)
        summary_stream = sys.stderr
    else:
        write_events(events, args.format, args.output)
        summary_stream = sys.stdout
    print(f"{len(events)} events | duration {audio.duration_s:.3f} s | method {args.method} "
          f"| alpha {args.alpha:g} | threshold {args.threshold:g}", file=summary_stream)
    return EXIT_OK


def cmd_alpha_sweep(args) -> int:
    m_values = parse_grid(args.m_values, int)
    alphas = parse_grid(args.alphas)
    if any(not 1 <= m <= args.bins for m in m_values):
        raise UsageError(f"every M must lie in [1, {args.bins}]")
    if any(a < 0 for a in alphas):
        raise UsageError("alpha grid must be nonnegative")
    table = alpha_sweep(args.bins, m_values, alphas, args.seed, args.draw)
    with _open_out(args.output) as fh:
        write_sweep_tsv(table, m_values, alphas, fh)
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    try:
        stft = StftParams(args.window_size, args.hop_size, args.fft_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    audio = load_input(args.input, args.seed, args.sample_rate)
    with _open_out(args.output) as fh:
        write_spectrogram_tsv(spectrogram(audio, stft), fh)
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "alpha-sweep": cmd_alpha_sweep,
    "spectrogram": cmd_spectrogram,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"spectral-change: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # reader went away (e.g. `| head`); stop quietly
        sys.stdout = None
        return EXIT_OK
    except (OSError, ValueError, KeyError) as exc:
        print(f"spectral-change: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
