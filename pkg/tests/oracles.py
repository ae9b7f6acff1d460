"""Slow, direct reference computations used only by the tests."""

import math

import numpy as np


def direct_dft(x):
    """X[k] = sum_n x[n] exp(-2j pi k n / N), evaluated term by term."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        acc = 0j
        for t in range(n):
            acc += x[t] * complex(math.cos(-2 * math.pi * k * t / n),
                                  math.sin(-2 * math.pi * k * t / n))
        out[k] = acc
    return out


def direct_power_frames(samples, window, hop, fft_size):
    """Power spectrogram frame by frame with the direct DFT."""
    w = len(window)
    rows = []
    for start in range(0, len(samples) - w + 1, hop):
        frame = np.zeros(fft_size)
        frame[:w] = np.asarray(samples[start:start + w]) * window
        spec = direct_dft(frame)[: fft_size // 2 + 1]
        rows.append(np.abs(spec) ** 2)
    return np.array(rows)


def renyi_bruteforce(p, alpha):
    """Plain-loop evaluation in Python floats, limits taken by their closed forms."""
    terms = [v for v in p if v > 0]
    if alpha == 0:
        return math.log2(len(terms))
    if alpha == 1:
        return -sum(v * math.log2(v) for v in terms)
    return math.log2(sum(v ** alpha for v in terms)) / (1 - alpha)


def random_density(rng, n, zero_fraction=0.0):
    p = rng.exponential(size=n)
    if zero_fraction:
        p[rng.random(n) < zero_fraction] = 0.0
        if not p.any():
            p[0] = 1.0
    return p / p.sum()


def renyi_divergence_decimal(q, p, alpha, digits=40):
    """Renyi divergence in bits evaluated with `digits` significant decimal digits."""
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = digits
        a = Decimal(repr(float(alpha)))
        total = sum(Decimal(repr(float(x))) ** a * Decimal(repr(float(y))) ** (1 - a)
                    for x, y in zip(q, p) if x > 0)
        return float(total.ln() / Decimal(2).ln() / (a - 1))
