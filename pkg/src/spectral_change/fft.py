"""Iterative radix-2 FFT over the last axis."""

from __future__ import annotations

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft(x) -> np.ndarray:
    """Unnormalized forward DFT, X[k] = sum_n x[n] exp(-2j pi k n / N).

    Decimation in time: bit-reversal reorder, then log2(N) butterfly
    stages, each applied to every row at once.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"FFT length must be a power of two, got {n}")
    lead = x.shape[:-1]
    x = x[..., bit_reverse_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = x.reshape(lead + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        x = np.concatenate((even + odd, even - odd), axis=-1).reshape(lead + (n,))
        size *= 2
    return x


def rfft_power(x, n: int) -> np.ndarray:
    """Squared magnitude of bins 0..n/2 after zero-padding rows of `x` to `n`."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] > n:
        raise ValueError("input longer than transform size")
    padded = np.zeros(x.shape[:-1] + (n,))
    padded[..., :x.shape[-1]] = x
    spec = fft(padded)[..., : n // 2 + 1]
    return spec.real ** 2 + spec.imag ** 2
