"""Renyi entropy and Renyi information (divergence) on discrete densities, in bits.

Order 1 is served by the Shannon entropy / Kullback divergence closed
forms and order 0 by support counting, never by evaluating the general
formula near its singularity.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DEFAULT_FLOOR",
    "renyi_entropy",
    "shannon_entropy",
    "renyi_divergence",
    "kullback_divergence",
    "floor_density",
    "block_entropy",
    "predicted_entropy",
    "rearrangement_check",
]

LN2 = math.log(2.0)
UNIT_SUM_TOL = 1e-9
# above this order, p**alpha is summed in log space to avoid underflow
LOG_SPACE_ALPHA = 8.0
DEFAULT_FLOOR = 1e-12


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 0 or math.isinf(alpha):
        raise ValueError(f"alpha must be a finite value >= 0, got {alpha}")
    return alpha


def _density(p, name="p") -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).ravel()
    if p.size == 0:
        raise ValueError(f"{name} is empty")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > UNIT_SUM_TOL:
        raise ValueError(f"{name} is not normalized (sum={p.sum()!r})")
    return p


def _log2_weighted_exp(w: np.ndarray, t: np.ndarray) -> float:
    """log2(sum w * exp(t)) for unit-sum weights w.

    Around t = 0 (orders near 1) the sum is formed as 1 + sum w*expm1(t)
    so the result does not drown in cancellation; tiny sums and huge
    exponents go through log-sum-exp instead.
    """
    if t.max() < 700.0:
        s = float(np.dot(w, np.expm1(t)))
        if s > -0.5:
            return math.log1p(s) / LN2
    return float(np.logaddexp.reduce(np.log(w) + t)) / LN2


def shannon_entropy(p) -> float:
    p = _density(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def renyi_entropy(p, alpha: float) -> float:
    """H_alpha[p] = log2(sum p**alpha) / (1 - alpha).

    `p` may be a frame or a block; blocks are flattened.
    """
    alpha = _check_alpha(alpha)
    p = _density(p)
    nz = p[p > 0]
    if alpha == 0.0:
        return math.log2(nz.size)
    if alpha == 1.0:
        return float(-np.sum(nz * np.log2(nz)))
    if alpha > LOG_SPACE_ALPHA:
        log_sum = float(np.logaddexp.reduce(alpha * np.log(nz))) / LN2
    else:
        # sum p**alpha == sum p * exp((alpha - 1) log p)
        log_sum = _log2_weighted_exp(nz / nz.sum(), (alpha - 1.0) * np.log(nz))
    return log_sum / (1.0 - alpha)


def floor_density(p, floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Raise every entry to at least floor/N, then renormalize."""
    p = np.asarray(p, dtype=np.float64).ravel()
    if floor <= 0:
        return p
    p = np.maximum(p, floor / p.size)
    return p / p.sum()


def kullback_divergence(q, p) -> float:
    """sum q log2(q/p); bins where q is zero contribute nothing."""
    q = _density(q, "q")
    p = _density(p, "p")
    if q.shape != p.shape:
        raise ValueError(f"length mismatch: {q.size} vs {p.size}")
    mask = q > 0
    if np.any(p[mask] == 0):
        raise ValueError("divergence undefined: q is nonzero where p is zero")
    return float(np.sum(q[mask] * (np.log2(q[mask]) - np.log2(p[mask]))))


def renyi_divergence(q, p, alpha: float, floor: float = DEFAULT_FLOOR) -> float:
    """I_alpha(q, p) = log2(sum q**alpha / p**(alpha - 1)) / (alpha - 1).

    Both densities are floored at ``floor / N`` and renormalized first so
    that they share the same (full) support; ``floor=0`` disables this.
    """
    alpha = _check_alpha(alpha)
    q = _density(q, "q")
    p = _density(p, "p")
    if q.shape != p.shape:
        raise ValueError(f"length mismatch: {q.size} vs {p.size}")
    q = floor_density(q, floor)
    p = floor_density(p, floor)
    mask = q > 0
    if np.any(p[mask] == 0):
        raise ValueError("divergence undefined: q is nonzero where p is zero")
    qm, pm = q[mask], p[mask]
    if alpha == 1.0:
        return float(np.sum(qm * (np.log2(qm) - np.log2(pm))))
    if alpha == 0.0:
        # q**0 counts the support of q
        return -math.log2(float(pm.sum()))
    # sum q**alpha / p**(alpha-1) == sum q * exp((alpha - 1) log(q / p))
    t = (alpha - 1.0) * (np.log(qm) - np.log(pm))
    return _log2_weighted_exp(qm / qm.sum(), t) / (alpha - 1.0)


def block_entropy(block, a: float, b: float, alpha: float) -> float:
    """Renyi entropy of a unit-sum block plus the lattice term log2(a*b)."""
    if not (a > 0 and b > 0):
        raise ValueError(f"lattice steps must be positive, got a={a}, b={b}")
    return renyi_entropy(block, alpha) + math.log2(a * b)


def predicted_entropy(current: float, n_frames: int) -> float:
    """Expected entropy after appending one frame iso-entropic with the block.

    A block of L rearranged copies of one frame has entropy H + log2(L), so
    one more copy adds log2((L + 1) / L).
    """
    if n_frames < 1:
        raise ValueError(f"block length must be >= 1, got {n_frames}")
    return current + math.log2((n_frames + 1) / n_frames)


def rearrangement_check(frame_a, frame_b, atol: float = 1e-12) -> bool:
    """True when the two frames hold the same coefficients up to reordering."""
    a = np.sort(np.asarray(frame_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(frame_b, dtype=np.float64).ravel())
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return bool(np.all(np.abs(a - b) <= atol))
