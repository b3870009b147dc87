"""Brute-force reference implementations for cross-checking.

Everything here is deliberately naive: exhaustive enumeration over all
2^K - 1 faces, explicit active-set search for the simplex projection, and
central finite differences.  None of it shares code with the production
paths it validates.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .simplex import FaceIndexSet, enumerate_faces

__all__ = [
    "brute_force_sparsemax",
    "face_score_table",
    "enum_log_normalizer",
    "enum_expected_suff_stats",
    "enum_face_probs",
    "enum_entropy",
    "enum_kl",
    "enum_most_probable_face",
    "central_difference_gradient",
    "central_difference_jacobian",
]


def brute_force_sparsemax(z) -> np.ndarray:
    """Simplex projection by exhaustive active-set search.

    For each candidate support S, the equality-constrained minimizer is
    ``z_S - (sum(z_S) - 1) / |S|``; it solves the full problem iff it is
    feasible (all positive) and dominates every alternative in distance.
    We simply take the feasible candidate with the smallest distance.
    """
    z = np.asarray(z, dtype=float)
    K = z.size
    best, best_dist = None, np.inf
    for f in enumerate_faces(K):
        idx = list(f.indices)
        tau = (z[idx].sum() - 1.0) / len(idx)
        y = np.zeros(K)
        y[idx] = z[idx] - tau
        if np.any(y[idx] < 0.0):
            continue
        dist = float(np.sum((y - z) ** 2))
        if dist < best_dist:
            best, best_dist = y, dist
    return best


def face_score_table(K: int) -> np.ndarray:
    """(2^K - 1, K) matrix of +/-1 statistics, rows in bitmask order."""
    masks = np.arange(1, 1 << K)
    bits = (masks[:, None] >> np.arange(K)[None, :]) & 1
    return 2.0 * bits - 1.0


def enum_log_normalizer(w) -> float:
    w = np.asarray(w, dtype=float)
    return float(logsumexp(face_score_table(w.size) @ w))


def enum_face_probs(w) -> dict[FaceIndexSet, float]:
    w = np.asarray(w, dtype=float)
    scores = face_score_table(w.size) @ w
    probs = np.exp(scores - logsumexp(scores))
    return {f: float(p) for f, p in zip(enumerate_faces(w.size), probs)}


def enum_expected_suff_stats(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    phi = face_score_table(w.size)
    scores = phi @ w
    probs = np.exp(scores - logsumexp(scores))
    return probs @ phi


def enum_entropy(w) -> float:
    w = np.asarray(w, dtype=float)
    scores = face_score_table(w.size) @ w
    logp = scores - logsumexp(scores)
    return float(-np.sum(np.exp(logp) * logp))


def enum_kl(w, v) -> float:
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    phi = face_score_table(w.size)
    logp = phi @ w - logsumexp(phi @ w)
    logq = phi @ v - logsumexp(phi @ v)
    return float(np.sum(np.exp(logp) * (logp - logq)))


def enum_most_probable_face(w) -> FaceIndexSet:
    w = np.asarray(w, dtype=float)
    scores = face_score_table(w.size) @ w
    return enumerate_faces(w.size)[int(np.argmax(scores))]


def central_difference_gradient(fn, x, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def central_difference_jacobian(fn, x, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of a vector function."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((fn(x + e) - fn(x - e)) / (2.0 * h))
    return np.stack(cols, axis=1)
