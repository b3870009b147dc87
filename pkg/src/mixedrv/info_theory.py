"""Direct-sum information measures and the maximum-entropy mixed distribution.

The direct-sum entropy of a mixed variable is the Shannon entropy of its
face plus the expected differential entropy within the face; the analogous
KL decomposes the same way.  Both are estimated here by Monte Carlo for any
distribution exposing mutually consistent ``sample`` and ``log_density``.

``coding_entropy`` converts a direct-sum entropy into the average optimal
code length when continuous coordinates are kept at N-bit precision, and
the maxent family realizes the largest such value; its entropy equals the
log of a generalized Laguerre polynomial, which we evaluate both by the
three-term recurrence and by direct log-sum-exp of the defining series as
mutually validating code paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Protocol, runtime_checkable

import numpy as np
from scipy.special import gammaln, logsumexp

from .mixed_dirichlet import _dirichlet_draws
from .simplex import FaceIndexSet, ResourceLimitError, SimplexPoint, enumerate_faces

__all__ = [
    "MixedDistribution",
    "McEstimate",
    "KlMcEstimate",
    "direct_sum_entropy_mc",
    "direct_sum_kl_mc",
    "coding_entropy",
    "MaxEntMixed",
    "maxent_distribution",
    "maxent_entropy",
    "maxent_entropy_series",
    "maxent_log_weights",
    "maxent_sample",
    "laguerre_generalized",
]

_LN2 = math.log(2.0)


@runtime_checkable
class MixedDistribution(Protocol):
    """What a distribution must expose for the MC estimators below.

    ``sample`` and ``log_density`` must agree: minus the mean log-density of
    its own samples estimates the direct-sum entropy.
    """

    def sample(self, rng: np.random.Generator) -> tuple[FaceIndexSet, SimplexPoint]: ...

    def log_density(self, y: SimplexPoint) -> float: ...


class McEstimate(NamedTuple):
    estimate: float
    std_error: float


class KlMcEstimate(NamedTuple):
    estimate: float
    std_error: float
    support_violations: int = 0

    @property
    def is_infinite(self) -> bool:
        return self.support_violations > 0


def _draw(dist, n: int, rng: np.random.Generator):
    if hasattr(dist, "sample_many"):
        return dist.sample_many(n, rng)
    return [dist.sample(rng) for _ in range(n)]


def direct_sum_entropy_mc(dist: MixedDistribution, n: int, rng: np.random.Generator) -> McEstimate:
    """Monte Carlo direct-sum entropy: minus the mean log-density of draws."""
    if n < 2:
        raise ValueError("need n >= 2 for a standard error")
    logs = np.array([dist.log_density(y) for _, y in _draw(dist, n, rng)])
    return McEstimate(float(-logs.mean()), float(logs.std(ddof=1) / np.sqrt(n)))


def direct_sum_kl_mc(p: MixedDistribution, q: MixedDistribution, n: int,
                     rng: np.random.Generator) -> KlMcEstimate:
    """Monte Carlo direct-sum KL: mean of ``log p - log q`` under p's draws.

    If q assigns -inf log-density to any sampled point the divergence is
    structurally infinite (support mismatch); this is reported as an outcome
    rather than letting a float inf contaminate the average silently.
    """
    if n < 2:
        raise ValueError("need n >= 2 for a standard error")
    diffs = np.empty(n)
    violations = 0
    for i, (_, y) in enumerate(_draw(p, n, rng)):
        lq = q.log_density(y)
        if lq == -np.inf:
            violations += 1
            diffs[i] = np.inf
        else:
            diffs[i] = p.log_density(y) - lq
    if violations:
        return KlMcEstimate(np.inf, np.nan, violations)
    return KlMcEstimate(float(diffs.mean()), float(diffs.std(ddof=1) / np.sqrt(n)), 0)


def coding_entropy(face_probs: dict[FaceIndexSet, float], base_entropy: float, N: int) -> float:
    """Average optimal code length at N-bit precision, in nats.

    Adds ``N * ln 2`` nats per continuous dimension to the direct-sum
    entropy: ``H + N ln2 * sum_f dim(f) P(f)``.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    probs = np.array(list(face_probs.values()), dtype=float)
    if np.any(probs < -1e-10) or abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError("face probabilities must be nonnegative and sum to 1")
    expected_dim = sum(f.dim * p for f, p in face_probs.items())
    return float(base_entropy + N * _LN2 * expected_dim)


def laguerre_generalized(n: int, alpha: float, x: float) -> float:
    """Generalized Laguerre polynomial by the three-term recurrence."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def maxent_log_weights(K: int, N: int) -> np.ndarray:
    """Unnormalized log-probabilities of the face-dimension classes k=1..K:
    ``log C(K,k) + N(k-1) log2 - log (k-1)!``, all in log space."""
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if N < 0 or N != int(N):
        raise ValueError(f"N must be a nonnegative integer, got {N}")
    k = np.arange(1, K + 1)
    log_binom = gammaln(K + 1) - gammaln(k + 1) - gammaln(K - k + 1)
    return log_binom + N * (k - 1) * _LN2 - gammaln(k)


def maxent_entropy_series(K: int, N: int) -> float:
    """Maximal coding entropy by log-sum-exp of the defining series."""
    return float(logsumexp(maxent_log_weights(K, N)))


def maxent_entropy(K: int, N: int) -> float:
    """Maximal coding entropy at bit precision N: log of the generalized
    Laguerre polynomial of degree K-1 with parameter 1 at ``-2^N``."""
    maxent_log_weights(K, N)  # validate arguments identically to the series path
    return float(np.log(laguerre_generalized(K - 1, 1.0, -float(2.0**N))))


@dataclass(frozen=True, eq=False)
class MaxEntMixed:
    """The coding-entropy-maximizing mixed distribution on the simplex.

    Every face of dimension k-1 has the same probability ``g(k) / C(K,k)``
    and the conditional within each face is flat.
    """

    K: int
    N: int
    g: np.ndarray

    def __init__(self, K: int, N: int):
        logw = maxent_log_weights(K, N)
        g = np.exp(logw - logsumexp(logw))
        g.flags.writeable = False
        object.__setattr__(self, "K", int(K))
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "g", g)

    def face_log_prob(self, f: FaceIndexSet) -> float:
        k = f.size
        log_binom = float(gammaln(self.K + 1) - gammaln(k + 1) - gammaln(self.K - k + 1))
        return float(np.log(self.g[k - 1])) - log_binom

    def log_density(self, y: SimplexPoint) -> float:
        if y.K != self.K:
            raise ValueError(f"point has K={y.K}, distribution has K={self.K}")
        # flat conditional on a face with k vertices has density (k-1)!
        return self.face_log_prob(y.support) + float(gammaln(y.support.size))

    def sample(self, rng: np.random.Generator) -> tuple[FaceIndexSet, SimplexPoint]:
        return maxent_sample(self, rng)

    def sample_many(self, n: int, rng: np.random.Generator):
        masks = maxent_sample_face_masks(self, n, rng)
        out: list = [None] * n
        by_mask: dict[int, list[int]] = {}
        for i, m in enumerate(masks):
            by_mask.setdefault(int(m), []).append(i)
        for m in sorted(by_mask):
            rows = by_mask[m]
            f = FaceIndexSet(m, self.K)
            if f.size == 1:
                p = SimplexPoint.vertex(f.indices[0], self.K)
                for i in rows:
                    out[i] = (f, p)
                continue
            draws = _dirichlet_draws(np.ones(f.size), len(rows), rng)
            for i, r in zip(rows, draws):
                coords = np.zeros(self.K)
                coords[list(f.indices)] = r
                out[i] = (f, SimplexPoint(coords))
        return out

    def exact_face_distribution(self) -> dict[FaceIndexSet, float]:
        if self.K > 14:
            raise ResourceLimitError("face enumeration needs K <= 14")
        return {f: float(np.exp(self.face_log_prob(f))) for f in enumerate_faces(self.K)}

    def direct_sum_entropy(self) -> float:
        """Exact H(F) + E[flat entropy]; equals maxent_entropy at N=0."""
        k = np.arange(1, self.K + 1)
        log_binom = gammaln(self.K + 1) - gammaln(k + 1) - gammaln(self.K - k + 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(self.g > 0, self.g * (np.log(self.g) - log_binom), 0.0)
        return float(-terms.sum() - self.g @ gammaln(k))


def maxent_distribution(K: int, N: int) -> MaxEntMixed:
    return MaxEntMixed(K, N)


def maxent_sample_face_masks(d: MaxEntMixed, n: int, rng: np.random.Generator) -> np.ndarray:
    """n face bitmasks: dimension class from g, then a uniform subset of
    that size (the first k slots of a random permutation per row)."""
    if d.K > 63:
        raise ResourceLimitError("face sampling needs K <= 63 (bitmask storage)")
    ks = rng.choice(np.arange(1, d.K + 1), size=n, p=d.g)
    order = np.argsort(rng.random((n, d.K)), axis=1)
    chosen = np.arange(d.K)[None, :] < ks[:, None]
    return np.where(chosen, np.int64(1) << order, 0).sum(axis=1)


def maxent_sample(d: MaxEntMixed, rng: np.random.Generator) -> tuple[FaceIndexSet, SimplexPoint]:
    mask = int(maxent_sample_face_masks(d, 1, rng)[0])
    f = FaceIndexSet(mask, d.K)
    if f.size == 1:
        return f, SimplexPoint.vertex(f.indices[0], d.K)
    coords = np.zeros(d.K)
    coords[list(f.indices)] = _dirichlet_draws(np.ones(f.size), 1, rng)[0]
    return f, SimplexPoint(coords)
