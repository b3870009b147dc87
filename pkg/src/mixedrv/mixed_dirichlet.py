"""Intrinsic mixed distribution: Gibbs over faces, Dirichlet within each face.

A draw first picks a face from the Gibbs family (module ``face_gibbs``) and
then a point of that face from a Dirichlet whose concentrations are the
coordinates of a single length-K vector restricted to the face's vertices.
Densities are taken with respect to the direct-sum base measure: Lebesgue on
the face's free coordinates for positive-dimensional faces, counting measure
on vertices (log-density contribution 0 there).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

from . import face_gibbs
from .simplex import FaceIndexSet, ResourceLimitError, SimplexPoint, enumerate_faces

__all__ = [
    "MixedDirichlet",
    "FullFaceDirichlet",
    "dirichlet_entropy",
    "dirichlet_kl",
    "dirichlet_log_pdf",
    "sample",
    "sample_many",
    "log_density",
    "entropy",
    "kl_mixed",
]

#: Faces are enumerated exactly only up to this K; beyond it use MC modes.
EXACT_ENUM_MAX_K = 14

#: Smallest value a Dirichlet coordinate is allowed to keep after the
#: underflow guard; draws are renormalized after clamping.
UNDERFLOW_FLOOR = 1e-300


def _check_alpha(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1 or alpha.size < 1:
        raise ValueError("concentration must be a nonempty vector")
    if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0.0):
        raise ValueError(f"concentrations must be finite and > 0, got {alpha}")
    return alpha


def dirichlet_log_pdf(y_restricted, alpha_restricted) -> float:
    """Dirichlet log-density at a point of the face's relative interior.

    ``y_restricted`` are the strictly positive coordinates; the density is
    w.r.t. Lebesgue measure on all but one of them (the value does not
    depend on which one is dropped).  Length-1 inputs are vertices, where
    the counting measure makes the contribution 0.
    """
    alpha = _check_alpha(alpha_restricted)
    y = np.asarray(y_restricted, dtype=float)
    if y.shape != alpha.shape:
        raise ValueError(f"shape mismatch: y {y.shape} vs alpha {alpha.shape}")
    if alpha.size == 1:
        return 0.0
    if np.any(y <= 0.0):
        raise ValueError("point has a zero coordinate inside its face")
    log_beta = gammaln(alpha).sum() - gammaln(alpha.sum())
    return float((alpha - 1.0) @ np.log(y) - log_beta)


def dirichlet_entropy(alpha_restricted) -> float:
    """Differential entropy of a Dirichlet, closed form.

    ``log B(a) + (a0 - m) psi(a0) - sum_k (a_k - 1) psi(a_k)`` with
    ``a0 = sum a_k`` and ``m`` the number of components.  For a single
    component (a vertex face) this is exactly 0.
    """
    alpha = _check_alpha(alpha_restricted)
    a0 = alpha.sum()
    log_beta = gammaln(alpha).sum() - gammaln(a0)
    return float(log_beta + (a0 - alpha.size) * digamma(a0) - (alpha - 1.0) @ digamma(alpha))


def dirichlet_kl(alpha_p, alpha_q) -> float:
    """KL between Dirichlets on the same face, closed form."""
    ap = _check_alpha(alpha_p)
    aq = _check_alpha(alpha_q)
    if ap.shape != aq.shape:
        raise ValueError(f"dimension mismatch: {ap.shape} vs {aq.shape}")
    log_beta_p = gammaln(ap).sum() - gammaln(ap.sum())
    log_beta_q = gammaln(aq).sum() - gammaln(aq.sum())
    return float(log_beta_q - log_beta_p + (ap - aq) @ (digamma(ap) - digamma(ap.sum())))


@dataclass(frozen=True, eq=False)
class MixedDirichlet:
    """Gibbs face distribution plus one concentration per vertex."""

    faces: face_gibbs.GibbsFaceDistribution
    alpha: np.ndarray

    def __init__(self, w, alpha):
        faces = w if isinstance(w, face_gibbs.GibbsFaceDistribution) else face_gibbs.GibbsFaceDistribution(w)
        alpha = _check_alpha(alpha)
        if alpha.size != faces.K:
            raise ValueError(f"alpha has length {alpha.size}, expected {faces.K}")
        alpha = alpha.copy()
        alpha.flags.writeable = False
        object.__setattr__(self, "faces", faces)
        object.__setattr__(self, "alpha", alpha)

    @property
    def K(self) -> int:
        return self.faces.K

    def alpha_on(self, f: FaceIndexSet) -> np.ndarray:
        return self.alpha[list(f.indices)]

    # MixedDistribution capability
    def sample(self, rng: np.random.Generator):
        return sample(self, rng)

    def sample_many(self, n: int, rng: np.random.Generator):
        return sample_many(self, n, rng)

    def log_density(self, y: SimplexPoint) -> float:
        return log_density(self, y)

    def exact_face_distribution(self) -> dict[FaceIndexSet, float]:
        if self.K > EXACT_ENUM_MAX_K:
            raise ResourceLimitError(f"face enumeration needs K <= {EXACT_ENUM_MAX_K}")
        return {
            f: float(np.exp(face_gibbs.face_log_prob(self.faces, f)))
            for f in enumerate_faces(self.K)
        }


def _dirichlet_draws(alpha: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """n Dirichlet rows via normalized Gammas, with an exact-zero guard.

    Gamma draws with small shape can underflow to exact 0.0; such rows are
    resampled once, then any remaining zeros are clamped to a tiny floor and
    the row renormalized, so the restricted coordinates of a sampled point
    are always strictly positive.
    """
    g = rng.gamma(alpha, size=(n, alpha.size))
    bad = np.nonzero(np.any(g == 0.0, axis=1))[0]
    if bad.size:
        g[bad] = rng.gamma(alpha, size=(bad.size, alpha.size))
        g = np.maximum(g, UNDERFLOW_FLOOR)
    return g / g.sum(axis=1, keepdims=True)


def _embed(face: FaceIndexSet, restricted: np.ndarray, K: int) -> SimplexPoint:
    coords = np.zeros(K)
    coords[list(face.indices)] = restricted
    return SimplexPoint(coords)


def sample(md: MixedDirichlet, rng: np.random.Generator) -> tuple[FaceIndexSet, SimplexPoint]:
    """One draw: a face, then a Dirichlet point embedded in it."""
    f = face_gibbs.sample_face(md.faces, rng)
    if f.size == 1:
        return f, SimplexPoint.vertex(f.indices[0], md.K)
    r = _dirichlet_draws(md.alpha_on(f), 1, rng)[0]
    return f, _embed(f, r, md.K)


def sample_many(md: MixedDirichlet, n: int, rng: np.random.Generator) -> list[tuple[FaceIndexSet, SimplexPoint]]:
    """n draws, with Dirichlet sampling vectorized per distinct face.

    Deterministic under a seeded stream, but consumes draws in a different
    order than repeated calls to ``sample``.
    """
    faces = face_gibbs.sample_faces(md.faces, n, rng)
    out: list = [None] * n
    by_face: dict[FaceIndexSet, list[int]] = {}
    for i, f in enumerate(faces):
        by_face.setdefault(f, []).append(i)
    for f in sorted(by_face, key=lambda f: f.mask):
        rows = by_face[f]
        if f.size == 1:
            p = SimplexPoint.vertex(f.indices[0], md.K)
            for i in rows:
                out[i] = (f, p)
            continue
        draws = _dirichlet_draws(md.alpha_on(f), len(rows), rng)
        for i, r in zip(rows, draws):
            out[i] = (f, _embed(f, r, md.K))
    return out


def log_density(md: MixedDirichlet, y: SimplexPoint) -> float:
    """Log-density w.r.t. the direct-sum measure: face log-prob plus the
    Dirichlet log-density on the face (0 for vertices)."""
    if y.K != md.K:
        raise ValueError(f"point has K={y.K}, distribution has K={md.K}")
    f = y.support
    out = face_gibbs.face_log_prob(md.faces, f)
    if f.size > 1:
        out += dirichlet_log_pdf(y.restricted(), md.alpha_on(f))
    return out


def entropy(md: MixedDirichlet, mode: str = "exact", n: int = 10000,
            rng: np.random.Generator | None = None) -> float:
    """Direct-sum entropy: exact face entropy plus the expected Dirichlet
    entropy over faces (enumerated exactly, or MC over sampled faces)."""
    h_face = face_gibbs.entropy(md.faces)
    if mode == "exact":
        if md.K > EXACT_ENUM_MAX_K:
            raise ResourceLimitError(f"exact mode needs K <= {EXACT_ENUM_MAX_K}")
        return h_face + sum(
            p * dirichlet_entropy(md.alpha_on(f))
            for f, p in md.exact_face_distribution().items()
        )
    if mode == "mc":
        if rng is None:
            raise ValueError("mc mode needs an rng")
        faces = face_gibbs.sample_faces(md.faces, n, rng)
        return h_face + float(np.mean([dirichlet_entropy(md.alpha_on(f)) for f in faces]))
    raise ValueError(f"unknown mode {mode!r}")


def kl_mixed(md_p: MixedDirichlet, md_q: MixedDirichlet, mode: str = "exact",
             n: int = 10000, rng: np.random.Generator | None = None) -> float:
    """Direct-sum KL: exact face KL plus the expected per-face Dirichlet KL
    under the first distribution's face law.  Never infinite: every face has
    positive probability under both distributions."""
    if md_p.K != md_q.K:
        raise ValueError(f"dimension mismatch: {md_p.K} vs {md_q.K}")
    kl_face = face_gibbs.kl(md_p.faces, md_q.faces)
    if mode == "exact":
        if md_p.K > EXACT_ENUM_MAX_K:
            raise ResourceLimitError(f"exact mode needs K <= {EXACT_ENUM_MAX_K}")
        return kl_face + sum(
            p * dirichlet_kl(md_p.alpha_on(f), md_q.alpha_on(f))
            for f, p in md_p.exact_face_distribution().items()
        )
    if mode == "mc":
        if rng is None:
            raise ValueError("mc mode needs an rng")
        faces = face_gibbs.sample_faces(md_p.faces, n, rng)
        return kl_face + float(np.mean([
            dirichlet_kl(md_p.alpha_on(f), md_q.alpha_on(f)) for f in faces
        ]))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class FullFaceDirichlet:
    """A plain Dirichlet viewed as a mixed distribution: all mass on the
    maximal face.  Points on any other face get -inf log-density, which is
    what makes it useful in support-mismatch KL demonstrations."""

    alpha: np.ndarray

    def __init__(self, alpha):
        alpha = _check_alpha(alpha)
        if alpha.size < 2:
            raise ValueError("need K >= 2")
        alpha = alpha.copy()
        alpha.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)

    @property
    def K(self) -> int:
        return self.alpha.size

    def sample(self, rng: np.random.Generator):
        full = FaceIndexSet((1 << self.K) - 1, self.K)
        r = _dirichlet_draws(self.alpha, 1, rng)[0]
        return full, SimplexPoint(r)

    def sample_many(self, n: int, rng: np.random.Generator):
        full = FaceIndexSet((1 << self.K) - 1, self.K)
        return [(full, SimplexPoint(r)) for r in _dirichlet_draws(self.alpha, n, rng)]

    def log_density(self, y: SimplexPoint) -> float:
        if y.support.size < self.K:
            return -np.inf
        return dirichlet_log_pdf(y.coords, self.alpha)
