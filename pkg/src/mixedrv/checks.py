"""Registry of oracle cross-checks behind ``mixedrv check``.

Every check compares a production code path against an independent route:
brute-force enumeration, a closed form derived separately, finite
differences, or Monte Carlo sampling.  ``fast`` checks keep sample sizes
small enough to finish well under a minute in total; ``full`` adds the
large-sample and long-running ones.  All seeds are fixed, so two runs
produce identical results.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple

import numpy as np
from scipy.stats import chisquare, kstest

from . import extrinsic, face_gibbs, glm, info_theory, mixed_dirichlet, oracles
from .simplex import SimplexPoint, enumerate_faces, face_histogram, sparsemax

__all__ = ["CheckResult", "run_checks", "check_names"]


class CheckFailure(AssertionError):
    pass


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str
    seconds: float


def _require(cond: bool, msg: str):
    if not cond:
        raise CheckFailure(msg)


# --------------------------------------------------------------- simplex ---

def _check_sparsemax_vs_active_set():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(300):
        z = rng.normal(0.0, 2.0, rng.integers(2, 7))
        worst = max(worst, float(np.max(np.abs(sparsemax(z).coords - oracles.brute_force_sparsemax(z)))))
    _require(worst < 1e-9, f"max deviation {worst:.2e} >= 1e-9")
    return f"max deviation {worst:.2e}"


def _check_sparsemax_jacobian_fd():
    from .simplex import sparsemax_jacobian
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(50):
        z = rng.normal(0.0, 1.0, rng.integers(2, 6))
        jac = sparsemax_jacobian(z)
        fd = oracles.central_difference_jacobian(lambda v: sparsemax(v).coords, z)
        worst = max(worst, float(np.max(np.abs(jac - fd))))
    _require(worst < 1e-5, f"max deviation {worst:.2e} >= 1e-5")
    return f"max deviation {worst:.2e}"


def _check_sparsemax_invariances():
    rng = np.random.default_rng(103)
    for _ in range(200):
        z = rng.normal(0.0, 2.0, rng.integers(2, 7))
        y = sparsemax(z)
        c = rng.normal()
        again = sparsemax(y.coords + c)
        _require(np.max(np.abs(again.coords - y.coords)) < 1e-12, "projection not idempotent under shift")
        _require(float(y.coords.sum()) == 1.0 or abs(y.coords.sum() - 1.0) < 1e-12, "sum broken")
    return "idempotence and shift invariance hold"


def _check_face_partition():
    rng = np.random.default_rng(104)
    pts = [sparsemax(rng.normal(0.0, 1.5, 4)) for _ in range(500)]
    faces, dims = face_histogram(pts)
    _require(sum(faces.values()) == 500 and sum(dims.values()) == 500, "histogram does not partition")
    return "face counts partition the batch"


# ------------------------------------------------------------ face_gibbs ---

def _check_log_normalizer_vs_enum():
    rng = np.random.default_rng(110)
    worst = 0.0
    for K in range(2, 11):
        for _ in range(20):
            w = rng.normal(0.0, 3.0, K)
            a = face_gibbs.log_normalizer(w)
            b = oracles.enum_log_normalizer(w)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    _require(worst < 1e-10, f"worst relative error {worst:.2e} >= 1e-10")
    return f"worst relative error {worst:.2e}"


def _check_log_normalizer_vs_closed_form():
    rng = np.random.default_rng(111)
    worst = 0.0
    for K in range(2, 16):
        for _ in range(20):
            w = rng.normal(0.0, 3.0, K)
            a = face_gibbs.log_normalizer(w)
            b = face_gibbs.log_normalizer_closed_form(w)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    _require(worst < 1e-12, f"worst relative error {worst:.2e} >= 1e-12")
    return f"worst relative error {worst:.2e}"


def _check_gibbs_moments_vs_enum():
    rng = np.random.default_rng(112)
    worst = 0.0
    for K in range(2, 11):
        for _ in range(10):
            w = rng.normal(0.0, 2.0, K)
            v = rng.normal(0.0, 2.0, K)
            dp = face_gibbs.GibbsFaceDistribution(w)
            dq = face_gibbs.GibbsFaceDistribution(v)
            worst = max(worst, float(np.max(np.abs(dp.expected_phi - oracles.enum_expected_suff_stats(w)))))
            worst = max(worst, abs(face_gibbs.entropy(dp) - oracles.enum_entropy(w)))
            worst = max(worst, abs(face_gibbs.kl(dp, dq) - oracles.enum_kl(w, v)))
    _require(worst < 1e-10, f"worst error {worst:.2e} >= 1e-10")
    return f"worst error {worst:.2e}"


def _check_face_probs_sum():
    rng = np.random.default_rng(113)
    for _ in range(5):
        d = face_gibbs.GibbsFaceDistribution(rng.normal(0.0, 2.0, 8))
        total = sum(np.exp(face_gibbs.face_log_prob(d, f)) for f in enumerate_faces(8))
        _require(abs(total - 1.0) < 1e-12, f"face probabilities sum to {total!r}")
    return "probabilities sum to 1"


def _check_grad_log_prob():
    rng = np.random.default_rng(114)
    worst = 0.0
    for _ in range(30):
        K = int(rng.integers(2, 7))
        w = rng.normal(0.0, 1.5, K)
        d = face_gibbs.GibbsFaceDistribution(w)
        f = face_gibbs.sample_face(d, rng)
        grad = face_gibbs.grad_log_prob(d, f)
        fd = oracles.central_difference_gradient(
            lambda v: face_gibbs.face_log_prob(face_gibbs.GibbsFaceDistribution(v), f), w
        )
        worst = max(worst, float(np.max(np.abs(grad - fd))))
    # expected score under the exact face law is zero
    d = face_gibbs.GibbsFaceDistribution(rng.normal(0.0, 1.0, 8))
    mean = sum(
        np.exp(face_gibbs.face_log_prob(d, f)) * face_gibbs.grad_log_prob(d, f)
        for f in enumerate_faces(8)
    )
    _require(float(np.max(np.abs(mean))) < 1e-10, "expected score is not zero")
    _require(worst < 1e-5, f"gradient mismatch {worst:.2e} >= 1e-5")
    return f"fd mismatch {worst:.2e}, expected score ~ 0"


def _check_log_normalizer_convexity():
    rng = np.random.default_rng(115)
    h = 1e-4
    for _ in range(10):
        K = int(rng.integers(2, 6))
        w = rng.normal(0.0, 1.0, K)
        hess = np.zeros((K, K))
        for i in range(K):
            for j in range(K):
                e_i = np.eye(K)[i] * h
                e_j = np.eye(K)[j] * h
                hess[i, j] = (
                    face_gibbs.log_normalizer(w + e_i + e_j)
                    - face_gibbs.log_normalizer(w + e_i - e_j)
                    - face_gibbs.log_normalizer(w - e_i + e_j)
                    + face_gibbs.log_normalizer(w - e_i - e_j)
                ) / (4.0 * h * h)
        eigs = np.linalg.eigvalsh((hess + hess.T) / 2.0)
        _require(eigs.min() > -1e-6, f"Hessian eigenvalue {eigs.min():.2e} < 0")
    return "finite-difference Hessians PSD"


def _check_most_probable_face():
    rng = np.random.default_rng(116)
    for _ in range(100):
        K = int(rng.integers(2, 13))
        w = rng.normal(0.0, 1.5, K)
        d = face_gibbs.GibbsFaceDistribution(w)
        got = face_gibbs.most_probable_face(d)
        exp = oracles.enum_most_probable_face(w)
        _require(
            abs(float(d.w @ face_gibbs.suff_stats(got)) - float(d.w @ face_gibbs.suff_stats(exp))) < 1e-12,
            f"argmax face mismatch for w={w}",
        )
    return "matches enumeration argmax"


def _gibbs_chi_square(n: int):
    rng = np.random.default_rng(117)
    for K, w in ((3, np.zeros(3)), (4, rng.uniform(-1.0, 1.0, 4))):
        d = face_gibbs.GibbsFaceDistribution(w)
        counts = np.zeros(2**K - 1)
        for f in face_gibbs.sample_faces(d, n, np.random.default_rng(118)):
            counts[f.mask - 1] += 1
        expected = np.array([np.exp(face_gibbs.face_log_prob(d, f)) for f in enumerate_faces(K)]) * n
        p = chisquare(counts, expected).pvalue
        _require(p > 0.001, f"chi-square p={p:.5f} <= 0.001 (K={K})")
    return f"chi-square ok at n={n}"


# -------------------------------------------------------- mixed_dirichlet ---

def _check_dirichlet_entropy_mc(n: int):
    from scipy.special import gammaln
    rng = np.random.default_rng(120)
    for _ in range(3):
        alpha = rng.uniform(0.4, 4.0, 3)
        draws = rng.dirichlet(alpha, size=n)
        log_beta = gammaln(alpha).sum() - gammaln(alpha.sum())
        logs = (np.log(draws) @ (alpha - 1.0)) - log_beta
        est = -logs.mean()
        se = logs.std(ddof=1) / np.sqrt(n)
        h = mixed_dirichlet.dirichlet_entropy(alpha)
        _require(abs(h - est) < 3.0 * se, f"entropy {h:.5f} vs MC {est:.5f} +- {se:.5f}")
    flat = mixed_dirichlet.dirichlet_entropy(np.ones(5))
    _require(abs(flat + np.log(24.0)) < 1e-12, "flat entropy != -log(K-1)!")
    return "closed form within 3 MC std errors"


def _check_dirichlet_kl_mc(n: int):
    rng = np.random.default_rng(121)
    for _ in range(3):
        ap = rng.uniform(0.4, 4.0, 3)
        aq = rng.uniform(0.4, 4.0, 3)
        draws = rng.dirichlet(ap, size=n)
        from scipy.special import gammaln
        lb_p = gammaln(ap).sum() - gammaln(ap.sum())
        lb_q = gammaln(aq).sum() - gammaln(aq.sum())
        diffs = np.log(draws) @ (ap - aq) - lb_p + lb_q
        est = diffs.mean()
        se = diffs.std(ddof=1) / np.sqrt(n)
        klv = mixed_dirichlet.dirichlet_kl(ap, aq)
        _require(klv >= 0.0, "KL negative")
        _require(abs(klv - est) < 3.0 * se, f"KL {klv:.5f} vs MC {est:.5f} +- {se:.5f}")
    return "closed form within 3 MC std errors"


def _check_mixed_dirichlet_density_values():
    md = mixed_dirichlet.MixedDirichlet(np.zeros(2), np.ones(2))
    v = mixed_dirichlet.log_density(md, SimplexPoint([0.5, 0.5]))
    _require(abs(v + np.log(3.0)) < 1e-12, f"edge density {v}")
    v = mixed_dirichlet.log_density(md, SimplexPoint([1.0, 0.0]))
    _require(abs(v - np.log(1.0 / 3.0)) < 1e-12, f"vertex density {v}")
    # normalization by construction: exact face probs x unit Dirichlet mass
    rng = np.random.default_rng(122)
    md = mixed_dirichlet.MixedDirichlet(rng.normal(0.0, 1.0, 4), rng.uniform(0.5, 3.0, 4))
    total = sum(md.exact_face_distribution().values())
    _require(abs(total - 1.0) < 1e-12, f"face mass {total}")
    return "hand values and normalization hold"


def _check_mixed_dirichlet_entropy_consistency(n: int):
    rng = np.random.default_rng(123)
    md = mixed_dirichlet.MixedDirichlet(rng.normal(0.0, 1.0, 5), rng.uniform(0.5, 3.0, 5))
    exact = mixed_dirichlet.entropy(md, mode="exact")
    est = info_theory.direct_sum_entropy_mc(md, n, np.random.default_rng(124))
    _require(abs(exact - est.estimate) < 3.0 * est.std_error,
             f"exact {exact:.5f} vs MC {est.estimate:.5f} +- {est.std_error:.5f}")
    mc_faces = mixed_dirichlet.entropy(md, mode="mc", n=n, rng=np.random.default_rng(125))
    _require(abs(exact - mc_faces) < 0.05, f"face-MC mode off by {abs(exact - mc_faces):.4f}")
    return "exact, sample-based and face-MC entropies agree"


def _check_mixed_dirichlet_face_tv(n: int, bound: float):
    rng = np.random.default_rng(126)
    md = mixed_dirichlet.MixedDirichlet(rng.normal(0.0, 1.0, 4), rng.uniform(0.5, 3.0, 4))
    counts = np.zeros(15)
    for f, _ in mixed_dirichlet.sample_many(md, n, np.random.default_rng(127)):
        counts[f.mask - 1] += 1
    exact = np.array([md.exact_face_distribution()[f] for f in enumerate_faces(4)])
    tv = 0.5 * float(np.abs(counts / n - exact).sum())
    _require(tv < bound, f"TV {tv:.5f} >= {bound}")
    return f"TV distance {tv:.5f}"


def _check_mixed_dirichlet_flat_conditional():
    # under alpha = 1 the first coordinate of a sampled face is Beta(1, m-1)
    rng = np.random.default_rng(128)
    md = mixed_dirichlet.MixedDirichlet(np.array([0.5, 0.5, 0.5]), np.ones(3))
    by_face: dict = {}
    for f, p in mixed_dirichlet.sample_many(md, 20000, rng):
        if f.size >= 2:
            by_face.setdefault(f, []).append(p.restricted()[0])
    for f, vals in by_face.items():
        if len(vals) < 500:
            continue
        res = kstest(vals, "beta", args=(1.0, f.size - 1))
        _require(res.pvalue > 0.001, f"KS p={res.pvalue:.5f} on face {f}")
    return "per-face flat conditionals pass KS"


# --------------------------------------------------------------- extrinsic ---

def _gs2_mc_logpdf(y: np.ndarray, z: float, s: float) -> np.ndarray:
    p0, p1, _ = extrinsic.gs2_face_probs(z, s)
    interior = -0.5 * ((y - z) / s) ** 2 - np.log(s) - 0.5 * np.log(2.0 * np.pi)
    return np.where(y == 0.0, np.log(p0), np.where(y == 1.0, np.log(p1), interior))


def _check_gs2_entropy_mc(n: int):
    for i, (z, s) in enumerate([(0.3, 0.5), (0.7, 1.2), (0.95, 0.25)]):
        rng = np.random.default_rng(130 + i)
        y = np.clip(z + s * rng.standard_normal(n), 0.0, 1.0)
        logs = _gs2_mc_logpdf(y, z, s)
        est, se = -logs.mean(), logs.std(ddof=1) / np.sqrt(n)
        h = extrinsic.gs2_entropy(z, s)
        _require(abs(h - est) < 3.0 * se, f"H {h:.5f} vs MC {est:.5f} +- {se:.5f} (z={z})")
    lim = extrinsic.gs2_entropy(0.5, 0.05)
    _require(abs(lim - 0.5 * np.log(2.0 * np.pi * np.e * 0.05**2)) < 1e-4, "sigma->0 limit broken")
    return "closed form within 3 MC std errors; Gaussian limit holds"


def _check_gs2_kl_mc(n: int):
    rng = np.random.default_rng(131)
    for i in range(3):
        zp, zq = rng.uniform(-0.2, 1.2, 2)
        sp, sq = rng.uniform(0.3, 1.2, 2)
        y = np.clip(zp + sp * np.random.default_rng(132 + i).standard_normal(n), 0.0, 1.0)
        diffs = _gs2_mc_logpdf(y, zp, sp) - _gs2_mc_logpdf(y, zq, sq)
        est, se = diffs.mean(), diffs.std(ddof=1) / np.sqrt(n)
        klv = extrinsic.gs2_kl(zp, sp, zq, sq)
        _require(klv >= 0.0, "closed-form KL negative")
        _require(abs(klv - est) < 3.0 * se, f"KL {klv:.5f} vs MC {est:.5f} +- {se:.5f}")
    _require(extrinsic.gs2_kl(0.4, 0.8, 0.4, 0.8) == 0.0, "KL(p,p) != 0")
    return "closed form within 3 MC std errors"


def _check_gs2_density_paths():
    d = extrinsic.GaussianSparsemax([0.35, 0.45], [0.9, 0.5])
    z, s = extrinsic.gs2_params(d)
    worst = 0.0
    grid = [0.0, 1.0] + list(np.linspace(0.02, 0.98, 18))
    for y1 in grid:
        p = SimplexPoint([y1, 1.0 - y1])
        vals = [
            extrinsic.gs_log_density(d, p),
            extrinsic.gs2_log_density_extrinsic(y1, z, s),
            extrinsic.gs2_log_density_intrinsic(y1, z, s),
        ]
        worst = max(worst, max(vals) - min(vals))
    _require(worst < 1e-8, f"paths disagree by {worst:.2e}")
    return f"three density paths agree to {worst:.2e}"


def _check_gs_density_pivot_invariance():
    rng = np.random.default_rng(133)
    worst = 0.0
    for _ in range(10):
        K = int(rng.integers(3, 6))
        d = extrinsic.GaussianSparsemax(rng.normal(0.2, 0.6, K), rng.uniform(0.3, 1.3, K))
        y = sparsemax(rng.normal(0.3, 0.8, K))
        vals = [extrinsic.gs_log_density(d, y, pivot=i) for i in y.support.indices]
        worst = max(worst, max(vals) - min(vals))
    _require(worst < 1e-8, f"pivot changes density by {worst:.2e}")
    return f"pivot spread {worst:.2e}"


def _check_gs_density_constant_sigma():
    rng = np.random.default_rng(134)
    quad = extrinsic.QuadratureConfig()
    worst = 0.0
    for _ in range(10):
        mu = rng.normal(0.2, 0.6, 3)
        sigma = np.full(3, float(rng.uniform(0.3, 1.2)))
        y = sparsemax(rng.normal(0.3, 0.8, 3))
        support = list(y.support.indices)
        off = [j for j in range(3) if j not in support]
        if not off:
            continue
        a = extrinsic._orthant_log_general(mu, sigma, y.coords, support, off, quad)
        b = extrinsic._orthant_log_constant(mu, sigma, support, off, quad)
        worst = max(worst, abs(a - b))
    _require(worst < 1e-8, f"constant-sigma path off by {worst:.2e}")
    return f"paths agree to {worst:.2e}"


def _check_gs_quadrature_refinement():
    rng = np.random.default_rng(135)
    worst = 0.0
    for _ in range(10):
        K = int(rng.integers(2, 5))
        d = extrinsic.GaussianSparsemax(rng.normal(0.2, 0.6, K), rng.uniform(0.3, 1.3, K))
        y = sparsemax(rng.normal(0.3, 0.8, K))
        a = extrinsic.gs_log_density(d, y, extrinsic.QuadratureConfig(64, 16))
        b = extrinsic.gs_log_density(d, y, extrinsic.QuadratureConfig(128, 16))
        worst = max(worst, abs(a - b))
    _require(worst < 1e-6, f"doubling panels moves density by {worst:.2e}")
    return f"refinement change {worst:.2e}"


def _check_gs2_face_frequencies(n: int):
    d = extrinsic.GaussianSparsemax([0.55, 0.45], [0.8, 0.6])
    z, s = extrinsic.gs2_params(d)
    p0, p1, pc = extrinsic.gs2_face_probs(z, s)
    coords = extrinsic.gs_sample_coords(d, n, np.random.default_rng(136))
    f1 = float(np.mean(coords[:, 1] == 0.0))  # vertex (1,0), scalar y = 1
    f0 = float(np.mean(coords[:, 0] == 0.0))
    for freq, prob, name in ((f0, p0, "P0"), (f1, p1, "P1"), (1 - f0 - f1, pc, "Pc")):
        se = np.sqrt(prob * (1.0 - prob) / n)
        _require(abs(freq - prob) < 4.0 * se, f"{name}: freq {freq:.5f} vs {prob:.5f} (4se={4*se:.5f})")
    return "closed-form face masses match frequencies"


def _check_gs_k3_normalization():
    d = extrinsic.GaussianSparsemax([0.5, 0.1, 0.3], [0.6, 0.9, 0.5])
    n = 10**6
    coords = extrinsic.gs_sample_coords(d, n, np.random.default_rng(137))
    masks = ((coords > 0).astype(np.int64) * (1 << np.arange(3))).sum(axis=1)
    vert_mc = float(np.mean((masks == 1) | (masks == 2) | (masks == 4)))
    x32, w32 = np.polynomial.legendre.leggauss(32)

    def gl(a, b, panels):
        edges = np.linspace(a, b, panels + 1)
        half = np.diff(edges) / 2.0
        mid = (edges[:-1] + edges[1:]) / 2.0
        return (mid[:, None] + half[:, None] * x32).ravel(), (half[:, None] * w32).ravel()

    edge_mass = 0.0
    for (i, j) in [(0, 1), (0, 2), (1, 2)]:
        ts, ws = gl(1e-9, 1.0 - 1e-9, 24)
        for t, wt in zip(ts, ws):
            c = np.zeros(3)
            c[i], c[j] = t, 1.0 - t
            edge_mass += wt * np.exp(extrinsic.gs_log_density(d, SimplexPoint(c)))
    interior = 0.0
    ts, ws = gl(1e-9, 1.0 - 1e-9, 16)
    for t1, w1 in zip(ts, ws):
        inner_ts, inner_ws = gl(1e-9 * (1 - t1), (1 - t1) * (1 - 1e-9), 8)
        for t2, w2 in zip(inner_ts, inner_ws):
            third = 1.0 - t1 - t2
            if third <= 0.0:
                continue
            interior += w1 * w2 * np.exp(extrinsic.gs_log_density(d, SimplexPoint([t1, t2, third])))
    total = vert_mc + edge_mass + interior
    _require(abs(total - 1.0) < 1e-2, f"direct-sum mass {total:.5f} not within 1e-2 of 1")
    # vertex densities should also reproduce the MC vertex masses
    for i, mask in enumerate((1, 2, 4)):
        dens = float(np.exp(extrinsic.gs_log_density(d, SimplexPoint.vertex(i, 3))))
        freq = float(np.mean(masks == mask))
        se = np.sqrt(dens * (1 - dens) / n)
        _require(abs(dens - freq) < 5.0 * se, f"vertex {i}: density {dens:.5f} vs freq {freq:.5f}")
    return f"total direct-sum mass {total:.6f}"


def _check_concrete_gumbel_max(n: int):
    z = np.array([0.2, -0.5, 1.0])
    probs = np.exp(z) / np.exp(z).sum()
    coords = extrinsic.concrete_sample_coords(z, 0.7, n, np.random.default_rng(138))
    _require(bool(np.all(coords > 0.0)), "a Concrete sample left the relative interior")
    freqs = np.bincount(np.argmax(coords, axis=1), minlength=3) / n
    for k in range(3):
        se = np.sqrt(probs[k] * (1 - probs[k]) / n)
        _require(abs(freqs[k] - probs[k]) < 4.0 * se, f"argmax freq {freqs[k]:.5f} vs {probs[k]:.5f}")
    hot = extrinsic.concrete_sample_coords(np.zeros(10), 1e3, 2000, np.random.default_rng(139))
    _require(float(np.quantile(hot.max(axis=1), 0.99)) < 0.12, "high-temperature samples not near uniform")
    return "argmax frequencies are Categorical(softmax(z))"


def _check_khc_coupling():
    rng = np.random.default_rng(140)
    z = np.array([0.4, -0.3])
    beta, lam = 0.66, 1.1
    khc = extrinsic.KDHardConcrete(z, beta, lam)
    bhc = extrinsic.BinaryHardConcrete(
        log_alpha=float(z[0] - z[1]), beta=beta, l=(1.0 - lam) / 2.0, r=(1.0 + lam) / 2.0
    )
    worst = 0.0
    for _ in range(2000):
        g = -np.log(-np.log(rng.random(2)))
        y_soft = extrinsic.concrete_from_gumbels(z, beta, g)
        y_khc = sparsemax(lam * y_soft).coords[0]
        y_bin = float(extrinsic.binary_hard_concrete_from_logistic(bhc, g[0] - g[1]))
        worst = max(worst, abs(y_khc - y_bin))
    _require(worst < 1e-12, f"coupled paths differ by {worst:.2e}")
    # lam = 1 always yields the full face; larger lam hits vertices more
    full = extrinsic.khc_sample_coords(extrinsic.KDHardConcrete(z, beta, 1.0), 2000, np.random.default_rng(141))
    _require(bool(np.all(full > 0.0)), "lam=1 left the maximal face")
    v_small = float(np.mean(np.sum(extrinsic.khc_sample_coords(extrinsic.KDHardConcrete(z, beta, 1.1), 5000, np.random.default_rng(142)) > 0, axis=1) == 1))
    v_big = float(np.mean(np.sum(extrinsic.khc_sample_coords(extrinsic.KDHardConcrete(z, beta, 10.0), 5000, np.random.default_rng(143)) > 0, axis=1) == 1))
    _require(v_big > v_small, f"vertex rate not increasing in lam ({v_small} vs {v_big})")
    return f"binary coupling exact; vertex rate {v_small:.3f} -> {v_big:.3f}"


def _check_binary_hc_cdf(n: int):
    d = extrinsic.BinaryHardConcrete(0.3, 0.66)
    from scipy.special import expit
    p_zero = float(expit(d.beta * np.log(-d.l / d.r) - d.log_alpha))
    vals = extrinsic.binary_hard_concrete_sample_values(d, n, np.random.default_rng(144))
    freq = float(np.mean(vals == 0.0))
    se = np.sqrt(p_zero * (1 - p_zero) / n)
    _require(abs(freq - p_zero) < 4.0 * se, f"P(zero) {freq:.5f} vs closed form {p_zero:.5f}")
    sym = extrinsic.BinaryHardConcrete(0.0, 2.0 / 3.0)
    v = extrinsic.binary_hard_concrete_sample_values(sym, n, np.random.default_rng(145))
    pz, po = float(np.mean(v == 0.0)), float(np.mean(v == 1.0))
    _require(abs(pz - po) < 4.0 * np.sqrt(pz * (1 - pz) / n) + 4.0 * np.sqrt(po * (1 - po) / n),
             f"symmetric case asymmetric: {pz} vs {po}")
    return "boundary mass matches the logistic CDF closed form"


# ------------------------------------------------------------- info_theory ---

def _check_maxent_table():
    worst = 0.0
    for K in range(2, 31):
        for N in range(0, 9):
            a = info_theory.maxent_entropy(K, N)
            b = info_theory.maxent_entropy_series(K, N)
            worst = max(worst, abs(a - b) / abs(b))
    _require(worst < 1e-10, f"Laguerre vs series relative error {worst:.2e}")
    _require(abs(info_theory.maxent_entropy(2, 0) - np.log(3.0)) < 1e-12, "K=2 N=0 value")
    _require(abs(info_theory.maxent_entropy(3, 0) - np.log(6.5)) < 1e-12, "K=3 N=0 value")
    return f"table agreement {worst:.2e}"


def _check_coding_entropy():
    for N in range(0, 9):
        me = info_theory.maxent_distribution(2, N)
        total = info_theory.coding_entropy(me.exact_face_distribution(), me.direct_sum_entropy(), N)
        _require(abs(total - np.log(2.0 + 2.0**N)) < 1e-12, f"coding entropy at N={N}: {total}")
    me = info_theory.maxent_distribution(4, 2)
    h = me.direct_sum_entropy()
    _require(info_theory.coding_entropy(me.exact_face_distribution(), h, 0) == h, "N=0 changes the value")
    return "ln(2 + 2^N) reproduced for N = 0..8"


def _check_maxent_reconstruction():
    for K, N in ((2, 0), (3, 2), (5, 1), (8, 3)):
        me = info_theory.maxent_distribution(K, N)
        total = info_theory.coding_entropy(me.exact_face_distribution(), me.direct_sum_entropy(), N)
        _require(abs(total - info_theory.maxent_entropy(K, N)) < 1e-9,
                 f"component reconstruction off at K={K} N={N}")
    return "H(F) + conditionals + N-term reproduce the Laguerre value"


def _check_maxent_frequencies(n: int):
    me = info_theory.maxent_distribution(4, 0)
    masks = info_theory.maxent_sample_face_masks(me, n, np.random.default_rng(146))
    dims = np.array([bin(m).count("1") for m in masks])
    for k in range(1, 5):
        freq = float(np.mean(dims == k))
        prob = me.g[k - 1]
        se = np.sqrt(prob * (1 - prob) / n)
        _require(abs(freq - prob) < 4.0 * se, f"dim {k}: freq {freq:.5f} vs g {prob:.5f}")
    counts = np.bincount(masks, minlength=16)[1:]
    expected = np.array([me.exact_face_distribution()[f] for f in enumerate_faces(4)]) * n
    p = chisquare(counts, expected).pvalue
    _require(p > 0.001, f"face chi-square p={p:.5f}")
    return f"dimension and face frequencies ok at n={n}"


def _check_maxent_mc_entropy(n: int):
    # at N=0 the maxent law is uniform w.r.t. the direct-sum measure, so its
    # log-density is constant and the MC estimate is exact up to rounding
    for N in (0, 2):
        me = info_theory.maxent_distribution(3, N)
        est = info_theory.direct_sum_entropy_mc(me, n, np.random.default_rng(147))
        exact = me.direct_sum_entropy()
        _require(abs(est.estimate - exact) < 3.0 * est.std_error + 1e-12,
                 f"MC {est.estimate:.5f} vs exact {exact:.5f} +- {est.std_error:.5f} (N={N})")
    return "sampler and density are mutually consistent"


def _check_maxent_optimality():
    for K in (2, 3, 4):
        for N in (0, 1):
            me = info_theory.maxent_distribution(K, N)
            logw = info_theory.maxent_log_weights(K, N)

            def objective(g):
                with np.errstate(divide="ignore", invalid="ignore"):
                    t = np.where(g > 0, g * (np.log(g) - logw), 0.0)
                return -t.sum()

            base = objective(me.g)
            eps = 1e-3
            for i in range(K):
                for j in range(K):
                    if i == j:
                        continue
                    g = me.g.copy()
                    g[i] += eps
                    g[j] -= eps
                    if g[j] < 0:
                        continue
                    _require(objective(g) <= base + 1e-9,
                             f"perturbation increased the maxent objective at K={K} N={N}")
    return "local perturbations never improve the objective"


def _check_maxent_dominates():
    rng = np.random.default_rng(148)
    for K in (3, 4):
        h_max = info_theory.maxent_entropy(K, 0)
        for _ in range(100):
            md = mixed_dirichlet.MixedDirichlet(rng.normal(0.0, 2.0, K), rng.uniform(0.2, 5.0, K))
            _require(mixed_dirichlet.entropy(md, mode="exact") <= h_max + 1e-9,
                     "a Mixed Dirichlet beat the maxent entropy")
    return "maxent entropy dominates 200 random Mixed Dirichlets"


def _check_dimension_symmetry():
    me = info_theory.maxent_distribution(5, 1)
    probs = me.exact_face_distribution()
    by_dim: dict = {}
    for f, p in probs.items():
        by_dim.setdefault(f.dim, set()).add(round(p, 15))
    for dim, vals in by_dim.items():
        _require(len(vals) == 1, f"faces of dim {dim} have unequal probabilities")
    return "equal-dimension faces are equiprobable"


# -------------------------------------------------------------------- glm ---

def _check_glm_gradient():
    rng = np.random.default_rng(150)
    X, Y, _ = glm.make_planted_dataset(n=8, K=4, d=3, seed=7)
    model = glm.GlmModel(
        rng.normal(0, 0.5, (4, 3)), rng.normal(0, 0.5, 4),
        rng.normal(0, 0.5, (4, 3)), rng.normal(0, 0.5, 4),
    )
    _, grads = glm.glm_log_likelihood(model, X, Y)

    def pack(g):
        return np.concatenate([g["w_face"].ravel(), g["b_face"], g["w_conc"].ravel(), g["b_conc"]])

    def unpack(v):
        i = 0
        wf = v[i:i + 12].reshape(4, 3); i += 12
        bf = v[i:i + 4]; i += 4
        wc = v[i:i + 12].reshape(4, 3); i += 12
        return glm.GlmModel(wf, bf, wc, v[i:i + 4])

    v0 = np.concatenate([model.w_face.ravel(), model.b_face, model.w_conc.ravel(), model.b_conc])
    fd = oracles.central_difference_gradient(lambda v: glm.glm_log_likelihood(unpack(v), X, Y)[0], v0, h=1e-5)
    err = float(np.max(np.abs(fd - pack(grads))))
    _require(err < 1e-4, f"gradient error {err:.2e} >= 1e-4")
    return f"gradient error {err:.2e}"


def _check_glm_planted_recovery():
    f1s, gaps = [], []
    for seed in range(3):
        X, Y, _ = glm.make_planted_dataset(n=500, K=5, d=4, seed=seed)
        rs = np.random.default_rng(seed)
        idx = rs.permutation(500)
        tr, te = idx[:100], idx[100:]
        fit = glm.glm_fit(X[tr], [Y[i] for i in tr], seed=seed)
        y_true = np.stack([Y[i].coords for i in te])
        mpm = np.stack([glm.glm_predict(fit.model, X[i], "most-probable-mean").coords for i in te])
        sm = np.stack([
            glm.glm_predict(fit.model, X[i], "sample-mean", n=100, rng=np.random.default_rng(seed * 1000 + int(i))).coords
            for i in te
        ])
        f1s.append(glm.zero_nonzero_macro_f1(y_true, mpm))
        gaps.append(glm.rmse(y_true, mpm) - glm.rmse(y_true, sm))
    _require(min(f1s) > 0.9, f"macro F1 {min(f1s):.4f} <= 0.9")
    _require(max(gaps) < 0.02, f"most-probable-mean RMSE exceeds sample-mean by {max(gaps):.4f}")
    return f"min macro F1 {min(f1s):.4f}, max RMSE gap {max(gaps):+.4f}"


# ---------------------------------------------------------------- registry ---

_FAST = "fast"
_FULL = "full"

CHECKS: list[tuple[str, str, Callable[[], str]]] = [
    ("simplex.sparsemax_vs_active_set_oracle", _FAST, _check_sparsemax_vs_active_set),
    ("simplex.sparsemax_jacobian_vs_finite_differences", _FAST, _check_sparsemax_jacobian_fd),
    ("simplex.sparsemax_invariances", _FAST, _check_sparsemax_invariances),
    ("simplex.face_partition_property", _FAST, _check_face_partition),
    ("face_gibbs.log_normalizer_vs_enumeration", _FAST, _check_log_normalizer_vs_enum),
    ("face_gibbs.log_normalizer_vs_closed_form", _FAST, _check_log_normalizer_vs_closed_form),
    ("face_gibbs.moments_entropy_kl_vs_enumeration", _FAST, _check_gibbs_moments_vs_enum),
    ("face_gibbs.face_probs_sum_to_one", _FAST, _check_face_probs_sum),
    ("face_gibbs.grad_log_prob_vs_finite_differences", _FAST, _check_grad_log_prob),
    ("face_gibbs.log_normalizer_convexity", _FAST, _check_log_normalizer_convexity),
    ("face_gibbs.most_probable_face_vs_enumeration", _FAST, _check_most_probable_face),
    ("face_gibbs.sampling_chi_square", _FAST, lambda: _gibbs_chi_square(10**5)),
    ("face_gibbs.sampling_chi_square_1e6", _FULL, lambda: _gibbs_chi_square(10**6)),
    ("mixed_dirichlet.dirichlet_entropy_vs_mc", _FAST, lambda: _check_dirichlet_entropy_mc(10**5)),
    ("mixed_dirichlet.dirichlet_entropy_vs_mc_1e6", _FULL, lambda: _check_dirichlet_entropy_mc(10**6)),
    ("mixed_dirichlet.dirichlet_kl_vs_mc", _FAST, lambda: _check_dirichlet_kl_mc(10**5)),
    ("mixed_dirichlet.density_hand_values", _FAST, _check_mixed_dirichlet_density_values),
    ("mixed_dirichlet.entropy_exact_vs_mc", _FAST, lambda: _check_mixed_dirichlet_entropy_consistency(20000)),
    ("mixed_dirichlet.face_frequencies_tv", _FAST, lambda: _check_mixed_dirichlet_face_tv(10**5, 0.02)),
    ("mixed_dirichlet.face_frequencies_tv_1e6", _FULL, lambda: _check_mixed_dirichlet_face_tv(10**6, 0.005)),
    ("mixed_dirichlet.flat_conditionals_ks", _FAST, _check_mixed_dirichlet_flat_conditional),
    ("extrinsic.gs2_entropy_vs_mc", _FAST, lambda: _check_gs2_entropy_mc(2 * 10**5)),
    ("extrinsic.gs2_entropy_vs_mc_1e6", _FULL, lambda: _check_gs2_entropy_mc(10**6)),
    ("extrinsic.gs2_kl_vs_mc", _FAST, lambda: _check_gs2_kl_mc(2 * 10**5)),
    ("extrinsic.gs2_kl_vs_mc_1e6", _FULL, lambda: _check_gs2_kl_mc(10**6)),
    ("extrinsic.gs2_density_three_paths", _FAST, _check_gs2_density_paths),
    ("extrinsic.gs_density_pivot_invariance", _FAST, _check_gs_density_pivot_invariance),
    ("extrinsic.gs_density_constant_sigma_path", _FAST, _check_gs_density_constant_sigma),
    ("extrinsic.gs_quadrature_refinement", _FAST, _check_gs_quadrature_refinement),
    ("extrinsic.gs2_face_probs_vs_frequencies", _FAST, lambda: _check_gs2_face_frequencies(10**5)),
    ("extrinsic.gs2_face_probs_vs_frequencies_1e6", _FULL, lambda: _check_gs2_face_frequencies(10**6)),
    ("extrinsic.gs_k3_normalization", _FULL, _check_gs_k3_normalization),
    ("extrinsic.concrete_gumbel_max", _FAST, lambda: _check_concrete_gumbel_max(10**5)),
    ("extrinsic.concrete_gumbel_max_1e6", _FULL, lambda: _check_concrete_gumbel_max(10**6)),
    ("extrinsic.khc_binary_coupling", _FAST, _check_khc_coupling),
    ("extrinsic.binary_hc_boundary_cdf", _FAST, lambda: _check_binary_hc_cdf(10**5)),
    ("extrinsic.binary_hc_boundary_cdf_1e6", _FULL, lambda: _check_binary_hc_cdf(10**6)),
    ("info_theory.maxent_laguerre_vs_series", _FAST, _check_maxent_table),
    ("info_theory.coding_entropy_worked_example", _FAST, _check_coding_entropy),
    ("info_theory.maxent_component_reconstruction", _FAST, _check_maxent_reconstruction),
    ("info_theory.maxent_frequencies", _FAST, lambda: _check_maxent_frequencies(10**5)),
    ("info_theory.maxent_frequencies_1e6", _FULL, lambda: _check_maxent_frequencies(10**6)),
    ("info_theory.maxent_mc_entropy", _FAST, lambda: _check_maxent_mc_entropy(20000)),
    ("info_theory.maxent_local_optimality", _FAST, _check_maxent_optimality),
    ("info_theory.maxent_dominates_mixed_dirichlet", _FAST, _check_maxent_dominates),
    ("info_theory.dimension_class_symmetry", _FAST, _check_dimension_symmetry),
    ("glm.gradient_vs_finite_differences", _FAST, _check_glm_gradient),
    ("glm.planted_recovery", _FULL, _check_glm_planted_recovery),
]


def check_names(level: str = "fast") -> list[str]:
    return [name for name, lvl, _ in CHECKS if level == "full" or lvl == "fast"]


def _run_one(name: str, fn: Callable[[], str]) -> CheckResult:
    t0 = time.perf_counter()
    try:
        detail = fn()
        return CheckResult(name, True, detail, time.perf_counter() - t0)
    except CheckFailure as e:
        return CheckResult(name, False, str(e), time.perf_counter() - t0)
    except Exception as e:  # an oracle crashing is a failure, not a crash
        return CheckResult(name, False, f"{type(e).__name__}: {e}", time.perf_counter() - t0)


def run_checks(level: str = "fast", workers: int | None = None) -> list[CheckResult]:
    """Run the registry at the given level; results come back in registry
    order regardless of the worker count (MIXEDRV_THREADS by default)."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    todo = [(name, fn) for name, lvl, fn in CHECKS if level == "full" or lvl == "fast"]
    if workers is None:
        workers = int(os.environ.get("MIXEDRV_THREADS", "1"))
    if workers <= 1:
        return [_run_one(name, fn) for name, fn in todo]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, name, fn) for name, fn in todo]
        return [f.result() for f in futures]
