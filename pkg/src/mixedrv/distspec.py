"""Parsing and dispatch for distribution spec files used by the CLI.

A spec is a JSON object with a ``kind`` discriminator and explicit
parameter vectors (no broadcasting), e.g.::

    {"kind": "mixed-dirichlet", "w": [0.5, -1.0, 0.0], "alpha": [1.0, 2.0, 0.5]}

Supported kinds: ``mixed-dirichlet``, ``gaussian-sparsemax``,
``kd-hard-concrete``, ``binary-hard-concrete``, ``maxent``, ``concrete``.
An optional ``seed`` key supplies a default sampling seed (a ``--seed``
flag wins).  Unknown keys are rejected so that a spec file reproduces one
distribution unambiguously.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import extrinsic, info_theory, mixed_dirichlet
from .simplex import SimplexPoint

__all__ = ["SpecError", "ParsedSpec", "parse_spec", "load_spec_file", "KINDS"]

KINDS = (
    "mixed-dirichlet",
    "gaussian-sparsemax",
    "kd-hard-concrete",
    "binary-hard-concrete",
    "maxent",
    "concrete",
)


class SpecError(ValueError):
    """The spec file is structurally or semantically invalid."""


def _vector(obj: dict, key: str) -> np.ndarray:
    try:
        v = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as e:
        raise SpecError(f"field {key!r} must be a list of numbers") from e
    if v.ndim != 1 or v.size < 1:
        raise SpecError(f"field {key!r} must be a nonempty vector")
    return v


def _scalar(obj: dict, key: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise SpecError(f"missing field {key!r}")
        return float(default)
    v = obj[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise SpecError(f"field {key!r} must be a number")
    return float(v)


def _check_keys(obj: dict, allowed: set):
    extra = set(obj) - allowed - {"kind", "seed", "k"}
    if extra:
        raise SpecError(f"unknown fields {sorted(extra)}")


def _check_k(obj: dict, K: int):
    if "k" in obj and int(obj["k"]) != K:
        raise SpecError(f"field 'k' is {obj['k']} but parameter vectors have length {K}")


class _ConcreteDist:
    """Sampling-only wrapper for the Concrete distribution."""

    def __init__(self, z: np.ndarray, beta: float):
        self.z = z
        self.beta = beta
        self.K = z.size

    def sample(self, rng):
        p = extrinsic.concrete_sample(self.z, self.beta, rng)
        return p.support, p

    def sample_many(self, n, rng):
        out = []
        for row in extrinsic.concrete_sample_coords(self.z, self.beta, n, rng):
            p = SimplexPoint(row)
            out.append((p.support, p))
        return out


class _KhcDist:
    """Sampling-only wrapper around a K-D Hard Concrete."""

    def __init__(self, d: extrinsic.KDHardConcrete):
        self.d = d
        self.K = d.K

    def sample(self, rng):
        return extrinsic.khc_sample(self.d, rng)

    def sample_many(self, n, rng):
        out = []
        for row in extrinsic.khc_sample_coords(self.d, n, rng):
            p = SimplexPoint(row)
            out.append((p.support, p))
        return out


class _BinaryHcDist:
    """Binary Hard Concrete presented as a distribution on the 2-simplex
    (the unit interval embedded as (y, 1-y))."""

    def __init__(self, d: extrinsic.BinaryHardConcrete):
        self.d = d
        self.K = 2

    def sample(self, rng):
        _, v = extrinsic.binary_hard_concrete_sample(self.d, rng)
        p = SimplexPoint([v, 1.0 - v])
        return p.support, p

    def sample_many(self, n, rng):
        out = []
        for v in extrinsic.binary_hard_concrete_sample_values(self.d, n, rng):
            p = SimplexPoint([float(v), 1.0 - float(v)])
            out.append((p.support, p))
        return out


@dataclass
class ParsedSpec:
    kind: str
    dist: object
    K: int
    default_seed: int | None

    @property
    def supports_log_density(self) -> bool:
        return hasattr(self.dist, "log_density")

    def exact_entropy(self) -> float:
        """Exact direct-sum entropy, for the kinds that expose one."""
        if self.kind == "mixed-dirichlet":
            return mixed_dirichlet.entropy(self.dist, mode="exact")
        if self.kind == "maxent":
            return self.dist.direct_sum_entropy()
        if self.kind == "gaussian-sparsemax" and self.K == 2:
            z, s = extrinsic.gs2_params(self.dist)
            return extrinsic.gs2_entropy(z, s)
        raise SpecError(f"exact entropy is not available for kind {self.kind!r} (K={self.K})")

    def exact_kl(self, other: "ParsedSpec") -> float:
        if self.K != other.K:
            raise SpecError(f"dimension mismatch: {self.K} vs {other.K}")
        if self.kind == other.kind == "mixed-dirichlet":
            return mixed_dirichlet.kl_mixed(self.dist, other.dist, mode="exact")
        if self.kind == other.kind == "gaussian-sparsemax" and self.K == 2:
            zp, sp = extrinsic.gs2_params(self.dist)
            zq, sq = extrinsic.gs2_params(other.dist)
            return extrinsic.gs2_kl(zp, sp, zq, sq)
        if self.kind == other.kind == "maxent":
            gp, gq = self.dist.g, other.dist.g
            return float(np.sum(gp * (np.log(gp) - np.log(gq))))
        raise SpecError(f"exact KL is not available for kinds {self.kind!r}/{other.kind!r}")


def parse_spec(obj: dict) -> ParsedSpec:
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise SpecError(f"unknown kind {kind!r}; expected one of {list(KINDS)}")
    seed = obj.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise SpecError("field 'seed' must be a nonnegative integer")
    try:
        if kind == "mixed-dirichlet":
            _check_keys(obj, {"w", "alpha"})
            w = _vector(obj, "w")
            alpha = _vector(obj, "alpha")
            _check_k(obj, w.size)
            dist = mixed_dirichlet.MixedDirichlet(w, alpha)
            return ParsedSpec(kind, dist, dist.K, seed)
        if kind == "gaussian-sparsemax":
            _check_keys(obj, {"mu", "sigma"})
            mu = _vector(obj, "mu")
            sigma = _vector(obj, "sigma")
            _check_k(obj, mu.size)
            dist = extrinsic.GaussianSparsemax(mu, sigma)
            return ParsedSpec(kind, dist, dist.K, seed)
        if kind == "kd-hard-concrete":
            _check_keys(obj, {"z", "beta", "lambda"})
            z = _vector(obj, "z")
            _check_k(obj, z.size)
            d = extrinsic.KDHardConcrete(z, _scalar(obj, "beta"), _scalar(obj, "lambda", 1.1))
            return ParsedSpec(kind, _KhcDist(d), d.K, seed)
        if kind == "binary-hard-concrete":
            _check_keys(obj, {"log_alpha", "beta", "l", "r"})
            d = extrinsic.BinaryHardConcrete(
                _scalar(obj, "log_alpha"),
                _scalar(obj, "beta"),
                _scalar(obj, "l", -0.1),
                _scalar(obj, "r", 1.1),
            )
            return ParsedSpec(kind, _BinaryHcDist(d), 2, seed)
        if kind == "maxent":
            _check_keys(obj, {"n"})
            if "k" not in obj:
                raise SpecError("maxent needs field 'k'")
            dist = info_theory.maxent_distribution(int(obj["k"]), int(obj.get("n", 0)))
            return ParsedSpec(kind, dist, dist.K, seed)
        if kind == "concrete":
            _check_keys(obj, {"z", "beta"})
            z = _vector(obj, "z")
            _check_k(obj, z.size)
            beta = _scalar(obj, "beta")
            extrinsic._check_concrete_args(z, beta)
            return ParsedSpec(kind, _ConcreteDist(z, beta), z.size, seed)
    except SpecError:
        raise
    except (ValueError, TypeError, KeyError) as e:
        raise SpecError(f"invalid parameters for kind {kind!r}: {e}") from e
    raise AssertionError("unreachable")


def load_spec_file(path: str) -> ParsedSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise SpecError(f"cannot read spec file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise SpecError(f"spec file {path} is not valid JSON: {e}") from e
    return parse_spec(obj)
