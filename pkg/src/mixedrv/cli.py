"""Command-line interface.

Subcommands::

    mixedrv maxent     --k 5 --n-max 3 [--format csv|json] [--bits]
    mixedrv sample     --dist spec.json --num 1000 [--seed 0] --out samples.jsonl
    mixedrv entropy    --dist spec.json --mode exact|mc [--samples N] [--seed 0] [--bits]
    mixedrv kl         --dist p.json --dist2 q.json --mode exact|mc [--samples N] [--seed 0] [--bits]
    mixedrv face-hist  --in samples.jsonl
    mixedrv fit-glm    --data data.csv [--train-frac 0.2] [--steps 400] [--lr 0.1]
                       [--seed 0] --out model.json [--predict most-probable-mean|sample-mean]
    mixedrv gen-glm-data --out data.csv [--rows 500] [--k 5] [--d 4] [--seed 0]
    mixedrv check      [--level fast|full]

Exit codes: 0 success, 1 check failure, 2 usage or spec error, 3 I/O error,
4 data-format error.  All commands are deterministic given their seed and
inputs.  Entropies are in nats unless ``--bits`` is given.  Faces in files
are sorted lists of 1-based vertex indices.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections import Counter

import numpy as np

from . import checks, glm, info_theory
from .distspec import SpecError, load_spec_file
from .simplex import ResourceLimitError, SimplexPoint

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

_LN2 = math.log(2.0)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _to_unit(value: float, bits: bool) -> float:
    return value / _LN2 if bits else value


def _print_json(obj: dict):
    print(json.dumps(obj))


# ------------------------------------------------------------------ maxent ---

def cmd_maxent(args) -> int:
    from scipy.special import gammaln

    if args.k < 2:
        raise CliError(EXIT_USAGE, "--k must be >= 2")
    if args.n_max < 0:
        raise CliError(EXIT_USAGE, "--n-max must be >= 0")
    rows = []
    for K in range(2, args.k + 1):
        for N in range(0, args.n_max + 1):
            rows.append({
                "K": K,
                "N": N,
                "H_maxent": _to_unit(info_theory.maxent_entropy(K, N), args.bits),
                "H_discrete": _to_unit(math.log(K), args.bits),
                "H_continuous": _to_unit(-float(gammaln(K)) + 0.0, args.bits) if K > 2 else 0.0,
            })
    if args.format == "json":
        print(json.dumps(rows))
    else:
        print("K,N,H_maxent,H_discrete,H_continuous")
        for r in rows:
            print(f"{r['K']},{r['N']},{r['H_maxent']!r},{r['H_discrete']!r},{r['H_continuous']!r}")
    return EXIT_OK


# ------------------------------------------------------------------ sample ---

def _resolve_seed(args_seed, spec_seed) -> int:
    if args_seed is not None:
        return args_seed
    if spec_seed is not None:
        return spec_seed
    return 0


def _sample_lines(spec, num: int, seed: int):
    rng = np.random.default_rng(seed)
    for face, point in spec.dist.sample_many(num, rng):
        yield json.dumps({
            "face": [i + 1 for i in face.indices],
            "dim": face.dim,
            "y": [float(v) for v in point.coords],
        })


def cmd_sample(args) -> int:
    if args.num < 1:
        raise CliError(EXIT_USAGE, "--num must be >= 1")
    spec = load_spec_file(args.dist)
    seed = _resolve_seed(args.seed, spec.default_seed)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            for line in _sample_lines(spec, args.num, seed):
                fh.write(line + "\n")
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from e
    return EXIT_OK


# -------------------------------------------------------------- entropy/kl ---

def cmd_entropy(args) -> int:
    spec = load_spec_file(args.dist)
    unit = "bits" if args.bits else "nats"
    if args.mode == "exact":
        value = spec.exact_entropy()
        _print_json({"value": _to_unit(value, args.bits), "mode": "exact", "unit": unit})
        return EXIT_OK
    if not spec.supports_log_density:
        raise CliError(EXIT_USAGE, f"kind {spec.kind!r} has no density; mc entropy unavailable")
    seed = _resolve_seed(args.seed, spec.default_seed)
    est = info_theory.direct_sum_entropy_mc(spec.dist, args.samples, np.random.default_rng(seed))
    _print_json({
        "value": _to_unit(est.estimate, args.bits),
        "std_error": _to_unit(est.std_error, args.bits),
        "mode": "mc",
        "samples": args.samples,
        "unit": unit,
    })
    return EXIT_OK


def cmd_kl(args) -> int:
    spec_p = load_spec_file(args.dist)
    spec_q = load_spec_file(args.dist2)
    unit = "bits" if args.bits else "nats"
    if args.mode == "exact":
        value = spec_p.exact_kl(spec_q)
        _print_json({"value": _to_unit(value, args.bits), "mode": "exact", "unit": unit})
        return EXIT_OK
    if not (spec_p.supports_log_density and spec_q.supports_log_density):
        raise CliError(EXIT_USAGE, "mc KL needs both kinds to expose a density")
    seed = _resolve_seed(args.seed, spec_p.default_seed)
    est = info_theory.direct_sum_kl_mc(spec_p.dist, spec_q.dist, args.samples, np.random.default_rng(seed))
    if est.is_infinite:
        _print_json({
            "value": None,
            "support_violation": True,
            "violations": est.support_violations,
            "mode": "mc",
            "samples": args.samples,
            "unit": unit,
        })
        return EXIT_OK
    _print_json({
        "value": _to_unit(est.estimate, args.bits),
        "std_error": _to_unit(est.std_error, args.bits),
        "support_violation": False,
        "mode": "mc",
        "samples": args.samples,
        "unit": unit,
    })
    return EXIT_OK


# --------------------------------------------------------------- face-hist ---

def cmd_face_hist(args) -> int:
    try:
        with open(args.infile, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {args.infile}: {e}") from e
    if not lines:
        raise CliError(EXIT_DATA, f"{args.infile} is empty")
    dim_counts: Counter = Counter()
    face_counts: Counter = Counter()
    for lineno, line in enumerate(lines, start=1):
        try:
            obj = json.loads(line)
            face = tuple(sorted(int(i) for i in obj["face"]))
            dim = int(obj["dim"])
            if not face or dim != len(face) - 1:
                raise ValueError("face/dim mismatch")
        except (ValueError, KeyError, TypeError) as e:
            raise CliError(EXIT_DATA, f"{args.infile}:{lineno}: malformed sample line ({e})") from e
        dim_counts[dim] += 1
        face_counts[face] += 1
    total = len(lines)
    print("kind,label,count,fraction")
    for dim in sorted(dim_counts):
        print(f"dim,{dim},{dim_counts[dim]},{dim_counts[dim] / total!r}")
    for face, cnt in sorted(face_counts.items(), key=lambda kv: (-kv[1], kv[0])):
        label = "+".join(map(str, face))
        print(f"face,{label},{cnt},{cnt / total!r}")
    return EXIT_OK


# ----------------------------------------------------------------- fit-glm ---

def _read_glm_csv(path: str):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise CliError(EXIT_DATA, f"{path} is empty") from None
            x_cols = [i for i, name in enumerate(header) if name.startswith("x")]
            y_cols = [i for i, name in enumerate(header) if name.startswith("y")]
            if not x_cols or len(y_cols) < 2:
                raise CliError(EXIT_DATA, f"{path}: header must name x* predictor and y* target columns")
            xs, ys = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    vals = [float(v) for v in row]
                except ValueError as e:
                    raise CliError(EXIT_DATA, f"{path}:{lineno}: non-numeric value ({e})") from e
                if len(vals) != len(header):
                    raise CliError(EXIT_DATA, f"{path}:{lineno}: expected {len(header)} columns")
                x = [vals[i] for i in x_cols]
                y = np.array([vals[i] for i in y_cols])
                if np.any(y < 0.0):
                    raise CliError(EXIT_DATA, f"{path}:{lineno}: negative target value")
                gap = abs(float(y.sum()) - 1.0)
                if gap > 1e-4:
                    raise CliError(EXIT_DATA, f"{path}:{lineno}: target row sums to {y.sum()!r}")
                if gap > 1e-9:
                    print(f"warning: {path}:{lineno}: target row sums to {y.sum()!r}; renormalizing",
                          file=sys.stderr)
                if gap > 0.0:
                    y = y / y.sum()
                xs.append(x)
                ys.append(SimplexPoint(y))
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}") from e
    if not xs:
        raise CliError(EXIT_DATA, f"{path} has no data rows")
    return np.array(xs), ys


def cmd_fit_glm(args) -> int:
    if not (0.0 < args.train_frac < 1.0):
        raise CliError(EXIT_USAGE, "--train-frac must be in (0, 1)")
    X, targets = _read_glm_csv(args.data)
    n = len(targets)
    rng = np.random.default_rng(args.seed)
    perm = rng.permutation(n)
    n_train = max(1, int(round(args.train_frac * n)))
    if n_train >= n:
        raise CliError(EXIT_USAGE, "train fraction leaves no held-out rows")
    tr, te = perm[:n_train], perm[n_train:]
    fit = glm.glm_fit(X[tr], [targets[i] for i in tr], steps=args.steps, lr=args.lr, seed=args.seed)
    y_true = np.stack([targets[i].coords for i in te])
    preds = []
    for j, i in enumerate(te):
        if args.predict == "sample-mean":
            p = glm.glm_predict(fit.model, X[i], "sample-mean", n=100,
                                rng=np.random.default_rng([args.seed, int(j)]))
        else:
            p = glm.glm_predict(fit.model, X[i], "most-probable-mean")
        preds.append(p.coords)
    y_pred = np.stack(preds)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(fit.model.to_json_dict(), fh)
            fh.write("\n")
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from e
    _print_json({
        "rmse": glm.rmse(y_true, y_pred),
        "mae": glm.mae(y_true, y_pred),
        "macro_f1": glm.zero_nonzero_macro_f1(y_true, y_pred),
        "n_train": int(n_train),
        "n_test": int(n - n_train),
        "predict": args.predict,
        "final_train_loss": float(fit.losses[-1]),
    })
    return EXIT_OK


def cmd_gen_glm_data(args) -> int:
    if args.rows < 2 or args.k < 2 or args.d < 1:
        raise CliError(EXIT_USAGE, "--rows >= 2, --k >= 2 and --d >= 1 required")
    X, targets, _ = glm.make_planted_dataset(n=args.rows, K=args.k, d=args.d, seed=args.seed)
    buf = io.StringIO()
    header = [f"x{j + 1}" for j in range(args.d)] + [f"y{j + 1}" for j in range(args.k)]
    buf.write(",".join(header) + "\n")
    for x, y in zip(X, targets):
        buf.write(",".join(repr(float(v)) for v in x) + ",")
        buf.write(",".join(repr(float(v)) for v in y.coords) + "\n")
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from e
    return EXIT_OK


# ------------------------------------------------------------------- check ---

def cmd_check(args) -> int:
    results = checks.run_checks(args.level)
    for r in results:
        if r.ok:
            print(f"PASS {r.name}")
        else:
            print(f"FAIL {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed (level={args.level})")
    if failed:
        print("FAILED: " + ", ".join(failed))
        return EXIT_CHECK_FAILED
    return EXIT_OK


# -------------------------------------------------------------------- main ---

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mixedrv",
                                description="Mixed distributions on the probability simplex")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("maxent", help="maximum-entropy table")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--bits", action="store_true")
    s.set_defaults(fn=cmd_maxent)

    s = sub.add_parser("sample", help="draw samples to a JSON-lines file")
    s.add_argument("--dist", required=True)
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_sample)

    s = sub.add_parser("entropy", help="direct-sum entropy of a distribution")
    s.add_argument("--dist", required=True)
    s.add_argument("--mode", choices=("exact", "mc"), required=True)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--bits", action="store_true")
    s.set_defaults(fn=cmd_entropy)

    s = sub.add_parser("kl", help="direct-sum KL divergence between two spec files")
    s.add_argument("--dist", required=True)
    s.add_argument("--dist2", required=True)
    s.add_argument("--mode", choices=("exact", "mc"), required=True)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--bits", action="store_true")
    s.set_defaults(fn=cmd_kl)

    s = sub.add_parser("face-hist", help="histogram of a samples file")
    s.add_argument("--in", dest="infile", required=True)
    s.set_defaults(fn=cmd_face_hist)

    s = sub.add_parser("fit-glm", help="fit the simplex regression model on a CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--train-frac", type=float, default=0.2)
    s.add_argument("--steps", type=int, default=400)
    s.add_argument("--lr", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--predict", choices=("most-probable-mean", "sample-mean"),
                   default="most-probable-mean")
    s.set_defaults(fn=cmd_fit_glm)

    s = sub.add_parser("gen-glm-data", help="write a planted synthetic GLM dataset")
    s.add_argument("--out", required=True)
    s.add_argument("--rows", type=int, default=500)
    s.add_argument("--k", type=int, default=5)
    s.add_argument("--d", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_gen_glm_data)

    s = sub.add_parser("check", help="run the oracle cross-check suite")
    s.add_argument("--level", choices=("fast", "full"), default="fast")
    s.set_defaults(fn=cmd_check)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, NotImplementedError, ResourceLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
