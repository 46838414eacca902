"""Command-line front end: ``finsleroid --g G <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 domain or singularity error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from contextlib import contextmanager
from typing import Sequence

import numpy as np

from . import cospace, geodesics, metric, transform, verify
from .errors import FinsleroidError
from .params import DEFAULT_DIM, SectorLabel, classify_sector, derive_params

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt_float(x) -> str:
    """Shortest round-trip decimal form."""
    return repr(float(x) + 0.0)


def parse_vector(text: str, dim: int) -> np.ndarray:
    try:
        vals = [float(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}; expected comma-separated numbers R0,R1,...,Rd")
    if len(vals) != dim + 1:
        raise UsageError(f"vector {text!r} has {len(vals)} components; --dim {dim} needs {dim + 1}")
    if not all(math.isfinite(v) for v in vals):
        raise UsageError(f"vector {text!r} has non-finite components")
    return np.array(vals)


def parse_tol(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--tol value {val!r} is not a number")
    return out


def _record_lines(record: dict, fmt: str) -> list[str]:
    def cell(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return fmt_float(v)
        return str(v)

    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(record.keys())
        w.writerow([cell(v) for v in record.values()])
        return buf.getvalue().splitlines()
    return [json.dumps(record)]


def _vec_fields(prefix: str, v) -> dict:
    return {f"{prefix}{i}": float(c) for i, c in enumerate(np.asarray(v, dtype=float))}


def cmd_eval(args) -> tuple[list[str], int]:
    p = derive_params(args.g)
    x = parse_vector(args.vector, args.dim)
    sector = classify_sector(p, x)
    rec = {"g": p.g}
    rec.update(_vec_fields("R", x))
    rec["sector"] = sector.value
    rec["F"] = metric.fmf_F(p, x)
    rec["H"] = cospace.fhf_H(p, x)
    rec["B"] = metric.quadratic_form_B(p, x)
    try:
        rec["j"] = metric.weight_j(p, x)
    except FinsleroidError:
        rec["j"] = float("nan")
    rec["A"] = metric.func_A(p, x)
    rec["L"] = metric.func_L(p, x)
    if sector is SectorLabel.FutureTimelike:
        rec["det_g"] = metric.metric_tensor(p, x).det
    else:
        rec["det_g"] = float("nan")
    N = args.dim + 1
    rec["det_expected"] = (-1.0) ** (N - 1) * rec["j"] ** (2 * N)
    return _record_lines(rec, args.format), EXIT_OK


def cmd_transform(args) -> tuple[list[str], int]:
    p = derive_params(args.g)
    x = parse_vector(args.vector, args.dim)
    N = args.dim + 1
    t = transform.sigma(p, x)
    back = transform.mu(p, t).components
    jac = transform.sigma_jacobian(p, x)
    n_low, n_up = transform.n_tensor(p, t)
    j = metric.weight_j(p, x)
    rec = {"g": p.g}
    rec.update(_vec_fields("R", x))
    rec.update(_vec_fields("t", t.components))
    rec["S"] = transform.s_norm(t)
    rec["F"] = metric.fmf_F(p, x)
    rec["roundtrip_residual"] = float(np.max(np.abs(back - x)) / np.max(np.abs(x)))
    rec["det_jacobian"] = jac.det
    rec["det_jacobian_expected"] = j**N * p.h ** (N - 1)
    rec["det_n_upper"] = float(np.linalg.det(n_up))
    rec["det_n_lower"] = float(np.linalg.det(n_low))
    rec["det_n_upper_expected"] = (-1.0) ** (N - 1) * p.h ** (2 * N - 2)
    return _record_lines(rec, args.format), EXIT_OK


def _geodesic_lines(curve, samples: int, fmt: str, dim: int) -> list[str]:
    summary = {"a": curve.a, "b": curve.b, "alpha": curve.alpha, "delta_s": curve.delta_s}
    rows = []
    for smp in geodesics.sample(curve, samples):
        row = {"s": smp.s}
        row.update(_vec_fields("R", smp.point.components))
        row.update(_vec_fields("U", smp.velocity.components))
        row["F"] = smp.fmf
        row["X"] = geodesics.nonplanarity(curve, smp.s)
        rows.append(row)
    if fmt == "csv":
        header = ["s"] + [f"R{i}" for i in range(dim + 1)] + [f"U{i}" for i in range(dim + 1)] + ["F", "X"]
        lines = ["# " + " ".join(f"{k}={fmt_float(v)}" for k, v in summary.items()), ",".join(header)]
        lines += [",".join(fmt_float(row[k]) for k in header) for row in rows]
        return lines
    return [json.dumps({"summary": summary})] + [json.dumps(r) for r in rows]


def cmd_geodesic(args) -> tuple[list[str], int]:
    p = derive_params(args.g)
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    R1 = parse_vector(getattr(args, "from"), args.dim)
    if args.mode == "connect":
        R2 = parse_vector(args.to, args.dim)
    else:
        U1 = parse_vector(args.velocity, args.dim)
        if not args.delta_s > 0:
            raise UsageError("--delta-s must be positive")
        R2 = geodesics.shoot(p, R1, U1, args.delta_s)
    curve = geodesics.connect(p, R1, R2)
    return _geodesic_lines(curve, args.samples, args.format, args.dim), EXIT_OK


def cmd_verify(args) -> tuple[list[str], int]:
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    try:
        cfg = verify.FDConfig().with_tolerances(parse_tol(args.tol))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad --tol: {exc}")
    report = verify.run_suite([args.g], args.samples, args.seed, cfg, dim=args.dim)
    code = EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    return report.to_lines(args.format), code


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="finsleroid", description="Finsleroid-relativistic space toolkit")
    ap.add_argument("--g", type=float, default=0.0, help="coupling parameter (default 0)")
    ap.add_argument("--dim", type=int, default=DEFAULT_DIM, help="spatial dimension d (default 3)")
    ap.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    ap.add_argument("--output", help="write to FILE instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="scalars, sector and metric determinant of a vector")
    ev.add_argument("--vector", required=True)
    ev.set_defaults(func=cmd_eval)

    tr = sub.add_parser("transform", help="image under the quasi-pseudoeuclidean map")
    tr.add_argument("--vector", required=True)
    tr.set_defaults(func=cmd_transform)

    geo = sub.add_parser("geodesic", help="sample a geodesic")
    gsub = geo.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    con = gsub.add_parser("connect", help="geodesic through two endpoints")
    con.add_argument("--from", required=True)
    con.add_argument("--to", required=True)
    con.add_argument("--samples", type=int, default=11)
    sh = gsub.add_parser("shoot", help="geodesic from initial point and unit velocity")
    sh.add_argument("--from", required=True)
    sh.add_argument("--velocity", required=True)
    sh.add_argument("--delta-s", type=float, required=True)
    sh.add_argument("--samples", type=int, default=11)
    geo.set_defaults(func=cmd_geodesic)

    vf = sub.add_parser("verify", help="run the randomized identity suite")
    vf.add_argument("--samples", type=int, default=100)
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    vf.set_defaults(func=cmd_verify)
    return ap


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.dim < 1:
            raise UsageError("--dim must be >= 1")
        if not math.isfinite(args.g):
            raise UsageError("--g must be finite")
        lines, code = args.func(args)
    except UsageError as exc:
        print(f"finsleroid: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FinsleroidError as exc:
        print(f"finsleroid: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    with _sink(args.output) as out:
        for line in lines:
            out.write(line + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
