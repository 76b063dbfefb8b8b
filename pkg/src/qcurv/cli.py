"""Command-line front end.

Every subcommand reads a JSON profile document, runs one analysis and writes
a deterministic JSON report or CSV table. Reports embed the run settings along
with the calibration constants in use.

Exit status: 0 on success, 1 on a numerical failure or a violated
inequality, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .averaging import symmetrization_report
from .core import (DEFAULT_QUAD, DimensionError, QCurvError, QuadratureSpec, SchemaError, make_dim,
                   to_jsonable)
from .curvature import calibration_constants, curvature_frames, q_density
from .gbc import f_lambda, levelset_identity, multi_end_total, verify_gbc_rn
from .kernels import kernel_table, offset_grids, verify_lemma2
from .profiles import SphericalField, load_profile
from .radial import EndSpec, completeness_check, equality_case_check
from .suite import LEVELS, SuiteConfig, run_suite

SUBCOMMANDS = ("curvature", "kernels", "ends", "symmetrize", "gbc-verify", "levelset", "suite")
THREADS_ENV = "QCURV_THREADS"


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    format: str = "json"
    n: int | None = None
    seed: int = 0
    quad: QuadratureSpec = DEFAULT_QUAD
    tol: float = 1e-3
    workers: int = 1
    options: dict = field(default_factory=dict)


@dataclass
class Result:
    """What a subcommand produced: a JSON payload, CSV rows, and a status."""

    payload: object
    header: tuple = ()
    rows: list = field(default_factory=list)
    status: int = 0
    n: int | None = None


# -- subcommands -------------------------------------------------------------

def _profile(cfg: RunConfig):
    if cfg.input is None:
        raise SchemaError(f"{cfg.command} needs --input")
    try:
        doc = load_profile(cfg.input)
    except OSError as exc:
        raise SchemaError(f"cannot read {cfg.input}: {exc.strerror}") from exc
    n = doc.n if cfg.n is None else cfg.n
    try:
        make_dim(n)
    except DimensionError as exc:
        raise SchemaError(f"--n: {exc}") from exc
    return doc, n


def cmd_curvature(cfg: RunConfig) -> Result:
    doc, n = _profile(cfg)
    radii = cfg.options.get("radii") or np.geomspace(0.1, 10.0, 25)
    frames = curvature_frames(doc.profile, n, radii)
    m = n // 2
    header = ("r", "w", "R", "J", "Q", "lap_g_J", *(f"sigma_{k}" for k in range(1, m + 1)),
              "pfaffian")
    rows = [(f.r, f.w, f.R, f.J, f.Q, f.lap_g_J, *f.sigma, f.pfaff_sigma) for f in frames]
    return Result([f.to_dict() for f in frames], header, rows, n=n)


def cmd_kernels(cfg: RunConfig) -> Result:
    _, n = _profile(cfg)
    r, s = offset_grids(cfg.options.get("grid", 30))
    table = kernel_table(n, r, s, "quadrature", cfg.quad)
    payload = {"identity_defect": table.identity_defect()}
    if n <= 6:
        payload["structure"] = verify_lemma2(n, r, s, cfg.quad, tol=1e-6).to_dict()
    return Result(payload, ("r", "s", "II", "G", "L"), list(table.rows()), n=n)


def cmd_ends(cfg: RunConfig) -> Result:
    doc, n = _profile(cfg)
    p = doc.profile
    equality = equality_case_check(p, n)
    ends = []
    for end in ["infinity"] + (["origin"] if p.punctured_origin else []):
        res = completeness_check(p, end, tol=cfg.tol)
        ends.append({"location": end, "c1": res.c1, "completeness": res.verdict,
                     "borderline": res.borderline, "equality_case": equality})
    header = ("location", "c1", "completeness", "borderline", "equality_case")
    return Result({"ends": ends}, header, [tuple(e[k] for k in header) for e in ends], n=n)


def cmd_symmetrize(cfg: RunConfig) -> Result:
    doc, n = _profile(cfg)
    ang = doc.angular or {"mode": "none", "eps": 0.0}
    r = np.geomspace(0.05, cfg.quad.r_max / 2, 160)
    fld = SphericalField.from_profile(doc.profile, r, n, nodes=cfg.quad.angular_nodes,
                                      eps=ang["eps"], harmonic=ang["mode"],
                                      center=ang.get("center", 2.0), width=ang.get("width", 1.0))
    rep = symmetrization_report(fld, field_id=str(cfg.input))
    ok = rep.shell_defect < 10 * cfg.quad.eps_quad and rep.sign_preserved is not False
    payload = {**rep.to_dict(), "shell_ok": rep.shell_defect < 10 * cfg.quad.eps_quad}
    return Result(payload, ("r", "ratio"), rep.claim2_ratio.rows(), 0 if ok else 1, n)


def cmd_gbc_verify(cfg: RunConfig) -> Result:
    doc, n = _profile(cfg)
    p = doc.profile
    if p.punctured_origin:
        rep = multi_end_total([EndSpec("infinity", p), EndSpec("origin", p)], dim=n,
                              quad=cfg.quad, tol=cfg.tol)
        r = np.geomspace(1.0 / cfg.quad.r_max, cfg.quad.r_max, 200)
    else:
        rep = verify_gbc_rn(p, n, cfg.quad, tol=cfg.tol)
        r = np.geomspace(1e-2, cfg.quad.r_max, 200)
    rows = list(zip(r, q_density(p, n, r)))
    return Result(rep.to_dict(), ("r", "q_density"), rows,
                  1 if rep.verdict == "violated" else 0, n)


def cmd_levelset(cfg: RunConfig) -> Result:
    doc, n = _profile(cfg)
    p = doc.profile
    out, rows = [], []
    for lam in cfg.options.get("levels") or LEVELS:
        ident = levelset_identity(p, lambda L: L, lam, dim=n)
        frame = f_lambda(p, lam, dim=n)
        out.append({"identity": ident.to_dict(), "frame": frame.to_dict()})
        rows.append((lam, frame.F, ident.lhs, ident.rhs, ident.defect))
    return Result(out, ("lambda", "F", "lhs", "rhs", "defect"), rows, n=n)


def cmd_suite(cfg: RunConfig) -> Result:
    results = run_suite(SuiteConfig(seed=cfg.seed, quad=cfg.quad, workers=cfg.workers))
    for res in results:
        print(res.line() + (f"  {res.error}" if res.error else ""), file=sys.stderr)
    passed = all(res.passed for res in results)
    payload = {"all_passed": passed, "criteria": [res.to_dict(timing=False) for res in results]}
    rows = [(res.number, res.title, res.passed, res.error or "") for res in results]
    return Result(payload, ("criterion", "title", "passed", "error"), rows, 0 if passed else 1)


COMMANDS = {"curvature": cmd_curvature, "kernels": cmd_kernels, "ends": cmd_ends,
            "symmetrize": cmd_symmetrize, "gbc-verify": cmd_gbc_verify,
            "levelset": cmd_levelset, "suite": cmd_suite}


# -- rendering -----------------------------------------------------------------

def _context(cfg: RunConfig, n):
    return {"command": cfg.command, "n": n, "seed": cfg.seed, "tol": cfg.tol,
            "quadrature": asdict(cfg.quad), "calibration": calibration_constants().to_dict()}


def render(cfg: RunConfig, res: Result) -> str:
    ctx = to_jsonable(_context(cfg, res.n))
    if cfg.format == "json":
        return json.dumps({**ctx, "result": to_jsonable(res.payload)}, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    for key in sorted(ctx):
        buf.write(f"# {key}: {json.dumps(ctx[key], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(res.header)
    writer.writerows(to_jsonable([list(row) for row in res.rows]))
    return buf.getvalue()


def run(cfg: RunConfig) -> int:
    try:
        res = COMMANDS[cfg.command](cfg)
        text = render(cfg, res)
    except SchemaError as exc:
        print(f"qcurv: invalid input: {exc}", file=sys.stderr)
        return 2
    except QCurvError as exc:
        print(f"qcurv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        cfg.output.write_text(text, encoding="utf-8")
    return res.status


# -- argument parsing -------------------------------------------------------------

def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="profile document (JSON)")
    common.add_argument("--output", type=Path, help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--n", type=int, help="dimension, overriding the profile document")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--rmax", type=float, help="outer radius R_max")
    common.add_argument("--nodes", type=int, help="radial and angular node counts")
    common.add_argument("--tol", type=float, default=1e-3, help="verification tolerance")

    parser = argparse.ArgumentParser(prog="qcurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"curvature": "curvature frames at sample radii",
             "kernels": "spherical-mean kernel table and structure fit",
             "ends": "asymptotic exponent and completeness of each end",
             "symmetrize": "spherical averaging of a perturbed field",
             "gbc-verify": "total Q-curvature against the topological bound",
             "levelset": "level-set identities in dimension 4",
             "suite": "run the acceptance battery"}
    cmds = {name: sub.add_parser(name, parents=[common], help=helps[name]) for name in SUBCOMMANDS}
    cmds["curvature"].add_argument("--radii", type=_floats, help="comma-separated radii")
    cmds["kernels"].add_argument("--grid", type=int, default=30, help="points per grid axis")
    cmds["levelset"].add_argument("--levels", type=_floats, help="comma-separated levels")
    return parser


def _threads(parser):
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value < 1:
        parser.error(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def config_from_args(args, parser) -> RunConfig:
    quad = DEFAULT_QUAD
    try:
        if args.rmax is not None:
            quad = replace(quad, r_max=args.rmax)
        if args.nodes is not None:
            quad = replace(quad, radial_nodes=args.nodes, angular_nodes=args.nodes)
    except ValueError as exc:
        parser.error(str(exc))
    if not args.tol > 0:
        parser.error("--tol must be positive")
    options = {k: getattr(args, k) for k in ("radii", "grid", "levels") if hasattr(args, k)}
    return RunConfig(args.command, args.input, args.output, args.format, args.n, args.seed,
                     quad, args.tol, _threads(parser), options)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(config_from_args(args, parser))


if __name__ == "__main__":
    sys.exit(main())
