"""Command-line front end.

Subcommands:
  spectrum   forward spectral data (mean, lambda_tilde, n*kappa) as JSON
  eigen      one mode's fields (g, grad lambda, grad kappa, V, W) as CSV
  transform  apply a named integral operator to a CSV grid function
  recover    potential recovery from target spectral data (JSON in,
             CSV potential + JSON report out)
  isoflow    isospectral tangent/normal fields for coefficient sequences
  verify     run the invariant suites, emit a JSON report

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 numerical failure.
Floats are serialized with 17 significant digits so outputs are
byte-reproducible for a fixed configuration.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import checks, inverse, spectrum, transform
from .errors import SlspecError
from .numerics import Grid, GridFn, RealSeq, read_grid_fn_csv, write_grid_fn_csv
from .potentials import Potential, make_potential

__all__ = ["main", "RunConfig"]

_OUTDIR_ENV = "SLSPEC_OUTDIR"


@dataclass
class RunConfig:
    """Validated knobs shared by the subcommands."""

    a: int
    n_modes: int
    n_points: int
    root_tol: float
    recovery_tol: float
    potential: str | None
    outdir: Path
    seed: int

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("a must be >= 0")
        if self.n_modes < 1:
            raise ValueError("modes must be >= 1")
        if self.n_points < 129 or self.n_points % 2 == 0:
            raise ValueError("n-points must be odd and >= 129")
        if self.root_tol <= 0 or self.recovery_tol <= 0:
            raise ValueError("tolerances must be positive")

    @property
    def grid(self) -> Grid:
        return Grid(self.n_points)


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return '"' + x.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    raise TypeError(f"cannot serialize {type(x)}")


def dump_json(obj, path: Path | None = None) -> str:
    text = _fmt(obj) + "\n"
    if path is not None:
        path.write_text(text, encoding="utf-8")
    return text


def _load_json(path: str) -> dict:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_potential(cfg: RunConfig, grid: Grid) -> Potential:
    spec = cfg.potential or "zero"
    if spec.endswith(".csv") or os.path.sep in spec:
        return Potential.from_csv(grid, spec)
    return make_potential(grid, spec)


def _parse_seq(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in text.split(",") if tok.strip()])


def cmd_spectrum(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    q = _resolve_potential(cfg, grid)
    sd = spectrum.spectral_map(cfg.a, q, cfg.n_modes)
    text = dump_json(sd.to_dict(), cfg.outdir / "spectrum.json")
    sys.stdout.write(text)
    return 0


def cmd_eigen(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    q = _resolve_potential(cfg, grid)
    mode = spectrum.eigen_data(cfg.a, q, args.n)
    path = cfg.outdir / f"eigen_{args.n}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,g,grad_lambda,grad_kappa,v_field,w_field\n")
        for i in range(grid.n_points):
            row = (
                grid.x[i],
                mode.g.values[i],
                mode.grad_lambda.values[i],
                mode.grad_kappa.values[i],
                mode.v_field.values[i],
                mode.w_field.values[i],
            )
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_transform(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    f = read_grid_fn_csv(grid, args.input)
    out = transform.apply_operator(args.kind, cfg.a, f)
    path = cfg.outdir / "transform.csv"
    write_grid_fn_csv(out, path)
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_recover(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    target = inverse.SpectralTarget.from_dict(_load_json(args.target))
    if target.order != cfg.a:
        raise ValueError(f"target has a={target.order}, requested a={cfg.a}")
    q0 = _resolve_potential(cfg, grid) if cfg.potential else Potential.zero(grid)
    rep = inverse.recover(
        cfg.a,
        target,
        q0=q0,
        tol=cfg.recovery_tol,
        max_iter=args.max_iter,
        grid=grid,
    )
    write_grid_fn_csv(rep.final_potential.samples, cfg.outdir / "recovered.csv")
    report = {
        "converged": rep.converged,
        "iterations": rep.iterations,
        "data_residual_history": rep.data_residual_history,
    }
    text = dump_json(report, cfg.outdir / "recovery_report.json")
    sys.stdout.write(text)
    return 0 if rep.converged else 1


def cmd_isoflow(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    q = _resolve_potential(cfg, grid)
    xi = _parse_seq(args.xi) if args.xi else np.zeros(cfg.n_modes)
    eta = _parse_seq(args.eta) if args.eta else np.zeros(cfg.n_modes)
    tangent = inverse.iso_tangent(cfg.a, q, RealSeq(xi)) if len(xi) else grid.constant(0.0)
    normal = (
        inverse.iso_normal(cfg.a, q, args.eta0, RealSeq(eta))
        if len(eta)
        else grid.constant(args.eta0)
    )
    path = cfg.outdir / "isoflow.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,tangent,normal\n")
        for i in range(grid.n_points):
            fh.write(
                f"{grid.x[i]:.17g},{tangent.values[i]:.17g},{normal.values[i]:.17g}\n"
            )
    sys.stdout.write(f"{path}\n")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    grid = cfg.grid
    results = checks.run_suite(args.suite, grid, a=cfg.a, seed=cfg.seed)
    report = [r.to_dict() for r in results]
    text = dump_json(report, cfg.outdir / "verify_report.json")
    sys.stdout.write(text)
    ok = all(r.passed for r in results)
    return 0 if ok else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="slspec",
        description="Direct and inverse Dirichlet spectral problems for "
        "-y'' + a(a+1)/x^2 y + q y on [0,1].",
    )
    p.add_argument("--a", type=int, default=0, help="angular order (integer >= 0)")
    p.add_argument("--modes", type=int, default=8, help="number of modes N")
    p.add_argument("--n-points", type=int, default=2049, help="grid nodes (odd, >= 129)")
    p.add_argument("--root-tol", type=float, default=1e-10)
    p.add_argument("--tol", type=float, default=1e-6, help="recovery tolerance")
    p.add_argument("--potential", type=str, default=None,
                   help="named form (zero|const:c|cos:k,amp|bump:c,w,amp|poly:c0,c1,...) or CSV path")
    p.add_argument("--out", type=str, default=None,
                   help=f"output directory (default: ${_OUTDIR_ENV} or '.')")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", help="emit SpectralData as JSON")
    pe = sub.add_parser("eigen", help="emit one mode's fields as CSV")
    pe.add_argument("--n", type=int, required=True, help="mode index (1-based)")
    pt = sub.add_parser("transform", help="apply an integral operator to a CSV grid function")
    pt.add_argument("--kind", choices=sorted(transform.OPERATOR_KINDS), required=True)
    pt.add_argument("--input", required=True, help="CSV file with header x,value")
    pr = sub.add_parser("recover", help="recover a potential from spectral data")
    pr.add_argument("--target", required=True, help="SpectralData JSON file")
    pr.add_argument("--max-iter", type=int, default=30)
    pi = sub.add_parser("isoflow", help="emit isospectral tangent/normal fields as CSV")
    pi.add_argument("--xi", type=str, default="", help="comma-separated tangent coefficients")
    pi.add_argument("--eta", type=str, default="", help="comma-separated normal coefficients")
    pi.add_argument("--eta0", type=float, default=0.0)
    pv = sub.add_parser("verify", help="run invariant suites")
    pv.add_argument("--suite", default="all",
                    choices=sorted(checks.SUITES) + ["all"])
    return p


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "eigen": cmd_eigen,
    "transform": cmd_transform,
    "recover": cmd_recover,
    "isoflow": cmd_isoflow,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    outdir = Path(args.out or os.environ.get(_OUTDIR_ENV, "."))
    try:
        cfg = RunConfig(
            a=args.a,
            n_modes=args.modes,
            n_points=args.n_points,
            root_tol=args.root_tol,
            recovery_tol=args.tol,
            potential=args.potential,
            outdir=outdir,
            seed=args.seed,
        )
    except ValueError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except SlspecError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
