"""Command-line front end.

Subcommands::

    sinkflow solve --alpha 3 --output out/
    sinkflow sweep --alpha-range 2.6:10:8:log --jobs 4 --output out/
    sinkflow verify --seed 42 --output out/
    sinkflow asymptotics --alpha 3 --output out/

Exit status: 0 success, 1 a check failed or the solver did not converge,
2 bad usage (including alpha below the existence threshold), 3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import output
from .diagnostics import (all_passed, check_constants, check_contraction,
                          check_operator_bounds, check_solution)
from .errors import (ConvergenceError, RegimeError, RegimeWarning,
                     ResolutionError)
from .nekrasov import EXISTENCE_ALPHA, FlowParams
from .solver import SolverConfig, solve, sweep
from .surface import bernoulli_residual, cusp_asymptotics, reconstruct_surface

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
COMMANDS = ("solve", "sweep", "verify", "asymptotics")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: float | None = None
    alpha_range: tuple | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_path: Path = Path(".")
    output_format: str = "csv"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.alpha is not None and self.alpha_range is not None:
            raise UsageError("give either an alpha or an alpha range, not both")
        if self.alpha_range is not None and self.alpha_range[2] < 2:
            raise UsageError("alpha range count must be at least 2")
        if self.output_format not in ("csv", "json"):
            raise UsageError("format must be csv or json")

    def alphas(self) -> list[float]:
        if self.alpha_range is None:
            return [self.alpha]
        start, stop, count, log = self.alpha_range
        if log:
            return np.geomspace(start, stop, count).tolist()
        return np.linspace(start, stop, count).tolist()


def parse_alpha_range(text: str) -> tuple:
    """``"A:B:N"`` or ``"A:B:N:log"`` to ``(A, B, N, log)``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise argparse.ArgumentTypeError(f"expected A:B:N[:log], got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number in alpha range {text!r}") from None
    if count < 2:
        raise argparse.ArgumentTypeError("alpha range count must be at least 2")
    log = len(parts) == 4 and parts[3] == "log"
    if log and min(start, stop) <= 0:
        raise argparse.ArgumentTypeError("log alpha range needs positive endpoints")
    return start, stop, count, log


def parse_schedule(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip()
        if item.lower() == "inf":
            out.append(math.inf)
            continue
        try:
            out.append(int(item))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad regularization index {item!r}") from None
    if not out or out[-1] != math.inf:
        out.append(math.inf)
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    which = common.add_mutually_exclusive_group()
    which.add_argument("--alpha", type=float, help="reduced Froude number Fr^2/2")
    which.add_argument("--froude", type=float, help="Froude number (alpha = F^2/2)")
    which.add_argument("--alpha-range", type=parse_alpha_range, metavar="A:B:N[:log]")
    d = SolverConfig()
    common.add_argument("--modes", type=int, default=d.modes)
    common.add_argument("--nodes", type=int, default=d.nodes)
    common.add_argument("--tol", type=float, default=d.tol)
    common.add_argument("--max-iter", type=int, default=d.max_iter)
    common.add_argument("--sigma-min", type=float, default=d.sigma_min)
    common.add_argument("--reg-schedule", type=parse_schedule, default=d.reg_schedule,
                        metavar="K1,K2,...", help="regularization ladder; inf is appended")
    common.add_argument("--output", type=Path, default=Path("."),
                        help="output directory (created if missing)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(
        prog="sinkflow", description="Free surface above a line sink in supercritical flow.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve at one alpha")
    sub.add_parser("sweep", parents=[common], help="solve over an alpha range")
    sub.add_parser("verify", parents=[common], help="run the bound checks")
    sub.add_parser("asymptotics", parents=[common], help="fit the cusp power law")
    return parser


def config_from_args(args) -> RunConfig:
    alpha = args.alpha
    if args.froude is not None:
        alpha = FlowParams.from_froude(args.froude).alpha
    if args.command == "sweep" and args.alpha_range is None:
        raise UsageError("sweep needs --alpha-range")
    if args.command in ("solve", "asymptotics"):
        if args.alpha_range is not None:
            raise UsageError(f"{args.command} takes --alpha or --froude, not a range")
        if alpha is None:
            raise UsageError(f"{args.command} needs --alpha or --froude")
    if args.command == "verify" and alpha is None:
        alpha = 3.0
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        solver = SolverConfig(tol=args.tol, max_iter=args.max_iter, modes=args.modes,
                              nodes=args.nodes, reg_schedule=args.reg_schedule,
                              sigma_min=args.sigma_min)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(command=args.command, alpha=alpha, alpha_range=args.alpha_range,
                     solver=solver, output_path=args.output, output_format=args.format,
                     seed=args.seed, jobs=args.jobs)


def _params(alpha) -> FlowParams:
    try:
        p = FlowParams(alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not p.existence_guaranteed:
        raise UsageError(
            f"alpha={alpha:g} is below the existence threshold "
            f"{EXISTENCE_ALPHA:.4f}; no nonnegative solution is known")
    return p


def _note(msg):
    print(f"sinkflow: {msg}", file=sys.stderr)


def _solve_one(p, cfg):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        zeta, report = solve(p, cfg)
    for w in caught:
        _note(f"warning: {w.message}")
    return zeta, report


def _run_solve(cfg: RunConfig, ext: str) -> int:
    p = _params(cfg.alpha)
    out = cfg.output_path
    meta = output.metadata(p.alpha, cfg.solver)
    try:
        zeta, report = _solve_one(p, cfg.solver)
    except ConvergenceError as exc:
        output.write_json(out / "report.json",
                          {"metadata": meta, "report": exc.report.to_dict()
                           if exc.report else {"error": str(exc)}})
        _note(str(exc))
        return EXIT_FAIL
    sol = reconstruct_surface(zeta, p, cfg.solver.modes)
    r = bernoulli_residual(sol.tau, sol.boundary, p)
    output.write_profile(out / f"profile.{ext}", sol, cfg.output_format, meta)
    output.write_json(out / "report.json", {
        "metadata": meta,
        "report": report.to_dict(),
        "surface": {"zeta_norm": zeta.norm(), "y0": sol.y0, "beta": sol.beta,
                    "c0": sol.c0, "a": sol.a,
                    "bernoulli_sup": float(np.abs(r.values).max())},
    })
    return EXIT_OK


def _run_sweep(cfg: RunConfig, ext: str) -> int:
    alphas = cfg.alphas()
    params = [_params(a) for a in alphas]
    for p in params:
        if not p.uniqueness_guaranteed:
            _note(f"warning: alpha={p.alpha:g} is in the existence-only regime")
    results = sweep(params, cfg.solver, jobs=cfg.jobs, warm_start=cfg.jobs == 1)
    rows, reports, ok = [], [], True
    for p, (zeta, report) in zip(params, results):
        reports.append(report.to_dict())
        if zeta is None:
            ok = False
            rows.append(output.summary_row(None, report, None))
            continue
        sol = reconstruct_surface(zeta, p, cfg.solver.modes)
        r = float(np.abs(bernoulli_residual(sol.tau, sol.boundary, p).values).max())
        rows.append(output.summary_row(sol, report, r))
        output.write_profile(cfg.output_path / f"profile_alpha_{p.alpha:.6g}.{ext}", sol,
                             cfg.output_format, output.metadata(p.alpha, cfg.solver))
    meta = output.metadata(None, cfg.solver, alphas=alphas, jobs=cfg.jobs)
    output.write_table(cfg.output_path / f"summary.{ext}", output.SUMMARY_COLUMNS,
                       rows, cfg.output_format, meta)
    output.write_json(cfg.output_path / "report.json", {"metadata": meta, "reports": reports})
    return EXIT_OK if ok else EXIT_FAIL


def _run_verify(cfg: RunConfig, ext: str) -> int:
    p = _params(cfg.alpha)
    results = check_constants()
    results += check_operator_bounds(1000, cfg.seed)
    results.append(check_contraction(p, 100, cfg.seed, grid=cfg.solver.grid(),
                                     modes=cfg.solver.modes))
    try:
        zeta, _ = _solve_one(p, cfg.solver)
    except ConvergenceError as exc:
        _note(str(exc))
        zeta = None
    if zeta is not None:
        sol = reconstruct_surface(zeta, p, cfg.solver.modes)
        results += check_solution(zeta, sol, p)
    meta = output.metadata(p.alpha, cfg.solver, seed=cfg.seed)
    output.write_table(cfg.output_path / f"checks.{ext}", output.CHECK_COLUMNS,
                       output.check_rows(results), cfg.output_format, meta)
    for r in results:
        if not r.passed:
            _note(f"check failed: {r.name} (bound {r.bound:g}, observed {r.observed:g})")
    return EXIT_OK if zeta is not None and all_passed(results) else EXIT_FAIL


def _run_asymptotics(cfg: RunConfig, ext: str) -> int:
    p = _params(cfg.alpha)
    if not p.cusp_regime:
        raise UsageError(str(RegimeError(
            f"cusp asymptotics need alpha > 5/sqrt(8), got {p.alpha:g}")))
    try:
        zeta, report = _solve_one(p, cfg.solver)
    except ConvergenceError as exc:
        _note(str(exc))
        return EXIT_FAIL
    sol = reconstruct_surface(zeta, p, cfg.solver.modes)
    try:
        fit = cusp_asymptotics(sol, p)
    except ResolutionError as exc:
        _note(str(exc))
        return EXIT_FAIL
    meta = output.metadata(p.alpha, cfg.solver, fit=output.cusp_summary(fit))
    output.write_table(cfg.output_path / f"cusp_fit.{ext}", output.CUSP_COLUMNS,
                       list(zip(fit.x.tolist(), fit.dy.tolist())), cfg.output_format, meta)
    output.write_json(cfg.output_path / "report.json",
                      {"metadata": meta, "report": report.to_dict()})
    return EXIT_OK


_RUNNERS = {"solve": _run_solve, "sweep": _run_sweep, "verify": _run_verify,
            "asymptotics": _run_asymptotics}


def run(cfg: RunConfig) -> int:
    """Execute one command and return its exit status."""
    try:
        cfg.output_path.mkdir(parents=True, exist_ok=True)
        return _RUNNERS[cfg.command](cfg, cfg.output_format)
    except UsageError as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _note(f"I/O error: {exc}")
        return EXIT_IO


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _note(f"error: {exc}")
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
