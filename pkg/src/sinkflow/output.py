"""Flat-file emitters for profiles, run reports, check lists and cusp fits.

CSV floats use ``%.17g``.  JSON floats use Python's shortest round-trip
representation, which is exact and stable across runs.  Non-finite floats
become ``null`` in JSON.  Column order and JSON keys are part of the file
schema and are fixed here.
"""
from __future__ import annotations

import csv
import json
import math

import numpy as np
import scipy

from . import __version__

PROFILE_COLUMNS = ("sigma", "x", "y", "tau", "theta", "eta", "speed")
SUMMARY_COLUMNS = ("alpha", "zeta_norm", "y0", "beta", "a", "bernoulli_sup",
                   "iterations", "converged")
CHECK_COLUMNS = ("name", "bound", "observed", "margin", "passed")
CUSP_COLUMNS = ("x", "y_minus_y0")

FLOAT_FORMAT = "%.17g"


def module_versions() -> dict:
    return {"sinkflow": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def metadata(alpha: float | None, config=None, **extra) -> dict:
    meta = {}
    if alpha is not None:
        meta["alpha"] = float(alpha)
        meta["froude"] = math.sqrt(2.0 * alpha)
    if config is not None:
        meta["config"] = config.to_dict()
    meta.update(extra)
    meta["versions"] = module_versions()
    return meta


def profile_table(solution) -> np.ndarray:
    """Columns of :data:`PROFILE_COLUMNS` stacked as an ``(M, 7)`` array."""
    b = solution.boundary
    return np.column_stack([b.sigma, b.x, b.y, solution.tau.values,
                            solution.theta.values, solution.eta.values,
                            solution.speed])


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars and arrays become plain Python
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % v
    return str(v)


def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_table(path, columns, rows, fmt: str, meta: dict | None = None):
    """Write ``rows`` as CSV, or as JSON ``{"metadata", "columns", "data"}``."""
    if fmt == "csv":
        write_csv(path, columns, rows)
    elif fmt == "json":
        data = {c: [row[i] for row in rows] for i, c in enumerate(columns)}
        write_json(path, {"metadata": meta or {}, "columns": list(columns), "data": data})
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_profile(path, solution, fmt: str, meta: dict | None = None):
    rows = [tuple(float(v) for v in r) for r in profile_table(solution)]
    write_table(path, PROFILE_COLUMNS, rows, fmt, meta)


def summary_row(solution, report, bernoulli_sup) -> tuple:
    if solution is None:
        nan = math.nan
        return (report.alpha, nan, nan, nan, nan, nan, report.total_iterations, False)
    return (solution.params.alpha, solution.zeta.norm(), solution.y0, solution.beta,
            solution.a, bernoulli_sup, report.total_iterations, report.converged)


def check_rows(results) -> list:
    return [(r.name, r.bound, r.observed, r.margin, r.passed) for r in results]


def cusp_summary(fit) -> dict:
    return {"beta": fit.beta, "c0": fit.c0, "a": fit.a, "a_sqrt_c0": fit.a_sqrt_c0,
            "y0": fit.y0, "exponent": fit.exponent, "coefficient": fit.coefficient,
            "coefficient_fixed_exponent": fit.coefficient_fixed,
            "window": list(fit.window), "points": fit.points}
