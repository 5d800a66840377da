"""Command-line front end.

Every subcommand builds a :class:`RunConfig`, which is validated before any
computation runs, and produces a :class:`ResultRecord` rendered as text, JSON
or CSV.  Errors go to standard error as a JSON object with ``code``,
``message`` and ``context``; usage problems exit with status 2 and numerical
failures with status 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import __version__
from .config import DEFAULT_CONFIG, QuadratureConfig
from .errors import ComputationError, DomainError, ShrinkerLabError, UsageError
from .jacobi import (
    KINDS,
    Region,
    build_f1_series,
    build_f2,
    build_g2,
    build_plane_f2,
    classify_region,
    dirichlet_ground_eigenvalue,
    find_r0,
    find_r1,
    growth_ratio,
    r1_approximations,
)
from .km_profiles import profile_from_cone, profile_mean_curvature, shoot_for_height
from .shrinker_geometry import ParametricHypersurface, f_functional, flow_sphere
from .spectrum import ShrinkerSpec, enumerate_spectrum, stability_index

FORMATS = ("text", "json", "csv")
TOLERANCE_FLAGS = {"abs_tol": "abs_tol", "grid": "grid_size", "dt": "ode_dt"}


# parameter schema -------------------------------------------------------


def _int_range(lo: int, hi: int | None = None) -> Callable[[Any], bool]:
    return lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= lo and (hi is None or v <= hi)


def _positive(v: Any) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v) and v > 0


def _finite(v: Any) -> bool:
    return isinstance(v, (int, float)) and math.isfinite(v)


def _finite_or_none(v: Any) -> bool:
    return v is None or _finite(v)


def _negative(v: Any) -> bool:
    return _finite(v) and v < 0


def _fraction_text(v: Any) -> bool:
    try:
        Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        return False
    return True


def _float_list(v: Any) -> bool:
    return isinstance(v, list) and len(v) > 0 and all(_finite(x) for x in v)


def _float_list_or_none(v: Any) -> bool:
    return v is None or (isinstance(v, list) and all(_finite(x) for x in v))


def _choice(*options: Any) -> Callable[[Any], bool]:
    return lambda v: v in options


SCHEMA: dict[str, dict[str, Callable[[Any], bool]]] = {
    "spectrum": {"n": _int_range(1, 64), "k": _int_range(0, 64), "ceiling": _fraction_text},
    "index": {"n": _int_range(1, 10_000), "k": _int_range(0, 10_000)},
    "jacobi-eval": {
        "solution": _choice("g2", "f2", "f1", "plane-f2"),
        "parameter": lambda v: v is None or _int_range(2, 64)(v),
        "x": _float_list,
    },
    "r1-table": {"n_max": _int_range(2, 16)},
    "r0": {},
    "region": {
        "n": _int_range(1, 64),
        "k": _int_range(0, 64),
        "kind": _choice(*KINDS),
        "a": _finite,
        "b": _finite_or_none,
        "side": _choice("above", "below"),
        "dirichlet": _choice(True, False),
    },
    "flow-sphere": {
        "n": _int_range(1, 64),
        "r_init": _positive,
        "t_init": _negative,
        "r_floor": lambda v: _finite(v) and v >= 0,
        "t_end": _finite_or_none,
        "every": _int_range(1),
    },
    "entropy": {
        "surface": _choice("sphere", "cylinder", "plane"),
        "dim": _int_range(1, 6),
        "k": lambda v: v is None or _int_range(1, 6)(v),
        "radius": lambda v: v is None or _positive(v),
        "t0": _positive,
        "x0": _float_list_or_none,
    },
    "profile": {
        "sigma": lambda v: v is None or _positive(v),
        "height": lambda v: v is None or (_finite(v) and 0 < v < math.sqrt(2)),
        "z_max": _positive,
        "every": _int_range(1),
    },
    "growth-ratio": {"n": _int_range(2, 64), "m_max": _int_range(1, 200)},
}


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    output: str = "text"
    tolerances: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in SCHEMA:
            raise UsageError(f"unknown command {self.command!r}", command=self.command)
        if self.output not in FORMATS:
            raise UsageError(f"unknown output format {self.output!r}", output=self.output)
        schema = SCHEMA[self.command]
        unknown = sorted(set(self.parameters) - set(schema))
        if unknown:
            raise UsageError("unknown parameters", command=self.command, unknown=unknown)
        missing = sorted(set(schema) - set(self.parameters))
        if missing:
            raise UsageError("missing parameters", command=self.command, missing=missing)
        for key, check in schema.items():
            if not check(self.parameters[key]):
                raise UsageError(
                    f"parameter {key!r} out of range", key=key, value=self.parameters[key]
                )
        try:
            self.quadrature()
        except ValueError as exc:
            raise UsageError(str(exc), tolerances=self.tolerances) from None

    def quadrature(self) -> QuadratureConfig:
        return DEFAULT_CONFIG.with_overrides(**self.tolerances)


# results ----------------------------------------------------------------


@dataclass
class ResultRecord:
    command: str
    parameters: dict[str, Any]
    tolerances: dict[str, Any]
    version: str
    summary: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "tolerances": self.tolerances,
            "version": self.version,
            "summary": self.summary,
            "columns": self.columns,
            "rows": self.rows,
        }
        return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> ResultRecord:
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.columns:
            writer.writerow(self.columns)
            writer.writerows(self.rows)
        else:
            writer.writerow(["key", "value"])
            writer.writerows([k, _csv_cell(v)] for k, v in self.summary.items())
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{k}: {_text_cell(v)}" for k, v in self.summary.items()]
        if self.columns:
            cells = [[str(c) for c in self.columns]] + [[_text_cell(v) for v in r] for r in self.rows]
            widths = [max(len(r[i]) for r in cells) for i in range(len(self.columns))]
            if lines:
                lines.append("")
            for r in cells:
                lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return {"json": lambda: self.to_json() + "\n", "csv": self.to_csv, "text": self.to_text}[fmt]()


def _text_cell(v: Any) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, list):
        return "[" + ", ".join(_text_cell(x) for x in v) + "]"
    return str(v)


def _csv_cell(v: Any) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# commands ---------------------------------------------------------------


def round3(x: float) -> str:
    """Three decimals, half away from zero, via the shortest repr of ``x``."""
    return str(Decimal(repr(x)).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def r1_table(n_max: int) -> list[tuple[int, str, str, str]]:
    if not 2 <= n_max <= 16:
        raise DomainError("n_max must lie in [2, 16]", n_max=n_max)
    rows = []
    for n in range(2, n_max + 1):
        second, fourth = r1_approximations(n)
        rows.append((n, round3(second), round3(fourth), round3(find_r1(n))))
    return rows


def _cmd_spectrum(p, cfg):
    spec = ShrinkerSpec(p["n"], p["k"])
    records = enumerate_spectrum(spec, p["ceiling"])
    rows = [[str(r.value), float(r.value), r.multiplicity] for r in records]
    return {"case": spec.case}, ["eigenvalue", "decimal", "multiplicity"], rows


def _cmd_index(p, cfg):
    return {"index": stability_index(ShrinkerSpec(p["n"], p["k"]))}, [], []


def _cmd_jacobi_eval(p, cfg):
    kind, par = p["solution"], p["parameter"]
    if kind == "g2":
        sol = build_g2(cfg)
    elif par is None:
        raise UsageError(f"solution {kind!r} needs --parameter", solution=kind)
    elif kind == "f2":
        sol = build_f2(par, cfg)
    elif kind == "f1":
        sol = build_f1_series(par)
    else:
        sol = build_plane_f2(par, cfg)
    rows = [[x, float(sol.value(x)), float(sol.derivative(x))] for x in p["x"]]
    summary = {"solution": kind, "matching_constant": sol.matching_constant}
    return summary, ["x", "value", "derivative"], rows


def _cmd_r1_table(p, cfg):
    rows = [list(r) for r in r1_table(p["n_max"])]
    return {}, ["n", "second_order", "fourth_order", "full"], rows


def _cmd_r0(p, cfg):
    r0 = find_r0(cfg)
    return {"r0": r0, "g2_at_r0": float(build_g2(cfg).value(r0))}, [], []


def _cmd_region(p, cfg):
    spec = ShrinkerSpec(p["n"], p["k"])
    region = Region(p["kind"], float(p["a"]), None if p["b"] is None else float(p["b"]), p["side"])
    summary: dict[str, Any] = {"stability": classify_region(spec, region, cfg).value}
    if p["dirichlet"]:
        summary["dirichlet_ground_eigenvalue"] = _region_dirichlet(spec, region, cfg)
    return summary, [], []


def _region_dirichlet(spec, region, cfg) -> float:
    line = spec.euclidean_dim == 1
    if line and region.kind == "slab":
        interval = (region.a, region.b)
    elif not line and region.kind == "annulus":
        interval = (region.a, region.b)
    elif not line and region.kind == "ball":
        interval = (0.0, region.a)
    else:
        raise UsageError(
            "Dirichlet eigenvalue needs a bounded slab (one Euclidean direction) or annulus/ball",
            kind=region.kind,
            euclidean_dim=spec.euclidean_dim,
        )
    return dirichlet_ground_eigenvalue(spec, interval, cfg.grid_size, cfg)


def _cmd_flow_sphere(p, cfg):
    flow = flow_sphere(p["n"], p["r_init"], p["t_init"], cfg.ode_dt, p["r_floor"], p["t_end"])
    closed = flow.closed_form(flow.times)
    idx = list(range(0, len(flow.times), p["every"]))
    if idx[-1] != len(flow.times) - 1:
        idx.append(len(flow.times) - 1)
    rows = [[float(flow.times[i]), float(flow.radii[i]), float(closed[i])] for i in idx]
    summary = {
        "extinction_time": flow.extinction_time,
        "clipped": flow.clipped,
        "final_time": flow.t,
        "final_radius": flow.radius,
        "max_error": float(np.max(np.abs(flow.radii - closed))),
    }
    return summary, ["t", "radius", "closed_form"], rows


def _cmd_entropy(p, cfg):
    n, surface = p["dim"], p["surface"]
    if surface == "sphere":
        radius = p["radius"] if p["radius"] is not None else math.sqrt(2 * n)
        surf = ParametricHypersurface.sphere(n, radius)
    elif surface == "cylinder":
        k = p["k"] if p["k"] is not None else 1
        if k >= n:
            raise UsageError("cylinder needs 1 <= k < dim", k=k, dim=n)
        surf = ParametricHypersurface.from_spec(ShrinkerSpec(n, k))
    else:
        surf = ParametricHypersurface.plane(n)
    x0 = p["x0"]
    if x0 is not None and len(x0) != n + 1:
        raise UsageError("x0 needs dim + 1 coordinates", dim=n, x0=x0)
    res = f_functional(surf, x0, p["t0"])
    summary = {
        "value": res.value,
        "error_estimate": res.error_estimate,
        "tail_bound": res.tail_bound,
        "half_width": res.half_width,
    }
    return summary, [], []


def _cmd_profile(p, cfg):
    if (p["sigma"] is None) == (p["height"] is None):
        raise UsageError("give exactly one of --sigma and --height")
    if p["sigma"] is not None:
        traj = profile_from_cone(p["sigma"], p["z_max"], cfg.ode_dt)
    else:
        traj = shoot_for_height(p["height"], z_max=p["z_max"], dt=cfg.ode_dt)
    summary = {
        "sigma": traj.sigma,
        "sigma_estimate": traj.sigma_estimate,
        "u0": traj.u0,
        "du0": float(traj.du[0]),
        "outcome": traj.outcome,
    }
    if not traj.crashed:
        summary["min_mean_curvature"] = profile_mean_curvature(traj)
        summary.update(traj.shape_checks())
    idx = list(range(0, len(traj.z), p["every"]))
    rows = [[float(traj.z[i]), float(traj.u[i]), float(traj.du[i]), float(traj.ddu[i])] for i in idx]
    return summary, ["z", "u", "du", "ddu"], rows


def _cmd_growth_ratio(p, cfg):
    rows = []
    for m in range(1, p["m_max"] + 1):
        q = growth_ratio(p["n"], m)
        rows.append([m, str(q), float(q)])
    return {}, ["m", "ratio", "decimal"], rows


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "index": _cmd_index,
    "jacobi-eval": _cmd_jacobi_eval,
    "r1-table": _cmd_r1_table,
    "r0": _cmd_r0,
    "region": _cmd_region,
    "flow-sphere": _cmd_flow_sphere,
    "entropy": _cmd_entropy,
    "profile": _cmd_profile,
    "growth-ratio": _cmd_growth_ratio,
}


def execute(config: RunConfig) -> ResultRecord:
    cfg = config.quadrature()
    summary, columns, rows = COMMANDS[config.command](config.parameters, cfg)
    return ResultRecord(
        config.command,
        dict(config.parameters),
        cfg.as_dict(),
        __version__,
        summary,
        list(columns),
        rows,
    )


def run(config: RunConfig) -> tuple[int, str, str]:
    """Execute ``config``; returns ``(status, stdout, stderr)``."""
    try:
        record = execute(config)
    except UsageError as exc:
        return 2, "", _error_json(exc)
    except (ComputationError, ShrinkerLabError) as exc:
        return 3, "", _error_json(exc)
    return 0, record.render(config.output), ""


def _error_json(exc: ShrinkerLabError) -> str:
    return json.dumps(exc.as_dict(), default=str) + "\n"


# argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401
        raise UsageError(message, prog=self.prog)


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--abs-tol", type=float, default=None)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--dt", type=float, default=None)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="shrinker-lab", description="Spectra, Jacobi functions and flows of generalized cylinders.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p = add("spectrum", "Eigenvalues of L below a ceiling, with multiplicities.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ceiling", default="1", help="exact rational, e.g. 3/2")

    p = add("index", "Stability index of S^k x R^(n-k).")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("jacobi-eval", "Evaluate a radial Jacobi function and its derivative.")
    p.add_argument("--solution", choices=("g2", "f2", "f1", "plane-f2"), required=True)
    p.add_argument("--parameter", type=int, default=None, help="lambda for f2, n for f1 and plane-f2")
    p.add_argument("--x", type=float, nargs="+", required=True)

    p = add("r1-table", "Approximate and full first roots of the plane series solution.")
    p.add_argument("--n-max", type=int, default=7)

    add("r0", "First positive root of the odd axis solution.")

    p = add("region", "Classify a symmetric region as stable or unstable.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--side", choices=("above", "below"), default="above")
    p.add_argument("--dirichlet", action="store_true", help="also report the Dirichlet ground eigenvalue")

    p = add("flow-sphere", "Shrink a round sphere by mean curvature.")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--r-init", type=float, default=2.0)
    p.add_argument("--t-init", type=float, default=-1.0)
    p.add_argument("--r-floor", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--every", type=int, default=100, help="row stride of the history")

    p = add("entropy", "Gaussian density F of a sphere, cylinder or plane.")
    p.add_argument("--surface", choices=("sphere", "cylinder", "plane"), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--x0", type=float, nargs="+", default=None)

    p = add("profile", "Rotation profile asymptotic to a cone.")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--height", type=float, default=None)
    p.add_argument("--z-max", type=float, default=40.0)
    p.add_argument("--every", type=int, default=1000)

    p = add("growth-ratio", "Coefficient growth ratio a_2m / b_2m as exact rationals.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-max", type=int, default=10)
    return parser


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    output = ns.pop("format")
    tolerances = {}
    for flag, key in TOLERANCE_FLAGS.items():
        value = ns.pop(flag)
        if value is not None:
            tolerances[key] = value
    return RunConfig(command, ns, output, tolerances)


def main(argv: list[str] | None = None) -> int:
    try:
        config = config_from_args(argv)
    except UsageError as exc:
        sys.stderr.write(_error_json(exc))
        return 2
    status, out, err = run(config)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
