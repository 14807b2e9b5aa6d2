"""walkextrap command line: minimise V over p for one walk and extrapolate f to b.

Usage:
    walkextrap --walk rw --n 2 --a pi --b 4 --function builtin:cos
    walkextrap --walk dtqw --r 0.7071067811865476 --n 4 --a 2pi --b 3pi --function builtin:cos --format text
    walkextrap --walk dtrw-z --n 2 --b 12 --function csv:samples.csv --emit-v-curve 101 --out report.json

Exit status: 0 on success, 2 for an invalid configuration, 3 when a numeric stage fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from .evaluation import EvalSpec, _assemble
from .extrapolate import extrapolate
from .inner_products import FunctionSpec, QuadratureError, load_csv
from .measures import HADAMARD_R, DomainError, Family, WalkKind, moment, variance
from .oracle_sim import SimulationTooLarge
from .optimize import argmin_p

__all__ = ["RunConfig", "run", "build_report", "main"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("walkextrap")

_PI_RE = re.compile(r"^\s*([-+])?\s*((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"{stage}: {cause}")


def parse_real(text: str) -> float:
    """A float, or a multiple of pi such as ``pi``, ``2pi``, ``1.5*pi``, ``pi/2``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_RE.match(text.lower())
    if not m:
        raise ConfigError(f"cannot read a number from {text!r}")
    sign = -1.0 if m.group(1) == "-" else 1.0
    coef = float(m.group(2)) if m.group(2) else 1.0
    div = float(m.group(3)) if m.group(3) else 1.0
    return sign * coef * math.pi / div


@dataclass(frozen=True)
class RunConfig:
    walk: str
    n: int
    a: float | None
    b: float
    function: str
    r: float | None = None
    output_format: str = "json"
    emit_v_curve: int | None = None

    def walk_kind(self) -> WalkKind:
        try:
            family = Family(self.walk)
        except ValueError:
            raise ConfigError(f"unknown walk {self.walk!r}") from None
        if family is not Family.DTQW and self.r is not None:
            raise ConfigError("--r applies only to --walk dtqw")
        try:
            return WalkKind(family, (HADAMARD_R if self.r is None else self.r) if family is Family.DTQW else None)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def function_spec(self) -> FunctionSpec:
        kind, _, arg = self.function.partition(":")
        if kind == "csv":
            try:
                f = load_csv(arg)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot load function table: {exc}") from None
            if self.a is not None and not math.isclose(self.a, f.a, rel_tol=1e-12):
                raise ConfigError(f"--a {self.a!r} does not match the table's last x {f.a!r}")
            return f
        if self.a is None:
            raise ConfigError("--a is required for builtin and polynomial functions")
        if kind == "builtin":
            name = arg.strip().lower()
            if name in ("identity", "x"):
                return FunctionSpec.identity(self.a)
            if name in ("cos", "cosine"):
                return FunctionSpec.cosine(self.a)
            if name == "zero":
                return FunctionSpec.polynomial([0.0], self.a)
            raise ConfigError(f"unknown builtin function {arg!r} (identity, cos, zero)")
        if kind == "poly":
            try:
                coeffs = [float(c) for c in arg.split(",")]
            except ValueError:
                raise ConfigError(f"cannot parse polynomial coefficients {arg!r}") from None
            return FunctionSpec.polynomial(coeffs, self.a)
        raise ConfigError(f"--function must be builtin:<name>, poly:<c0,c1,...> or csv:<path>, got {self.function!r}")

    def eval_spec(self) -> EvalSpec:
        walk = self.walk_kind()
        f = self.function_spec()
        if not f.a > 0:
            raise ConfigError("a must be positive")
        if not self.b > f.a:
            raise ConfigError(f"b={self.b!r} must exceed a={f.a!r}")
        if self.output_format not in ("json", "csv", "text"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.emit_v_curve is not None and self.emit_v_curve < 2:
            raise ConfigError("--emit-v-curve needs at least 2 samples")
        try:
            return EvalSpec(walk, f, self.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def _stage(name: str, fn, *args):
    log.debug("stage %s", name)
    try:
        return fn(*args)
    except (QuadratureError, ArithmeticError, SimulationTooLarge, FloatingPointError) as exc:
        raise NumericFailure(name, exc) from exc


def _spread(walk: WalkKind, x: float, p: float) -> float | None:
    if walk.continuous:
        return variance(walk, x)
    try:
        return moment(walk, 2, x, p) - moment(walk, 1, x, p) ** 2
    except DomainError:
        return None  # degenerate drift or non-integer time for the lattice walk


def build_report(cfg: RunConfig) -> dict:
    spec = cfg.eval_spec()
    v, used = _stage("brackets", _assemble, spec)
    report = _stage("minimize", argmin_p, spec, v)
    result = _stage("extrapolate", extrapolate, spec, cfg.b, report)
    walk = spec.walk

    out = {
        "schema": SCHEMA_VERSION,
        "walk": walk.family.value,
        "r": walk.r,
        "discrete_model": not walk.continuous,
        "n": spec.n,
        "a": spec.a,
        "b": cfg.b,
        "function": spec.f.describe(),
        "brackets": [
            {"alpha": br.alpha, "beta": br.beta, "value": br.value, "method": br.method}
            for _, br in sorted(used.items())
        ],
        "v_coefficients_w": list(v.coeffs),
        "local_minima": list(report.local_minima),
        "candidates": [{"p": p, "v": val} for p, val in report.v_at_candidates],
        "p_star": result.p_star,
        "unique": report.unique,
        "discriminant": report.discriminant,
        "unconstrained_p": report.unconstrained_p,
        "f_at_a": result.f_at_a,
        "m": result.m,
        "m_tilde": result.m_tilde,
        "variance": {
            "at_b": _spread(walk, cfg.b, result.p_star),
            "at_b_minus_a": _spread(walk, cfg.b - spec.a, result.p_star),
        },
    }
    if cfg.emit_v_curve:
        ps = np.linspace(0.0, 1.0, cfg.emit_v_curve)
        out["v_curve"] = [{"p": float(p), "v": float(v.at_p(float(p)))} for p in ps]
    return out


def _scalar_rows(report: dict):
    for key, val in report.items():
        if key in ("brackets", "candidates", "v_curve", "v_coefficients_w", "local_minima", "variance"):
            continue
        yield key, val
    for key, val in report["variance"].items():
        yield f"variance_{key}", val
    for i, c in enumerate(report["v_coefficients_w"]):
        yield f"v_coeff_w{i}", c
    for i, p in enumerate(report["local_minima"]):
        yield f"local_minimum_{i}", p
    for br in report["brackets"]:
        yield f"bracket_x{br['alpha']:g}_f{br['beta']}", br["value"]


def _fmt(val) -> str:
    if val is None:
        return ""
    if isinstance(val, float):
        return repr(val)
    return str(val)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, val in _scalar_rows(report):
            writer.writerow([key, _fmt(val)])
        if "v_curve" in report:
            writer.writerow([])
            writer.writerow(["p", "v"])
            for row in report["v_curve"]:
                writer.writerow([repr(row["p"]), repr(row["v"])])
        return buf.getvalue()

    lines = [
        f"walk          {report['walk']}" + (f" (r={report['r']!r})" if report["r"] is not None else ""),
        f"model         {'discrete lattice' if report['discrete_model'] else 'weak-limit measure'}",
        f"function      {report['function']} on [0, {report['a']!r}]",
        f"n             {report['n']}",
        "V(w)          " + " + ".join(f"{c:.12g}*w^{i}" for i, c in enumerate(report["v_coefficients_w"])),
        f"local minima  {', '.join(repr(p) for p in report['local_minima']) or 'none in (0, 1)'}",
        f"p_*           {report['p_star']!r}" + ("" if report["unique"] else "  (average of tied minimisers)"),
        f"m(a, b)       {report['m']!r}   at b={report['b']!r}",
        f"m~(a, b)      {report['m_tilde']!r}",
    ]
    if report["discriminant"] is not None:
        lines.append(f"discriminant  {report['discriminant']!r}")
    if report["unconstrained_p"] is not None:
        lines.append(f"argmin on R   {report['unconstrained_p']!r}")
    for br in report["brackets"]:
        lines.append(f"<x^{br['alpha']:g} f^{br['beta']}>  {br['value']!r}  [{br['method']}]")
    if "v_curve" in report:
        lines.append("p, V(p)")
        lines.extend(f"{row['p']!r}, {row['v']!r}" for row in report["v_curve"])
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, out_path: str | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        text = render(build_report(cfg), cfg.output_format)
    except ConfigError as exc:
        print(f"walkextrap: invalid configuration: {exc}", file=stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"walkextrap: numeric failure in stage {exc}", file=stderr)
        return EXIT_NUMERIC
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="walkextrap", description=__doc__.split("\n\n")[0])
    ap.add_argument("--walk", required=True, choices=[f.value for f in Family])
    ap.add_argument("--n", type=int, default=2, help="even order of the deviation moment (default 2)")
    ap.add_argument("--a", type=str, default=None, help="right end of the observed interval; accepts e.g. 'pi', '2pi'")
    ap.add_argument("--b", type=str, required=True, help="extrapolation point, b > a")
    ap.add_argument("--r", type=float, default=None, help="DTQW coin parameter in (0, 1), default 1/sqrt(2)")
    ap.add_argument("--function", required=True, help="builtin:identity|cos|zero, poly:c0,c1,..., or csv:<path>")
    ap.add_argument("--format", dest="output_format", default="json", choices=["json", "csv", "text"])
    ap.add_argument("--emit-v-curve", type=int, default=None, metavar="N", help="also tabulate V at N evenly spaced p")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    level = getattr(logging, os.environ.get("WALK_EXTRAP_LOG", "WARNING").upper(), None)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)
    try:
        cfg = RunConfig(
            walk=args.walk,
            n=args.n,
            a=None if args.a is None else parse_real(args.a),
            b=parse_real(args.b),
            function=args.function,
            r=args.r,
            output_format=args.output_format,
            emit_v_curve=args.emit_v_curve,
        )
    except ConfigError as exc:
        print(f"walkextrap: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
