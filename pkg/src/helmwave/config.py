"""Run configurations for the command-line front end.

A config is one JSON object.  Recognised blocks::

    geometry     built-in string ("interval{0,1}", "disk{1}", "ball{1}",
                 "rectangle{0,0,1,1}"), a geometry object, or a file path
    equation     {family, c, h, R_damp, S_coef, forcing, dirichlet_data,
                  neumann_data}; data entries are expressions
    eigensolver  {scheme: det_scan|algebraic, lambda_range, samples, delta,
                  tolerances: {refine, accept, bc, merge}}
    expansion    {method: collocation|direct, scales, centers, function,
                  samples}
    initial      {phi, psi, samples}
    transform    {function, lambda_range, lambda_count, center_count,
                  half_width, center, formula}
    output       {path, times, eval_points}
    seed         integer (default 42)

Unknown keys anywhere are rejected with the dotted path of the key.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .exceptions import ConfigError, GeometryError
from .expr import compile_expression
from .geometry import (
    Domain,
    ball_domain,
    disk_domain,
    domain_from_record,
    interval_domain,
    load_geometry,
    rectangle_domain,
)
from .transient_solver import EquationSpec, Family

__all__ = ["RunConfig", "load_config", "parse_config", "builtin_geometry"]

_TOP = {"geometry", "equation", "eigensolver", "expansion", "initial", "transform", "output", "seed"}
_BLOCKS = {
    "equation": {"family", "c", "h", "R_damp", "S_coef", "forcing", "dirichlet_data", "neumann_data"},
    "eigensolver": {"scheme", "lambda_range", "samples", "delta", "tolerances"},
    "expansion": {"method", "scales", "centers", "function", "samples"},
    "initial": {"phi", "psi", "samples"},
    "transform": {"function", "lambda_range", "lambda_count", "center_count", "half_width", "center", "formula", "eval_points"},
    "output": {"path", "times", "eval_points"},
}
_TOLERANCES = {"refine", "accept", "bc", "merge"}
_BUILTIN = re.compile(r"\s*(interval|disk|ball|rectangle)\s*\{([^}]*)\}\s*\Z")


def builtin_geometry(text: str, field_name: str = "geometry") -> Domain:
    """Domains from the shorthand ``name{p1,p2,...}`` (Dirichlet boundary)."""
    m = _BUILTIN.match(text)
    if m is None:
        raise ConfigError(f"not a built-in geometry: {text!r}", field_name, "bad_value")
    kind, body = m.groups()
    try:
        args = [float(v) for v in body.split(",")] if body.strip() else []
    except ValueError:
        raise ConfigError(f"bad parameters in {text!r}", field_name, "bad_value") from None
    try:
        if kind == "interval":
            a, b = args if args else (0.0, 1.0)
            return interval_domain(a, b)
        if kind == "disk":
            if len(args) not in (0, 1, 3):
                raise ValueError("disk{R} or disk{R,cx,cy}")
            R = args[0] if args else 1.0
            return disk_domain(R, center=tuple(args[1:3]) if len(args) == 3 else (0.0, 0.0))
        if kind == "ball":
            if len(args) not in (0, 1, 4):
                raise ValueError("ball{R} or ball{R,cx,cy,cz}")
            R = args[0] if args else 1.0
            return ball_domain(R, center=tuple(args[1:4]) if len(args) == 4 else (0.0, 0.0, 0.0))
        if len(args) != 4:
            raise ValueError("rectangle{x0,y0,x1,y1}")
        return rectangle_domain(tuple(args[:2]), tuple(args[2:]))
    except (GeometryError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), field_name, "bad_value") from exc


def _check_keys(block, allowed, prefix):
    if not isinstance(block, dict):
        raise ConfigError(f"{prefix} must be an object", prefix, "bad_type")
    for key in block:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{prefix}.{key}" if prefix else key, "unknown_field")


def _number(value, name, lo=-math.inf, hi=math.inf, strict_lo=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number", name, "bad_type")
    if integer and int(value) != value:
        raise ConfigError(f"{name} must be an integer", name, "bad_value")
    v = float(value)
    if not math.isfinite(v) or v < lo or v > hi or (strict_lo and v == lo):
        raise ConfigError(f"{name}={value} out of range", name, "out_of_range")
    return int(v) if integer else v


def _range(value, name):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError(f"{name} must be [low, high]", name, "bad_type")
    lo = _number(value[0], f"{name}[0]", 0.0)
    hi = _number(value[1], f"{name}[1]", 0.0)
    if not hi > lo:
        raise ConfigError(f"{name} must have low < high", name, "out_of_range")
    return lo, hi


@dataclass
class RunConfig:
    raw: dict
    base_dir: Path = field(default_factory=Path.cwd)
    seed: int = 42
    _domain: Optional[Domain] = None

    # -- blocks -----------------------------------------------------------

    def block(self, name) -> dict:
        return self.raw.get(name) or {}

    def has(self, name) -> bool:
        return name in self.raw

    def require(self, *names):
        for name in names:
            if name not in self.raw:
                raise ConfigError(f"the {name} block is required", name, "missing_field")

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    # -- geometry ---------------------------------------------------------

    def domain(self) -> Domain:
        if self._domain is not None:
            return self._domain
        self.require("geometry")
        g = self.raw["geometry"]
        if isinstance(g, str):
            if _BUILTIN.match(g):
                dom = builtin_geometry(g)
            else:
                path = self.resolve(g)
                if not path.exists():
                    raise ConfigError(f"geometry file {g} not found", "geometry", "missing_file")
                dom = load_geometry(path)
        else:
            dom = domain_from_record(g)
        self._domain = dom
        return dom

    # -- equation ---------------------------------------------------------

    def equation(self) -> EquationSpec:
        eq = self.block("equation")
        fam = eq.get("family", "wave")
        if fam not in {f.value for f in Family}:
            raise ConfigError(f"unknown family {fam!r}", "equation.family", "bad_value")
        n = self.domain().dimension
        kw = {"family": Family(fam)}
        for key, lo, strict in (("c", 0.0, True), ("h", 0.0, True), ("R_damp", 0.0, False), ("S_coef", -math.inf, False)):
            if key in eq:
                kw[key] = _number(eq[key], f"equation.{key}", lo, strict_lo=strict)
        for key in ("forcing", "dirichlet_data", "neumann_data"):
            if eq.get(key) is not None:
                kw[key] = compile_expression(eq[key], n, f"equation.{key}")
        return EquationSpec(**kw)

    # -- eigensolver ------------------------------------------------------

    def eigensolver(self) -> dict:
        es = self.block("eigensolver")
        scheme = es.get("scheme", "det_scan")
        if scheme not in ("det_scan", "algebraic"):
            raise ConfigError(f"unknown scheme {scheme!r}", "eigensolver.scheme", "bad_value")
        out = {"scheme": scheme, "lambda_range": (0.1, 10.0), "samples": None, "delta": 0.1, "tolerances": {}}
        if "lambda_range" in es:
            out["lambda_range"] = _range(es["lambda_range"], "eigensolver.lambda_range")
        if es.get("samples") is not None:
            out["samples"] = _number(es["samples"], "eigensolver.samples", 8, 10**6, integer=True)
        if "delta" in es:
            out["delta"] = _number(es["delta"], "eigensolver.delta", 0.0, 10.0, strict_lo=True)
        tol = es.get("tolerances", {})
        _check_keys(tol, _TOLERANCES, "eigensolver.tolerances")
        for key, value in tol.items():
            out["tolerances"][key] = _number(value, f"eigensolver.tolerances.{key}", 0.0, 1.0, strict_lo=True)
        return out

    # -- expansion --------------------------------------------------------

    def expansion(self) -> dict:
        ex = self.block("expansion")
        method = ex.get("method", "collocation")
        if method not in ("collocation", "direct"):
            raise ConfigError(f"unknown method {method!r}", "expansion.method", "bad_value")
        out = {"method": method, "scales": _number(ex.get("scales", 4), "expansion.scales", 1, 200, integer=True)}
        centers = ex.get("centers", 1)
        if isinstance(centers, list):
            arr = np.asarray(centers, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != self.domain().dimension:
                raise ConfigError("centers must be a list of points", "expansion.centers", "bad_value")
            out["centers"] = arr
        else:
            out["centers"] = _number(centers, "expansion.centers", 1, 10**5, integer=True)
        if ("function" in ex) == ("samples" in ex):
            raise ConfigError("give exactly one of function or samples", "expansion.function", "conflict")
        if "function" in ex:
            out["function"] = compile_expression(ex["function"], self.domain().dimension, "expansion.function")
        else:
            out["samples"] = self._samples_path(ex["samples"], "expansion.samples")
            if method == "direct":
                raise ConfigError("the direct method needs a function, not samples", "expansion.samples", "conflict")
        return out

    def _samples_path(self, value, name):
        if not isinstance(value, str):
            raise ConfigError(f"{name} must be a path", name, "bad_type")
        path = self.resolve(value)
        if not path.exists():
            raise ConfigError(f"samples file {value} not found", name, "missing_file")
        return path

    # -- initial data -----------------------------------------------------

    def initial(self) -> dict:
        ini = self.block("initial")
        n = self.domain().dimension
        out = {"phi": None, "psi": None, "samples": None}
        if "phi" in ini and "samples" in ini:
            raise ConfigError("give phi or samples, not both", "initial.samples", "conflict")
        for key in ("phi", "psi"):
            if ini.get(key) is not None:
                out[key] = compile_expression(str(ini[key]) if isinstance(ini[key], (int, float)) else ini[key], n, f"initial.{key}")
        if "samples" in ini:
            out["samples"] = self._samples_path(ini["samples"], "initial.samples")
        return out

    # -- transform --------------------------------------------------------

    def transform(self) -> dict:
        tr = self.block("transform")
        if "function" not in tr:
            raise ConfigError("transform.function is required", "transform.function", "missing_field")
        out = {
            "function": compile_expression(tr["function"], 1, "transform.function"),
            "lambda_range": _range(tr.get("lambda_range", [0.1, 40.0]), "transform.lambda_range"),
            "lambda_count": _number(tr.get("lambda_count", 128), "transform.lambda_count", 2, 10**4, integer=True),
            "center_count": _number(tr.get("center_count", 256), "transform.center_count", 3, 10**5, integer=True),
            "half_width": _number(tr.get("half_width", 1000.0), "transform.half_width", 0.0, strict_lo=True),
            "center": _number(tr.get("center", 0.5), "transform.center"),
            "formula": tr.get("formula", "dual"),
            "eval_points": tr.get("eval_points"),
        }
        if out["lambda_range"][0] == 0:
            raise ConfigError("scales must be positive", "transform.lambda_range[0]", "out_of_range")
        if out["formula"] not in ("dual", "printed"):
            raise ConfigError(f"unknown formula {out['formula']!r}", "transform.formula", "bad_value")
        return out

    # -- output -----------------------------------------------------------

    def times(self) -> np.ndarray:
        t = self.block("output").get("times", [0.0])
        if not isinstance(t, list) or not t:
            raise ConfigError("times must be a nonempty list", "output.times", "bad_type")
        return np.array([_number(v, f"output.times[{i}]", 0.0) for i, v in enumerate(t)])

    def output_path(self, override=None) -> Optional[Path]:
        if override is not None:
            return Path(override)
        p = self.block("output").get("path")
        if p is None:
            return None
        if not isinstance(p, str):
            raise ConfigError("output.path must be a string", "output.path", "bad_type")
        return self.resolve(p)

    def eval_points(self, spec=None, name="output.eval_points", dimension=None) -> np.ndarray:
        """Points from a list, ``{"grid": {...}}`` or ``{"random": m}``."""
        n = dimension or self.domain().dimension
        spec = self.block("output").get("eval_points") if spec is None else spec
        if spec is None:
            dom = self.domain()
            return dom.interior if len(dom.interior) else dom.boundary_positions
        if isinstance(spec, list):
            pts = np.asarray(spec, dtype=float)
            if pts.ndim == 1 and n == 1:
                pts = pts[:, None]
            if pts.ndim != 2 or pts.shape[1] != n:
                raise ConfigError(f"eval_points must be points of dimension {n}", name, "dimension_mismatch")
            return pts
        _check_keys(spec, {"grid", "random"}, name)
        if len(spec) != 1:
            raise ConfigError("use one of grid or random", name, "conflict")
        if "random" in spec:
            m = _number(spec["random"], f"{name}.random", 1, 10**6, integer=True)
            dom = self.domain()
            lo, hi = dom.bounds
            rng = np.random.default_rng(self.seed)
            pts = np.empty((0, n))
            while len(pts) < m:
                cand = lo + rng.random((4 * m, n)) * (hi - lo)
                pts = np.vstack([pts, cand[dom.contains(cand)]])
            return pts[:m]
        grid = spec["grid"]
        _check_keys(grid, {"lower", "upper", "count"}, f"{name}.grid")
        try:
            lo = np.broadcast_to(np.asarray(grid["lower"], dtype=float), (n,))
            hi = np.broadcast_to(np.asarray(grid["upper"], dtype=float), (n,))
            cnt = np.broadcast_to(np.asarray(grid["count"], dtype=int), (n,))
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"grid needs lower, upper and count ({exc})", f"{name}.grid", "bad_value") from None
        if np.any(cnt < 1):
            raise ConfigError("grid counts must be positive", f"{name}.grid.count", "out_of_range")
        axes = [np.linspace(a, b, int(c)) for a, b, c in zip(lo, hi, cnt)]
        return np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)


def parse_config(raw, base_dir=None, seed=None) -> RunConfig:
    _check_keys(raw, _TOP, "")
    for name, allowed in _BLOCKS.items():
        if name in raw:
            _check_keys(raw[name], allowed, name)
    tol = (raw.get("eigensolver") or {}).get("tolerances")
    if tol is not None:
        _check_keys(tol, _TOLERANCES, "eigensolver.tolerances")
    s = raw.get("seed", 42) if seed is None else seed
    s = _number(s, "seed", 0, 2**32 - 1, integer=True)
    return RunConfig(raw, Path(base_dir) if base_dir else Path.cwd(), s)


def load_config(path, seed=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found", "config", "missing_file") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}", f"config:{exc.lineno}", "parse") from None
    return parse_config(raw, path.parent, seed)
