"""Command-line front end: ``helmwave {eigs,expand,solve,transform,validate}``.

Exit codes: 0 success, 1 validation failure or runtime error, 2 bad
configuration or usage, 3 empty spectrum.  Every error path prints a first
line ``error: <code>: <field>`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .bkm_eigen import default_quadrature, eigen_algebraic, eigen_scan, save_spectrum
from .config import load_config
from .exceptions import ConfigError, HelmwaveError
from .io_utils import atomic_write_text
from .transform import default_center_grid, default_lambda_grid, forward_transform, inverse_transform, save_field
from .transient_solver import evaluate_solution, field_csv_text, solve_transient
from .validation import format_report, run_suite
from .wavelet_series import (
    build_basis,
    default_centers,
    expand_collocation,
    expand_direct,
    gram_schmidt_within_scale,
    read_samples_csv,
    save_expansion,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_EMPTY = 0, 1, 2, 3


class _UsageError(Exception):
    def __init__(self, message, field="usage"):
        super().__init__(message)
        self.field = field


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        field = "usage"
        if "--suite" in message:
            field = "suite"
        elif "argument command" in message or "invalid choice" in message:
            field = "command"
        raise _UsageError(message, field)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="helmwave", description="Helmholtz eigenmodes, RBF wavelet series and transient solutions.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("eigs", "compute an eigen-spectrum"),
        ("expand", "fit a wavelet series"),
        ("solve", "solve a transient problem and write the field CSV"),
        ("transform", "forward (and optionally inverse) wavelet transform"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True, help="JSON run configuration")
        s.add_argument("--out", help="output path (overrides output.path)")
        s.add_argument("--seed", type=int, default=None, help="seed for random evaluation points (default 42)")
    v = sub.add_parser("validate", help="run the acceptance suite")
    v.add_argument("--suite", choices=("fast", "full"), default="full")
    v.add_argument("--seed", type=int, default=None, help="accepted for symmetry; the suite is fixed-seed")
    v.add_argument("--out", help="also write the report to this file")
    return p


def _spectrum(cfg):
    dom = cfg.domain()
    es = cfg.eigensolver()
    tol = es["tolerances"]
    if es["scheme"] == "det_scan":
        kw = {}
        if "refine" in tol:
            kw["refine_tol"] = tol["refine"]
        if "accept" in tol:
            kw["accept_rtol"] = tol["accept"]
        if "bc" in tol:
            kw["bc_tol"] = tol["bc"]
        if "merge" in tol:
            kw["merge_rtol"] = tol["merge"]
        return eigen_scan(dom, es["lambda_range"], es["samples"], **kw)
    kw = {"bc_tol": tol["bc"]} if "bc" in tol else {}
    spec = eigen_algebraic(dom, delta=es["delta"], **kw)
    lo, hi = es["lambda_range"]
    keep = [p for p in spec.pairs if p.wavenumber == 0 or lo <= p.wavenumber <= hi]
    return type(spec)(tuple(keep), spec.scheme, (lo, hi), spec.delta, spec.diagnostics)


def cmd_eigs(cfg, out=None) -> int:
    spec = _spectrum(cfg)
    lines = [f"{'k':>3}  {'lambda':>14}  {'bc_residual':>11}  mult"]
    for k, p in enumerate(spec.pairs, 1):
        lines.append(f"{k:>3}  {p.wavenumber:14.8f}  {p.bc_residual:11.3e}  {p.multiplicity}")
    print("\n".join(lines))
    path = cfg.output_path(out)
    if path is not None:
        save_spectrum(spec, path)
    if len(spec) == 0:
        print("error: empty_spectrum: eigensolver.lambda_range", file=sys.stderr)
        print(f"no eigenvalue found in {spec.scan_range}", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_expand(cfg, out=None) -> int:
    dom = cfg.domain()
    ex = cfg.expansion()
    centers = ex["centers"]
    if not isinstance(centers, np.ndarray):
        centers = dom.centroid[None, :] if centers == 1 else default_centers(dom, centers)
    basis = build_basis(dom, ex["scales"], centers)
    quad = default_quadrature(dom)
    if ex["method"] == "direct":
        exp = expand_direct(ex["function"], gram_schmidt_within_scale(basis, quad), quad)
    elif "samples" in ex:
        X, f = read_samples_csv(ex["samples"], dom.dimension)
        exp = expand_collocation(X, f, basis)
    else:
        exp = expand_collocation(quad.nodes, ex["function"](quad.nodes), basis, sample_weight=quad.weights)
    path = cfg.output_path(out)
    if path is not None:
        save_expansion(exp, path)
    print(json.dumps({"method": exp.method, "atoms": basis.n_atoms, "a0": exp.a0, "fit_residual": exp.fit_residual}))
    return EXIT_OK


def cmd_solve(cfg, out=None) -> int:
    dom = cfg.domain()
    eq = cfg.equation()
    ini = cfg.initial()
    method = cfg.block("expansion").get("method", "collocation")
    if method not in ("collocation", "direct"):
        raise ConfigError(f"unknown method {method!r}", "expansion.method", "bad_value")
    times = cfg.times()
    points = cfg.eval_points()
    phi, psi = ini["phi"], ini["psi"]
    quad = None
    if ini["samples"] is not None:
        X, vals = read_samples_csv(ini["samples"], dom.dimension)
        phi = _sample_interpolant(X, vals)
    spec = _spectrum(cfg)
    if len(spec) == 0:
        print("error: empty_spectrum: eigensolver.lambda_range", file=sys.stderr)
        return EXIT_EMPTY
    if phi is None:
        phi = lambda X: np.zeros(len(X))
    sol = solve_transient(eq, dom, spec, phi, psi, method, quad)
    U = evaluate_solution(sol, points, times)
    text = field_csv_text(points, times, U)
    report = {
        "modes_used": sol.diagnostics["modes_used"],
        "fit_residual": sol.diagnostics["fit_residual"],
        "energy_captured": sol.diagnostics["energy_captured"],
    }
    path = cfg.output_path(out)
    if path is None:
        sys.stdout.write(text)
        print(json.dumps(report), file=sys.stderr)
    else:
        atomic_write_text(path, text)
        print(json.dumps(report))
    return EXIT_OK


def _sample_interpolant(X, vals):
    from scipy.interpolate import RBFInterpolator

    if X.shape[1] == 1:
        order = np.argsort(X[:, 0])
        xs, fs = X[order, 0], vals[order]
        return lambda P: np.interp(np.asarray(P)[:, 0], xs, fs)
    rbf = RBFInterpolator(X, vals, kernel="thin_plate_spline")
    return lambda P: rbf(np.asarray(P, dtype=float))


def cmd_transform(cfg, out=None) -> int:
    tr = cfg.transform()
    lo, hi = tr["lambda_range"]
    lams = default_lambda_grid(lo, hi, tr["lambda_count"])
    xi = default_center_grid(tr["center"], tr["center_count"], tr["half_width"])
    field = forward_transform(tr["function"], lambdas=lams, centers=xi)
    path = cfg.output_path(out)
    if path is not None:
        save_field(path, field)
    report = {"Cg": field.Cg, "lambdas": int(lams.size), "centers": int(len(xi))}
    if tr["eval_points"] is not None:
        pts = cfg.eval_points(tr["eval_points"], "transform.eval_points", dimension=1)
        ref = tr["function"](pts)
        rec = inverse_transform(field, pts, formula=tr["formula"], reference=ref)
        report.update(
            {
                "formula": rec.formula,
                "truncation_error": rec.truncation_error,
                "rel_sup_error": float(np.abs(rec.values - ref).max() / max(np.abs(ref).max(), 1e-300)),
                "renormalization": rec.renormalization,
                "renormalized_error": rec.reference_error,
            }
        )
    print(json.dumps(report))
    return EXIT_OK


def cmd_validate(suite: str, out=None) -> int:
    results = run_suite(suite, echo=print)
    report = format_report(results)
    print(report.splitlines()[-1])
    if out:
        atomic_write_text(out, report + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


_COMMANDS = {"eigs": cmd_eigs, "expand": cmd_expand, "solve": cmd_solve, "transform": cmd_transform}


def _fail(code, field, message, status):
    print(f"error: {code}: {field}", file=sys.stderr)
    if message:
        print(str(message), file=sys.stderr)
    return status


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", exc.field, exc, EXIT_CONFIG)
    try:
        if args.command == "validate":
            return cmd_validate(args.suite, args.out)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            cfg = load_config(args.config, seed=args.seed)
            return _COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        return _fail(exc.code, exc.field or "config", exc, EXIT_CONFIG)
    except HelmwaveError as exc:
        return _fail(exc.code, args.command, exc, EXIT_FAIL)
    except OSError as exc:
        return _fail("io", getattr(exc, "filename", None) or args.command, exc, EXIT_FAIL)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
