"""scikit-learn style wrappers around the functional API.

The estimators follow the usual contract (constructor stores parameters,
``fit`` returns ``self``, learned state ends in ``_``) so they work with
``get_params``/``set_params``, ``clone`` and pipelines.  The numerics
live in the functional modules.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .bkm_eigen import Spectrum, default_quadrature, eigen_algebraic, eigen_scan, eigenfunction_eval
from .exceptions import DomainError
from .geometry import Domain
from .special_fn import KernelKind, profile_zero
from .transform import default_center_grid, default_lambda_grid, forward_transform, inverse_transform
from .transient_solver import (
    EquationSpec,
    TransientSolution,
    evaluate_solution,
    fit_initial_conditions,
    lift_inhomogeneous,
    temporal_modes,
)
from .wavelet_series import WaveletBasis, build_basis, default_centers, evaluate_series, expand_collocation

__all__ = ["BKMEigensolver", "WaveletSeriesRegressor", "TransientModel", "ModifiedHelmholtzTransform"]


def _require_domain(domain):
    if not isinstance(domain, Domain):
        raise DomainError("expected a Domain")
    return domain


def _points(X, dimension=None):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if dimension is not None and X.shape[1] != dimension:
        raise ValueError(f"X has {X.shape[1]} features, expected {dimension}")
    return X


class BKMEigensolver(TransformerMixin, BaseEstimator):
    """Eigen-wavenumbers of a domain; ``transform`` evaluates the eigenfunctions."""

    def __init__(self, scheme="det_scan", lambda_range=(0.1, 10.0), samples=None, delta=0.1, bc_tol=1e-4):
        self.scheme = scheme
        self.lambda_range = lambda_range
        self.samples = samples
        self.delta = delta
        self.bc_tol = bc_tol

    def fit(self, domain, y=None):
        domain = _require_domain(domain)
        if self.scheme == "det_scan":
            spec = eigen_scan(domain, tuple(self.lambda_range), self.samples, bc_tol=self.bc_tol)
        elif self.scheme == "algebraic":
            spec = eigen_algebraic(domain, delta=self.delta, bc_tol=self.bc_tol)
        else:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        self.domain_ = domain
        self.spectrum_ = spec
        self.wavenumbers_ = spec.wavenumbers
        self.n_features_in_ = domain.dimension
        return self

    def transform(self, X):
        check_is_fitted(self, "spectrum_")
        X = _points(X, self.n_features_in_)
        if len(self.spectrum_) == 0:
            return np.zeros((len(X), 0))
        return np.column_stack([eigenfunction_eval(p, X) for p in self.spectrum_.pairs])


class WaveletSeriesRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of an RBF wavelet series to samples.

    Scales are the first ``n_scales`` profile zeros divided by the radius
    of ``domain`` (or of the data, if no domain is given); centres are
    the domain centroid when ``n_centers == 1``.
    """

    def __init__(self, domain=None, n_scales=4, n_centers=1, kind="general_solution", fit_intercept=True, rcond=1e-10):
        self.domain = domain
        self.n_scales = n_scales
        self.n_centers = n_centers
        self.kind = kind
        self.fit_intercept = fit_intercept
        self.rcond = rcond

    def _basis(self, X):
        if self.domain is not None:
            dom = _require_domain(self.domain)
            centers = dom.centroid[None, :] if self.n_centers == 1 else default_centers(dom, self.n_centers)
            basis = build_basis(dom, self.n_scales, centers)
            return WaveletBasis(basis.dimension, basis.scales, basis.centers, KernelKind(self.kind), basis.R, dom)
        n = X.shape[1]
        c = X.mean(axis=0)
        R = float(np.linalg.norm(X - c, axis=1).max()) or 1.0
        scales = np.array([profile_zero(n, j) / R for j in range(1, int(self.n_scales) + 1)])
        if self.n_centers == 1:
            centers = c[None, :]
        else:
            idx = np.linspace(0, len(X) - 1, int(self.n_centers)).astype(int)
            centers = X[np.argsort(X[:, 0])][idx]
        return WaveletBasis(n, scales, centers, KernelKind(self.kind), R)

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        self.basis_ = self._basis(X)
        self.expansion_ = expand_collocation(
            X, y, self.basis_, sample_weight=sample_weight, fit_intercept=self.fit_intercept, rcond=self.rcond
        )
        self.coef_ = self.expansion_.coeffs
        self.intercept_ = self.expansion_.a0
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "expansion_")
        return evaluate_series(self.expansion_, _points(X, self.n_features_in_))


class TransientModel(RegressorMixin, BaseEstimator):
    """Transient solution fitted to sampled initial data.

    ``fit(X, y, velocity=None)`` takes displacement samples y (and
    optionally velocity samples) at points X.  ``predict`` takes rows
    ``(x1, ..., xn, t)``.
    """

    def __init__(self, domain=None, family="wave", c=1.0, h=1.0, R_damp=0.0, S_coef=0.0, forcing=None, spectrum=None, lambda_range=(0.1, 10.0)):
        self.domain = domain
        self.family = family
        self.c = c
        self.h = h
        self.R_damp = R_damp
        self.S_coef = S_coef
        self.forcing = forcing
        self.spectrum = spectrum
        self.lambda_range = lambda_range

    def fit(self, X, y, velocity=None):
        dom = _require_domain(self.domain)
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        if X.shape[1] != dom.dimension:
            raise ValueError(f"X has {X.shape[1]} features, expected {dom.dimension}")
        eq = EquationSpec(self.family, self.c, self.h, self.R_damp, self.S_coef, forcing=self.forcing)
        spec = self.spectrum if isinstance(self.spectrum, Spectrum) else eigen_scan(dom, tuple(self.lambda_range))
        steady = None
        if not eq.is_homogeneous:
            lift = lift_inhomogeneous(eq, dom, spec, quadrature=default_quadrature(dom))
            steady = lift.steady
            y = y - steady(X)
        vel = None if velocity is None else check_array(velocity, ensure_2d=False, dtype=float).reshape(-1)
        fit = fit_initial_conditions(y, vel, spec, X, "collocation", eq)
        modes = tuple(temporal_modes(eq, p.wavenumber) for p in spec.pairs)
        self.solution_ = TransientSolution(
            eq, spec, fit.A0, fit.B0, fit.A, fit.B, modes, fit.a, fit.b, steady, fit.fit_residual,
            {"energy_captured": fit.energy_captured},
        )
        self.n_features_in_ = dom.dimension
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        Xt = check_array(X, dtype=float)
        if Xt.shape[1] != self.n_features_in_ + 1:
            raise ValueError(f"expected {self.n_features_in_ + 1} columns (position and time)")
        out = np.empty(len(Xt))
        for t in np.unique(Xt[:, -1]):
            rows = Xt[:, -1] == t
            out[rows] = evaluate_solution(self.solution_, Xt[rows, :-1], [t])[:, 0]
        return out


class ModifiedHelmholtzTransform(TransformerMixin, BaseEstimator):
    """1D continuous transform of a sampled signal.

    ``fit`` stores a piecewise-linear interpolant of the samples (zero
    outside their range) and its transform; ``transform(X)`` returns
    F(lam, xi) at the centres X, shape (len(X), n_lambdas);
    ``inverse_transform(X)`` reconstructs the signal at X.
    """

    def __init__(self, lambda_range=(0.1, 40.0), n_lambdas=128, n_centers=256, half_width=1000.0):
        self.lambda_range = lambda_range
        self.n_lambdas = n_lambdas
        self.n_centers = n_centers
        self.half_width = half_width

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=True)
        if X.shape[1] != 1:
            raise ValueError("the transform is one-dimensional")
        order = np.argsort(X[:, 0])
        xs, fs = X[order, 0], y[order]
        self.signal_ = lambda P: np.interp(np.asarray(P)[:, 0], xs, fs, left=0.0, right=0.0)
        self.lambdas_ = default_lambda_grid(*self.lambda_range, self.n_lambdas)
        mid = 0.5 * (xs[0] + xs[-1])
        self.field_ = forward_transform(
            self.signal_, lambdas=self.lambdas_, centers=default_center_grid(mid, self.n_centers, self.half_width)
        )
        self.Cg_ = self.field_.Cg
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "field_")
        X = _points(X, 1)
        return forward_transform(self.signal_, lambdas=self.lambdas_, centers=X).values.T

    def inverse_transform(self, X):
        check_is_fitted(self, "field_")
        X = _points(X, 1)
        return inverse_transform(self.field_, X[:, 0]).values
