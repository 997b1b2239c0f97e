"""Modal solutions of linear transient equations on point-cloud domains.

Separation of variables u(x, t) = T(t) v(x) splits every supported family
into the Helmholtz eigenproblem -lap v = lam**2 v (solved in
:mod:`helmwave.bkm_eigen`) and the time equation

    T'' + b T' + k T = 0,

with b = R_damp c**2 and k = c**2 (lam**2 + S_coef) (wave: R_damp = S_coef
= 0), or T' = -h**2 lam**2 T for diffusion.  Each mode carries the pair of
fundamental solutions T_A (T(0) = 1, T'(0) = 0) and T_B (T(0) = 0,
T'(0) = 1), both in closed form.

Amplitudes: u = steady + sum_j [a_j T_A^j + B_j f_j T_B^j] v_j where f_j is
the mode frequency (omega, the damped frequency, or 1) and v_j the
L2-normalised eigenfunction.  In terms of the boundary-knot coefficients
beta_j of v_j, A[j] = a_j beta_j and B[j] = B_j beta_j.
"""
from __future__ import annotations

import enum
import inspect
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .bkm_eigen import (
    Eigenpair,
    Spectrum,
    basis_columns,
    default_quadrature,
    eigenfunction_eval,
)
from .exceptions import DomainError, ResonanceError, UnsupportedFeatureError
from .geometry import BCKind, Domain, QuadratureRule
from .io_utils import atomic_write_text, format_float

__all__ = [
    "Family",
    "Regime",
    "EquationSpec",
    "TemporalMode",
    "FitResult",
    "LiftResult",
    "TransientSolution",
    "temporal_modes",
    "fit_initial_conditions",
    "lift_inhomogeneous",
    "solve_transient",
    "evaluate_solution",
    "evaluate_time_derivative",
    "energy",
    "write_field_csv",
    "field_csv_text",
]

_CRITICAL_RTOL = 1e-10


class Family(str, enum.Enum):
    WAVE = "wave"
    DIFFUSION = "diffusion"
    DAMPED_WAVE = "damped_wave"
    TRANSMISSION_LINE = "transmission_line"


class Regime(str, enum.Enum):
    OSCILLATORY = "oscillatory"
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"
    PURE_DECAY = "pure_decay"
    POLYNOMIAL = "polynomial"


def _check_static(fn, name):
    if fn is None:
        return
    if not callable(fn):
        raise DomainError(f"{name} must be callable")
    try:
        params = inspect.signature(fn).parameters.values()
    except (TypeError, ValueError):
        return
    required = [
        p
        for p in params
        if p.default is inspect.Parameter.empty and p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)
    ]
    if any(p.name == "t" for p in params) or len(required) >= 2:
        raise UnsupportedFeatureError(f"{name} depends on time; only time-independent data is supported")


@dataclass(frozen=True)
class EquationSpec:
    """Equation family, constants and optional static data.

    ``forcing`` f enters as lap u = (time terms) + f.  ``dirichlet_data`` and
    ``neumann_data`` are functions of position giving the boundary values on
    Dirichlet nodes and the values of du/dn (+ a u on Robin nodes)
    elsewhere.  All callables take an (m, n) array of points.
    """

    family: Family = Family.WAVE
    c: float = 1.0
    h: float = 1.0
    R_damp: float = 0.0
    S_coef: float = 0.0
    forcing: Optional[Callable] = None
    dirichlet_data: Optional[Callable] = None
    neumann_data: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.c > 0:
            raise DomainError(f"c must be positive, got {self.c}")
        if not self.h > 0:
            raise DomainError(f"h must be positive, got {self.h}")
        if not self.R_damp >= 0:
            raise DomainError(f"R_damp must be >= 0, got {self.R_damp}")
        if not np.isfinite(self.S_coef):
            raise DomainError("S_coef must be finite")
        for name in ("forcing", "dirichlet_data", "neumann_data"):
            _check_static(getattr(self, name), name)

    @classmethod
    def wave(cls, c=1.0, **data):
        return cls(Family.WAVE, c=c, **data)

    @classmethod
    def diffusion(cls, h=1.0, **data):
        return cls(Family.DIFFUSION, h=h, **data)

    @classmethod
    def damped_wave(cls, c=1.0, R_damp=0.0, **data):
        return cls(Family.DAMPED_WAVE, c=c, R_damp=R_damp, **data)

    @classmethod
    def transmission_line(cls, c=1.0, R_damp=0.0, S_coef=0.0, **data):
        return cls(Family.TRANSMISSION_LINE, c=c, R_damp=R_damp, S_coef=S_coef, **data)

    @property
    def second_order(self) -> bool:
        return self.family is not Family.DIFFUSION

    @property
    def shift(self) -> float:
        """Zeroth-order coefficient S of the spatial operator lap - S."""
        return self.S_coef if self.family is Family.TRANSMISSION_LINE else 0.0

    @property
    def is_homogeneous(self) -> bool:
        return self.forcing is None and self.dirichlet_data is None and self.neumann_data is None

    def homogeneous(self) -> "EquationSpec":
        return replace(self, forcing=None, dirichlet_data=None, neumann_data=None)

    def damping(self) -> float:
        if self.family in (Family.DAMPED_WAVE, Family.TRANSMISSION_LINE):
            return self.R_damp * self.c**2
        return 0.0


@dataclass(frozen=True)
class TemporalMode:
    wavenumber: float
    regime: Regime
    params: dict
    b: float = 0.0
    k: float = 0.0

    @property
    def frequency(self) -> float:
        """Factor divided out of B amplitudes."""
        if self.regime is Regime.OSCILLATORY:
            return self.params["omega"]
        if self.regime is Regime.UNDERDAMPED:
            return self.params["omega_d"]
        return 1.0

    @property
    def has_companion(self) -> bool:
        return self.regime is not Regime.PURE_DECAY

    def T_A(self, t):
        return self._eval(np.asarray(t, dtype=float), 0, 0)

    def T_B(self, t):
        return self._eval(np.asarray(t, dtype=float), 1, 0)

    def dT_A(self, t, order: int = 1):
        return self._eval(np.asarray(t, dtype=float), 0, order)

    def dT_B(self, t, order: int = 1):
        return self._eval(np.asarray(t, dtype=float), 1, order)

    def _eval(self, t, which, order):
        p = self.params
        reg = self.regime
        if reg is Regime.PURE_DECAY:
            if which:
                raise DomainError("first-order modes have no velocity companion")
            kap = p["kappa"]
            return (-kap) ** order * np.exp(-kap * t)
        if reg is Regime.POLYNOMIAL:
            if which == 0:
                return np.ones_like(t) if order == 0 else np.zeros_like(t)
            return t if order == 0 else (np.ones_like(t) if order == 1 else np.zeros_like(t))
        if reg is Regime.OSCILLATORY:
            w = p["omega"]
            # d^m/dt^m cos(wt) = w^m cos(wt + m pi/2)
            if which == 0:
                return w**order * np.cos(w * t + order * math.pi / 2)
            return w ** (order - 1) * np.sin(w * t + order * math.pi / 2)
        if reg is Regime.UNDERDAMPED:
            s, w = p["sigma"], p["omega_d"]
            # T = Re(C e^{z t}) with z = -s + i w
            z = complex(-s, w)
            C = complex(1.0, -s / w) if which == 0 else complex(0.0, -1.0 / w)
            return np.real(C * z**order * np.exp(z * t))
        if reg is Regime.CRITICAL:
            s = p["sigma"]
            # T = (c0 + c1 t) e^{-s t}; derivative of order m by Leibniz
            c0, c1 = (1.0, s) if which == 0 else (0.0, 1.0)
            e = np.exp(-s * t)
            return ((-s) ** order * (c0 + c1 * t) + order * (-s) ** (order - 1) * c1) * e if order else (c0 + c1 * t) * e
        s1, s2 = p["s1"], p["s2"]
        d = s1 - s2
        if which == 0:
            return (s1 * s2**order * np.exp(s2 * t) - s2 * s1**order * np.exp(s1 * t)) / d
        return (s1**order * np.exp(s1 * t) - s2**order * np.exp(s2 * t)) / d


def temporal_modes(eq: EquationSpec, lam: float) -> TemporalMode:
    """Closed-form time factors for wavenumber ``lam``."""
    lam = float(lam)
    if not lam >= 0:
        raise DomainError(f"wavenumber must be >= 0, got {lam}")
    if eq.family is Family.DIFFUSION:
        return TemporalMode(lam, Regime.PURE_DECAY, {"kappa": eq.h**2 * lam**2})
    b = eq.damping()
    k = eq.c**2 * (lam**2 + eq.shift)
    if b == 0.0:
        if k > 0:
            return TemporalMode(lam, Regime.OSCILLATORY, {"omega": math.sqrt(k)}, 0.0, k)
        if k == 0:
            return TemporalMode(lam, Regime.POLYNOMIAL, {}, 0.0, 0.0)
        g = math.sqrt(-k)
        return TemporalMode(lam, Regime.OVERDAMPED, {"s1": g, "s2": -g}, 0.0, k)
    disc = b * b - 4.0 * k
    if abs(disc) <= _CRITICAL_RTOL * b * b:
        return TemporalMode(lam, Regime.CRITICAL, {"sigma": b / 2.0}, b, k)
    if disc < 0:
        return TemporalMode(lam, Regime.UNDERDAMPED, {"sigma": b / 2.0, "omega_d": math.sqrt(-disc) / 2.0}, b, k)
    root = math.sqrt(disc)
    return TemporalMode(lam, Regime.OVERDAMPED, {"s1": (-b + root) / 2.0, "s2": (-b - root) / 2.0}, b, k)


# --------------------------------------------------------------------------
# fitting


@dataclass(frozen=True, eq=False)
class FitResult:
    A0: float
    B0: float
    A: np.ndarray
    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    fit_residual: float
    fit_residual_velocity: float
    energy_captured: float
    energy_captured_velocity: float

    def __iter__(self):
        return iter((self.A0, self.B0, self.A, self.B))


def _values(fn, X):
    if fn is None:
        return np.zeros(len(X))
    if callable(fn):
        out = np.asarray(fn(X), dtype=float)
        return np.broadcast_to(out, (len(X),)).astype(float) if out.ndim == 0 else out.reshape(-1)
    return np.asarray(fn, dtype=float).reshape(-1)


def _fit_points(domain, spectrum, quadrature_or_samples):
    """Return (points, weights or None)."""
    q = quadrature_or_samples
    if q is None:
        if domain is None:
            raise DomainError("need a quadrature rule, samples or a domain")
        q = default_quadrature(domain)
    if isinstance(q, QuadratureRule):
        return q.nodes, q.weights
    X = np.asarray(q, dtype=float)
    dim = spectrum.pairs[0].dimension
    if X.ndim != 2 or X.shape[1] != dim:
        raise DomainError(f"sample points must have shape (m, {dim})")
    return X, None


def _lstsq(V, f, w, rcond=1e-10):
    sw = np.ones(len(f)) if w is None else np.sqrt(w)
    c, *_ = np.linalg.lstsq(sw[:, None] * V, sw * f, rcond=rcond)
    return c


def fit_initial_conditions(
    phi,
    psi,
    spectrum: Spectrum,
    quadrature_or_samples=None,
    method: str = "collocation",
    equation: Optional[EquationSpec] = None,
    domain: Optional[Domain] = None,
) -> FitResult:
    """Modal amplitudes of the initial displacement ``phi`` and velocity ``psi``.

    ``collocation`` solves the (quadrature-weighted) least-squares system in
    the eigenfunctions; ``direct`` uses the projections <phi, v_j> of the
    orthonormal eigenfunctions, with A0 = 2 mean(phi) and B0 = 2 mean(psi)
    for the constant mode.  Velocity amplitudes are divided by each mode's
    frequency.
    """
    eq = equation or EquationSpec()
    if len(spectrum) == 0:
        raise DomainError("cannot fit initial conditions on an empty spectrum")
    if not eq.second_order and psi is not None:
        raise DomainError("the diffusion equation is first order in time and takes no initial velocity")
    if method not in ("collocation", "direct"):
        raise DomainError(f"unknown fitting method {method!r}")
    X, w = _fit_points(domain, spectrum, quadrature_or_samples)
    if method == "direct" and w is None:
        raise DomainError("the direct method needs a quadrature rule")
    pairs = list(spectrum.pairs)
    V = np.column_stack([eigenfunction_eval(p, X) for p in pairs])
    f = _values(phi, X)
    g = _values(psi, X) if eq.second_order else np.zeros(len(X))
    if method == "collocation":
        a = _lstsq(V, f, w)
        vel = _lstsq(V, g, w)
    else:
        a = V.T @ (w * f)
        vel = V.T @ (w * g)
    modes = [temporal_modes(eq, p.wavenumber) for p in pairs]
    freq = np.array([m.frequency for m in modes])
    Bamp = vel / freq
    L = max((p.beta.size for p in pairs), default=0)
    A = np.zeros((len(pairs), L))
    B = np.zeros((len(pairs), L))
    A0 = B0 = 0.0
    for j, p in enumerate(pairs):
        if p.is_constant:
            A0 = 2.0 * a[j] * p.constant
            B0 = 2.0 * Bamp[j] * p.constant
        else:
            A[j, : p.beta.size] = a[j] * p.beta
            B[j, : p.beta.size] = Bamp[j] * p.beta
    res_f = float(np.abs(V @ a - f).max()) if len(f) else 0.0
    res_g = float(np.abs(V @ vel - g).max()) if len(g) else 0.0

    def captured(coef, vals):
        total = float(vals @ (w * vals)) if w is not None else float(vals @ vals)
        if total <= 0:
            return 1.0
        if w is not None:
            return float(np.sum(coef**2) / total) if method == "direct" else float((V @ coef) @ (w * (V @ coef)) / total)
        return float((V @ coef) @ (V @ coef) / total)

    return FitResult(A0, B0, A, B, a, Bamp, res_f, res_g, captured(a, f), captured(vel, g))


# --------------------------------------------------------------------------
# inhomogeneous data


@dataclass(frozen=True, eq=False)
class LiftResult:
    steady: Optional[Callable]
    equation: EquationSpec
    phi: Callable
    psi: Optional[Callable]
    mode_shifts: np.ndarray
    lift_residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)


def _boundary_rows(domain, kappa, centres, nodes):
    """Boundary operator applied to [1, phi(kappa |x - c_s|)] columns."""
    pos = np.array([b.position for b in nodes])
    nrm = np.array([b.normal for b in nodes])
    L = len(centres)
    ones = np.ones(L)
    zeros = np.zeros(L)
    src_nrm = np.zeros_like(centres)
    V, G = basis_columns(kappa, pos, centres, src_nrm, ones, zeros, gradient=True)
    dn = np.einsum("msk,mk->ms", G, nrm)
    rows = np.empty((len(nodes), L + 1))
    for i, node in enumerate(nodes):
        if node.bc.kind is BCKind.DIRICHLET:
            rows[i] = np.r_[1.0, V[i]]
        elif node.bc.kind is BCKind.NEUMANN:
            rows[i] = np.r_[0.0, dn[i]]
        else:
            a = node.bc.robin_a
            rows[i] = np.r_[a, dn[i] + a * V[i]]
    return rows, pos


def _boundary_data(eq, nodes, pos):
    kinds = [n.bc.kind for n in nodes]
    D = _values(eq.dirichlet_data, pos) if eq.dirichlet_data is not None else np.zeros(len(pos))
    N = _values(eq.neumann_data, pos) if eq.neumann_data is not None else np.zeros(len(pos))
    return np.array([D[i] if k is BCKind.DIRICHLET else N[i] for i, k in enumerate(kinds)])


def lift_inhomogeneous(
    eq: EquationSpec,
    domain: Domain,
    spectrum: Spectrum,
    phi=None,
    psi=None,
    quadrature: Optional[QuadratureRule] = None,
) -> LiftResult:
    """Shift static forcing and boundary data into a steady part.

    The steady part is w = h + w2.  The boundary lift h is a constant plus
    general-solution atoms at wavenumber kappa (half the lowest nonzero
    eigen-wavenumber), fitted by least squares to the boundary data on the
    check nodes; a constant alone is used when it fits exactly.  The
    remainder solves (lap - S) w2 = f - (lap - S) h with homogeneous
    conditions and is expanded in the eigenfunctions,
    w2 = sum_j c_j v_j, c_j = -<f~, v_j> / (lam_j**2 + S).  The returned
    ``mode_shifts`` are these c_j: the constant particular solution of each
    forced modal oscillator.
    """
    phi_fn = phi if phi is not None else (lambda X: np.zeros(len(X)))
    if eq.is_homogeneous:
        return LiftResult(None, eq, phi_fn, psi, np.zeros(len(spectrum)))
    for name in ("forcing", "dirichlet_data", "neumann_data"):
        _check_static(getattr(eq, name), name)
    quad = quadrature if quadrature is not None else default_quadrature(domain)
    S = eq.shift
    pairs = list(spectrum.pairs)
    nonzero = [p.wavenumber for p in pairs if p.wavenumber > 0]
    kappa = 0.5 * (min(nonzero) if nonzero else 1.0)

    nodes = domain.check_nodes
    coef = np.zeros(len(domain.boundary) + 1)
    centres = domain.boundary_positions
    lift_res = 0.0
    if eq.dirichlet_data is not None or eq.neumann_data is not None:
        rows, pos = _boundary_rows(domain, kappa, centres, nodes)
        data = _boundary_data(eq, nodes, pos)
        col0 = rows[:, 0]
        scale = max(float(np.abs(data).max()), 1e-300)
        const = float(col0 @ data / (col0 @ col0)) if col0 @ col0 > 0 else 0.0
        if np.abs(col0 * const - data).max() <= 1e-12 * scale:
            coef[0] = const
        else:
            coef, *_ = np.linalg.lstsq(rows, data, rcond=1e-12)
        lift_res = float(np.abs(rows @ coef - data).max())

    def h_parts(X):
        X = np.asarray(X, dtype=float).reshape(-1, domain.dimension)
        if not np.any(coef[1:]):
            return np.full(len(X), coef[0]), np.zeros(len(X))
        ones = np.ones(len(centres))
        V = basis_columns(kappa, X, centres, np.zeros_like(centres), ones, np.zeros(len(centres)))
        return np.full(len(X), coef[0]), V @ coef[1:]

    hc, ha = h_parts(quad.nodes)
    ftil = _values(eq.forcing, quad.nodes) + (kappa**2 + S) * ha + S * hc
    Vq = np.column_stack([eigenfunction_eval(p, quad.nodes) for p in pairs])
    proj = Vq.T @ (quad.weights * ftil)
    shifts = np.zeros(len(pairs))
    scale = max(float(np.sqrt(quad.weights @ ftil**2)), 1e-300)
    for j, p in enumerate(pairs):
        denom = p.wavenumber**2 + S
        if abs(denom) <= 1e-12:
            if abs(proj[j]) > 1e-10 * scale:
                raise ResonanceError(f"static forcing drives the wavenumber-{p.wavenumber:g} mode; no steady state exists")
            continue
        shifts[j] = -proj[j] / denom

    def steady(X):
        X = np.asarray(X, dtype=float).reshape(-1, domain.dimension)
        c, a = h_parts(X)
        out = c + a
        for j, p in enumerate(pairs):
            if shifts[j]:
                out = out + shifts[j] * eigenfunction_eval(p, X)
        return out

    def phi_tilde(X):
        return _values(phi_fn, X) - steady(X)

    diag = {"kappa": kappa, "lift_coefficients": coef, "lift_residual": lift_res}
    return LiftResult(steady, eq.homogeneous(), phi_tilde, psi, shifts, lift_res, diag)


# --------------------------------------------------------------------------
# assembled solution


@dataclass(frozen=True, eq=False)
class TransientSolution:
    equation: EquationSpec
    spectrum: Spectrum
    A0: float
    B0: float
    A: np.ndarray
    B: np.ndarray
    modes: tuple
    a: np.ndarray
    b: np.ndarray
    steady: Optional[Callable] = None
    fit_residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)


def solve_transient(
    eq: EquationSpec,
    domain: Domain,
    spectrum: Spectrum,
    phi,
    psi=None,
    method: str = "collocation",
    quadrature: Optional[QuadratureRule] = None,
) -> TransientSolution:
    """Assemble u(x, t) from the spectrum and the initial data."""
    quad = quadrature if quadrature is not None else default_quadrature(domain)
    lift = lift_inhomogeneous(eq, domain, spectrum, phi, psi, quad)
    phi_h = lift.phi
    psi_h = lift.psi if eq.second_order else None

    Dnodes = [b for b in domain.boundary if b.bc.kind is BCKind.DIRICHLET]
    if Dnodes and phi is not None:
        pos = np.array([b.position for b in Dnodes])
        mismatch = float(np.abs(_values(phi_h, pos)).max())
        if mismatch > 1e-6 * max(1.0, float(np.abs(_values(phi, quad.nodes)).max())):
            warnings.warn(f"initial data disagrees with the Dirichlet data by up to {mismatch:.3g}", RuntimeWarning, stacklevel=2)

    fit = fit_initial_conditions(phi_h, psi_h, spectrum, quad, method, eq)
    modes = tuple(temporal_modes(eq, p.wavenumber) for p in spectrum.pairs)
    captured = min(fit.energy_captured, fit.energy_captured_velocity)
    if captured < 0.99:
        warnings.warn(f"fitted modes capture only {captured:.1%} of the initial data", RuntimeWarning, stacklevel=2)
    diag = {
        "modes_used": len(spectrum),
        "fit_residual": fit.fit_residual,
        "fit_residual_velocity": fit.fit_residual_velocity,
        "energy_captured": fit.energy_captured,
        "energy_captured_velocity": fit.energy_captured_velocity,
        "lift_residual": lift.lift_residual,
        "mode_shifts": lift.mode_shifts,
    }
    return TransientSolution(
        eq, spectrum, fit.A0, fit.B0, fit.A, fit.B, modes, fit.a, fit.b, lift.steady, fit.fit_residual, diag
    )


def _time_factors(sol, times, order):
    t = np.asarray(times, dtype=float).reshape(-1)
    if np.any(t < 0):
        raise DomainError("times must be >= 0")
    TA = np.array([m.dT_A(t, order) if order else m.T_A(t) for m in sol.modes]).reshape(len(sol.modes), len(t))
    TB = np.zeros_like(TA)
    for j, m in enumerate(sol.modes):
        if m.has_companion:
            TB[j] = (m.dT_B(t, order) if order else m.T_B(t)) * m.frequency
    return TA, TB


def evaluate_solution(sol: TransientSolution, points, times) -> np.ndarray:
    """Field values u[point, time]."""
    dim = sol.spectrum.pairs[0].dimension
    X = np.asarray(points, dtype=float).reshape(-1, dim)
    TA, TB = _time_factors(sol, times, 0)
    V = np.column_stack([eigenfunction_eval(p, X) for p in sol.spectrum.pairs])
    U = V @ (sol.a[:, None] * TA + sol.b[:, None] * TB)
    if sol.steady is not None:
        U = U + sol.steady(X)[:, None]
    return U


def evaluate_time_derivative(sol: TransientSolution, points, times, order: int = 1) -> np.ndarray:
    dim = sol.spectrum.pairs[0].dimension
    X = np.asarray(points, dtype=float).reshape(-1, dim)
    TA, TB = _time_factors(sol, times, order)
    V = np.column_stack([eigenfunction_eval(p, X) for p in sol.spectrum.pairs])
    return V @ (sol.a[:, None] * TA + sol.b[:, None] * TB)


def energy(sol: TransientSolution, times, quadrature: QuadratureRule) -> np.ndarray:
    """E(t) = 1/2 int (u_t**2 + c**2 |grad u|**2) for the homogeneous part."""
    X = quadrature.nodes
    vals, grads = [], []
    for p in sol.spectrum.pairs:
        v, g = eigenfunction_eval(p, X, gradient=True)
        vals.append(v)
        grads.append(g)
    V = np.column_stack(vals)
    G = np.stack(grads, axis=-1)  # (m, n, J)
    TA, TB = _time_factors(sol, times, 0)
    dA, dB = _time_factors(sol, times, 1)
    amp = sol.a[:, None] * TA + sol.b[:, None] * TB
    vel = sol.a[:, None] * dA + sol.b[:, None] * dB
    ut = V @ vel
    gu = np.einsum("mkj,jt->mkt", G, amp)
    dens = ut**2 + sol.equation.c**2 * np.sum(gu**2, axis=1)
    return 0.5 * quadrature.weights @ dens


def field_csv_text(points, times, U) -> str:
    X = np.asarray(points, dtype=float)
    X = X.reshape(len(X), -1)
    t = np.asarray(times, dtype=float).reshape(-1)
    n = X.shape[1]
    lines = [",".join([f"x{i + 1}" for i in range(n)] + ["t", "u"])]
    for i, x in enumerate(X):
        head = ",".join(format_float(v) for v in x)
        for k, tk in enumerate(t):
            lines.append(f"{head},{format_float(tk)},{format_float(U[i, k])}")
    return "\n".join(lines) + "\n"


def write_field_csv(path, points, times, U) -> None:
    """Write ``x1,...,xn,t,u`` rows, points outer and times inner."""
    atomic_write_text(path, field_csv_text(points, times, U))
