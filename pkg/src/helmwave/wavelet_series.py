"""RBF wavelet series built from nonsingular Helmholtz solutions.

A series is

    f(x) ~ a0 + sum_j sum_k alpha[j, k] * phi_n(eta_j |x - c_k|)

where ``a0`` is half the classical alpha_0.  Scales ``eta_j`` default to
the zeros of the radial profile divided by the enclosing radius, so every
atom centred at the domain centre vanishes on the covering sphere.

Coefficients come from weighted least squares (:func:`expand_collocation`,
the default path) or from closed-form projection integrals
(:func:`expand_direct`) whose prefactors are taken from
:data:`DIRECT_CALIBRATION`.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .exceptions import ConditioningError, ConfigError, DomainError
from .geometry import Domain, QuadratureRule, interval_domain, pairwise_distances, unit_ball_volume, unit_sphere_area
from .io_utils import atomic_write_text
from .special_fn import (
    KernelKind,
    KernelSpec,
    bessel_j,
    general_solution,
    modified_kernel,
    profile_zero,
    scaled_bessel_j,
)
from .special_fn import _g

__all__ = [
    "DIRECT_CALIBRATION",
    "PRINTED_PREFACTORS",
    "RankWarning",
    "WaveletBasis",
    "SeriesExpansion",
    "AdmissibilityResult",
    "default_centers",
    "build_basis",
    "design_matrix",
    "gram_schmidt_within_scale",
    "expand_collocation",
    "expand_direct",
    "direct_coefficient",
    "calibrate_direct_constants",
    "evaluate_series",
    "scale_orthogonality_check",
    "admissibility_constant",
    "gibbs_demo",
    "save_expansion",
    "load_expansion",
    "read_samples_csv",
]

#: Leading constants as printed for each closed-form coefficient formula.
PRINTED_PREFACTORS = {"9a": 2.0, "9b": 2.0, "10a": 2.0, "10b": 8.0, "29": 2.0, "30": 8.0}

#: Multipliers applied to the printed prefactors so that each formula
#: returns the exact L2-projection coefficient for a single atom centred at
#: the centre of a ball.  Produced by :func:`calibrate_direct_constants`
#: and frozen here; the test-suite re-derives and pins them.
DIRECT_CALIBRATION = {"9a": 0.5, "9b": 1.0, "10a": 1.0, "10b": 1.0, "29": 4.0, "30": 1.0}


class RankWarning(UserWarning):
    """Least-squares design matrix truncated below the rank threshold."""


@dataclass(frozen=True, eq=False)
class WaveletBasis:
    dimension: int
    scales: np.ndarray
    centers: np.ndarray
    kind: KernelKind = KernelKind.GENERAL_SOLUTION
    R: float = 1.0
    domain: Optional[Domain] = None
    ortho: Optional[tuple] = None
    rank: Optional[tuple] = None

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=float).reshape(-1)
        centers = np.asarray(self.centers, dtype=float).reshape(-1, self.dimension)
        if scales.size == 0:
            raise DomainError("basis needs at least one scale")
        if np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
            raise DomainError("scales must be positive and strictly ascending")
        if len(centers) == 0:
            raise DomainError("basis needs at least one center")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "kind", KernelKind(self.kind))

    @property
    def shape(self) -> tuple:
        return (len(self.scales), len(self.centers))

    @property
    def n_atoms(self) -> int:
        return self.shape[0] * self.shape[1]


@dataclass(frozen=True, eq=False)
class SeriesExpansion:
    basis: WaveletBasis
    a0: float
    coeffs: np.ndarray
    fit_residual: float
    method: str = "collocation"
    diagnostics: dict = field(default_factory=dict)

    @property
    def alpha0(self) -> float:
        """The classical alpha_0 (twice the constant term)."""
        return 2.0 * self.a0


def default_centers(domain: Domain, count: int) -> np.ndarray:
    """About ``count`` quasi-uniform centres inside the domain."""
    count = int(count)
    if count < 1:
        raise DomainError("need at least one center")
    lo, hi = domain.bounds
    if domain.dimension == 1:
        return np.linspace(lo[0], hi[0], count)[:, None]
    vol = float(np.prod(hi - lo))
    h = (vol / count) ** (1.0 / domain.dimension)
    for _ in range(40):
        axes = [np.arange(a + h / 2, b, h) for a, b in zip(lo, hi)]
        pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        pts = pts[domain.contains(pts)] if len(pts) else pts
        if len(pts) >= count:
            return pts
        h *= 0.95
    return pts


def build_basis(
    domain: Domain,
    J: int,
    centers=None,
    *,
    scales=None,
    kind=KernelKind.GENERAL_SOLUTION,
) -> WaveletBasis:
    """Basis with J scales eta_j = z_j / R, z_j the j-th zero of the profile.

    ``scales`` overrides the zero rule (for instance with eigen-wavenumbers).
    """
    if centers is None:
        centers = domain.centroid[None, :]
    centers = np.asarray(centers, dtype=float).reshape(-1, domain.dimension)
    if len(centers) == 0:
        raise DomainError("centers must be nonempty")
    R = float(domain.enclosing_radius)
    if scales is None:
        if int(J) < 1:
            raise DomainError("need J >= 1 scales")
        scales = np.array([profile_zero(domain.dimension, j) / R for j in range(1, int(J) + 1)])
    return WaveletBasis(domain.dimension, scales, centers, kind, R, domain)


def _atom(dimension, kind, lam, r):
    spec = KernelSpec(dimension, lam, kind)
    if spec.kind is KernelKind.GENERAL_SOLUTION:
        return general_solution(spec, r)
    return modified_kernel(spec, r)


def design_matrix(basis: WaveletBasis, points, raw: bool = False) -> np.ndarray:
    """Atom values at ``points``, columns ordered scale-major.

    With an orthogonalised basis and ``raw=False`` the columns of each scale
    are replaced by the orthonormal combinations (fewer columns when atoms
    were dropped).
    """
    X = np.asarray(points, dtype=float).reshape(-1, basis.dimension)
    r = pairwise_distances(X, basis.centers)
    blocks = []
    for j, eta in enumerate(basis.scales):
        block = _atom(basis.dimension, basis.kind, eta, r)
        if basis.ortho is not None and not raw:
            block = block @ basis.ortho[j]
        blocks.append(block)
    return np.hstack(blocks)


def gram_schmidt_within_scale(basis: WaveletBasis, quadrature: QuadratureRule, drop_tol: float = 1e-8) -> WaveletBasis:
    """Orthonormalise the atoms of each scale in L2 under ``quadrature``.

    For scale j the returned ``ortho[j]`` is an upper-triangular matrix T_j
    (columns of dropped atoms removed) such that atoms @ T_j are orthonormal.
    An atom whose remainder after projection has relative norm below
    ``drop_tol`` is dropped; ``rank`` lists how many atoms survive per scale.
    """
    w = quadrature.weights
    sw = np.sqrt(np.clip(w, 0, None))
    r = pairwise_distances(quadrature.nodes, basis.centers)
    K = len(basis.centers)
    ortho, ranks = [], []
    for j, eta in enumerate(basis.scales):
        A = _atom(basis.dimension, basis.kind, eta, r)
        gram = A.T @ (w[:, None] * A)
        ev = np.linalg.eigvalsh(gram)
        if ev.min() < -1e-8 * max(ev.max(), 1e-300):
            raise ConditioningError(f"Gram matrix of scale {j} (eta={eta:.6g}) is not positive semidefinite; refine the quadrature")
        Q = []
        T = []
        for k in range(K):
            a = sw * A[:, k]
            na = float(np.linalg.norm(a))
            coef = np.zeros(K)
            coef[k] = 1.0
            v = a.copy()
            for _ in range(2):  # re-orthogonalise once for stability
                for q, t in zip(Q, T):
                    c = float(q @ v)
                    v -= c * q
                    coef -= c * t
            nv = float(np.linalg.norm(v))
            if na == 0 or nv < drop_tol * na:
                continue
            Q.append(v / nv)
            T.append(coef / nv)
        if not T:
            raise ConditioningError(f"every atom of scale {j} vanishes on the quadrature")
        ortho.append(np.array(T).T)
        ranks.append(len(T))
    return replace(basis, ortho=tuple(ortho), rank=tuple(ranks))


def _raw_coeffs(basis, c):
    """Map coefficients of (possibly orthonormalised) columns to raw atoms."""
    J, K = basis.shape
    if basis.ortho is None:
        return c.reshape(J, K)
    out = np.zeros((J, K))
    pos = 0
    for j, T in enumerate(basis.ortho):
        m = T.shape[1]
        out[j] = T @ c[pos : pos + m]
        pos += m
    return out


def expand_collocation(
    points,
    values,
    basis: WaveletBasis,
    *,
    sample_weight=None,
    fit_intercept: bool = True,
    rcond: float = 1e-10,
) -> SeriesExpansion:
    """Least-squares coefficients from samples ``(points, values)``.

    Minimises sum_i w_i (a0 + sum alpha_jk atom_jk(x_i) - f_i)**2 through a
    truncated SVD: singular values below ``rcond * sigma_max`` are dropped
    (with a :class:`RankWarning`) and the minimum-norm solution is returned.
    With quadrature weights as ``sample_weight`` the result is the discrete
    L2 projection.
    """
    X = np.asarray(points, dtype=float).reshape(-1, basis.dimension)
    f = np.asarray(values, dtype=float).reshape(-1)
    if len(f) != len(X):
        raise DomainError(f"{len(X)} points but {len(f)} values")
    D = design_matrix(basis, X)
    if fit_intercept:
        D = np.c_[D, np.ones(len(X))]
    if len(X) < D.shape[1]:
        raise DomainError(f"{len(X)} samples cannot determine {D.shape[1]} coefficients")
    sw = np.ones(len(X)) if sample_weight is None else np.sqrt(np.asarray(sample_weight, dtype=float))
    U, s, Vt = np.linalg.svd(sw[:, None] * D, full_matrices=False)
    keep = s > rcond * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    dropped = int((~keep).sum())
    if dropped and s[0] > 0:
        warnings.warn(f"design matrix rank {int(keep.sum())} < {D.shape[1]}; minimum-norm solution returned", RankWarning, stacklevel=2)
    c = Vt[keep].T @ ((U[:, keep].T @ (sw * f)) / s[keep])
    a0 = float(c[-1]) if fit_intercept else 0.0
    coef = c[:-1] if fit_intercept else c
    resid = float(np.abs(D @ c - f).max()) if len(f) else 0.0
    diag = {"rank": int(keep.sum()), "dropped": dropped, "sigma_max": float(s[0]), "sigma_min": float(s[-1])}
    return SeriesExpansion(basis, a0, _raw_coeffs(basis, coef), resid, "collocation", diag)


def direct_coefficient(values, nodes, weights, center, eta, dimension, R, formula=None):
    """Closed-form projection coefficient of one atom, calibrated.

    ``formula`` selects the printed prefactor ("9b" for n = 1, "10b" or "29"
    for n >= 2); the calibration multiplier of :data:`DIRECT_CALIBRATION`
    is applied.  The integral runs over the quadrature region.
    """
    r = np.linalg.norm(nodes - center, axis=1)
    if dimension == 1:
        formula = formula or "9b"
        pref = PRINTED_PREFACTORS[formula] * DIRECT_CALIBRATION[formula]
        # printed form: 2 j pi / R**2 with eta = j pi / R, i.e. 2 eta / R
        return pref * eta / R * float(weights @ (values * np.sin(eta * r)))
    formula = formula or "10b"
    nu = dimension / 2.0 - 1.0
    pref = PRINTED_PREFACTORS[formula] * DIRECT_CALIBRATION[formula]
    jn = bessel_j(dimension / 2.0, eta * R)
    # r**(-nu) J_nu(eta r) = eta**nu (eta r)**(-nu) J_nu(eta r)
    kern = eta**nu * scaled_bessel_j(nu, eta * r)
    integral = float(weights @ (values * kern))
    return pref / (unit_sphere_area(dimension) * R**2 * jn**2) * (eta / (2 * math.pi)) ** (-nu) * integral


def expand_direct(f, basis: WaveletBasis, quadrature: QuadratureRule, formula: Optional[str] = None) -> SeriesExpansion:
    """Coefficients from the closed-form projection integrals.

    Exact for atoms centred at the centre of a ball (they are then
    orthogonal across scales); elsewhere the translation-orthogonality
    assumption behind the formulas does not hold and the result is only an
    approximation.  ``a0`` is the mean of f, i.e. alpha_0 / 2 with
    alpha_0 = (calibrated constant) * integral / (volume of the ball of
    radius R).
    """
    n = basis.dimension
    dom = basis.domain
    if n >= 2 and (dom is None or dom.shape not in ("disk", "ball")):
        warnings.warn("closed-form coefficients assume a spherical domain", RuntimeWarning, stacklevel=2)
    nodes, weights = quadrature.nodes, quadrature.weights
    values = np.asarray(f(nodes), dtype=float) if callable(f) else np.asarray(f, dtype=float)
    R = basis.R
    integral = float(weights @ values)
    if n == 1:
        alpha0 = PRINTED_PREFACTORS["9a"] * DIRECT_CALIBRATION["9a"] / R * integral
    else:
        alpha0 = PRINTED_PREFACTORS["10a"] * DIRECT_CALIBRATION["10a"] / (unit_ball_volume(n) * R**n) * integral
    J, K = basis.shape
    coeffs = np.zeros((J, K))
    for j, eta in enumerate(basis.scales):
        for k, c in enumerate(basis.centers):
            coeffs[j, k] = direct_coefficient(values, nodes, weights, c, eta, n, R, formula)
    exp = SeriesExpansion(basis, 0.5 * alpha0, coeffs, 0.0, "direct", {"formula": formula or ("9b" if n == 1 else "10b")})
    resid = float(np.abs(evaluate_series(exp, nodes) - values).max())
    return replace(exp, fit_residual=resid)


def calibrate_direct_constants(budget: int = 4096) -> dict:
    """Re-derive the calibration multipliers from single known atoms.

    For each formula a single atom (or the constant) centred at the centre
    of the unit ball is expanded; the multiplier is the ratio between the
    known coefficient and the value produced with the printed prefactor.
    """
    from .geometry import disk_domain, domain_quadrature

    out = {}
    line = interval_domain(-1.0, 1.0)
    q1 = domain_quadrature(line, max(64, budget // 32))
    disk = disk_domain(1.0)
    q2 = domain_quadrature(disk, budget)
    eta1 = math.pi
    atom1 = np.sin(eta1 * np.abs(q1.nodes[:, 0])) / (2 * eta1)
    raw = PRINTED_PREFACTORS["9b"] * eta1 / 1.0 * float(q1.weights @ (atom1 * np.sin(eta1 * np.abs(q1.nodes[:, 0]))))
    out["9b"] = 1.0 / raw
    # the constant function 1 has alpha_0 = 2 (constant term alpha_0 / 2 = 1)
    out["9a"] = 2.0 / (PRINTED_PREFACTORS["9a"] / 1.0 * q1.measure)
    out["10a"] = 2.0 / (PRINTED_PREFACTORS["10a"] / unit_ball_volume(2) * q2.measure)
    eta2 = profile_zero(2, 1)
    r = np.linalg.norm(q2.nodes, axis=1)
    atom2 = general_solution(KernelSpec(2, eta2), r)
    jn = bessel_j(1.0, eta2)
    integral = float(q2.weights @ (atom2 * special.j0(eta2 * r)))
    for key in ("10b", "29"):
        raw = PRINTED_PREFACTORS[key] / (unit_sphere_area(2) * jn**2) * integral
        out[key] = 1.0 / raw
    # (30) carries the same prefactor as (10b) once the frequency is divided out
    out["30"] = out["10b"] * PRINTED_PREFACTORS["10b"] / PRINTED_PREFACTORS["30"]
    return out


def evaluate_series(exp: SeriesExpansion, points) -> np.ndarray:
    """a0 + sum_jk alpha_jk atom_jk(x)."""
    D = design_matrix(exp.basis, points, raw=True)
    return exp.a0 + D @ exp.coeffs.reshape(-1)


def scale_orthogonality_check(items, quadrature: QuadratureRule, merge_rtol: float = 1e-4) -> float:
    """Largest normalised cross inner product between different scales.

    ``items`` is a :class:`WaveletBasis` (atoms of distinct scales are
    compared) or a sequence of eigenpairs (pairs whose wavenumbers differ
    by more than ``merge_rtol`` relative are compared).
    """
    from .bkm_eigen import eigenfunction_eval

    if isinstance(items, WaveletBasis):
        A = design_matrix(items, quadrature.nodes, raw=True)
        J, K = items.shape
        labels = np.repeat(np.arange(J), K)
        fields = A.T
    else:
        pairs = list(items)
        fields = np.array([eigenfunction_eval(p, quadrature.nodes) for p in pairs])
        lams = np.array([p.wavenumber for p in pairs])
        labels = np.zeros(len(pairs), dtype=int)
        for i in range(1, len(pairs)):
            same = abs(lams[i] - lams[i - 1]) <= merge_rtol * max(lams[i], 1e-300)
            labels[i] = labels[i - 1] if same else labels[i - 1] + 1
    if len(set(labels.tolist())) < 2:
        raise DomainError("orthogonality check needs at least two scales")
    G = fields @ (quadrature.weights[:, None] * fields.T)
    norms = np.sqrt(np.clip(np.diag(G), 1e-300, None))
    C = np.abs(G) / np.outer(norms, norms)
    mask = labels[:, None] != labels[None, :]
    return float(C[mask].max())


# --------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibilityResult:
    value: float
    converged: bool
    tail: float
    message: str = ""

    def __float__(self):
        return self.value


def _profile(spec: KernelSpec, dilation: float):
    n = spec.dimension

    def p(r):
        r = np.asarray(r, dtype=float)
        if spec.kind is KernelKind.MODIFIED_HELMHOLTZ:
            # finite at the origin for n = 1; quadrature never samples r = 0 otherwise
            return dilation ** (n - 1) * _g(n, spec.wavenumber, dilation * r)
        return dilation ** (n - 1) * _atom(n, spec.kind, spec.wavenumber, dilation * r)

    return p


def _radial_ft(p, n, s, r_cut):
    """n-dimensional Fourier transform of a radial profile at radius s."""
    if n == 1:
        val, _ = integrate.quad(p, 0, np.inf, weight="cos", wvar=s, limlst=200)
        return 2.0 * val
    if n == 3:
        def rp(r):
            r = max(r, 1e-300)  # r * p(r) stays finite at the origin
            return float(p(r)) * r

        val, _ = integrate.quad(rp, 0, np.inf, weight="sin", wvar=s, limlst=200)
        return 4.0 * math.pi / s * val
    nu = n / 2.0 - 1.0
    panels = int(np.ceil(s * r_cut / math.pi)) + 16
    g, w = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(0.0, r_cut, panels + 1)
    h = np.diff(edges)
    r = (edges[:-1, None] + 0.5 * h[:, None] * (g[None, :] + 1.0)).ravel()
    wr = (0.5 * h[:, None] * w[None, :]).ravel()
    vals = p(r) * special.jv(nu, s * r) * r ** (n / 2.0)
    return (2 * math.pi) ** (n / 2.0) * s ** (-nu) * float(wr @ vals)


def admissibility_constant(kernel: KernelSpec, n: Optional[int] = None, dilation: float = 1.0, points: int = 160) -> AdmissibilityResult:
    """Admissibility constant C_g = int_0^inf |h(s)|**2 ds / s.

    ``h(s) = s * G(s)`` where G is the n-dimensional Fourier transform of
    the (dilated) radial profile; with this choice C_g is the constant of
    the reconstruction formula in :mod:`helmwave.transform` and equals
    1 / (2 lam**2) for the modified Helmholtz kernel in every dimension.
    A profile whose transform is not a function (no decay) is reported as
    divergent instead of raising.
    """
    n = kernel.dimension if n is None else int(n)
    spec = KernelSpec(n, kernel.wavenumber, kernel.kind)
    if spec.wavenumber == 0:
        return AdmissibilityResult(math.inf, False, math.inf, "constant kernel has a delta transform")
    p = _profile(spec, dilation)
    lam = spec.wavenumber * dilation
    # integrability of the profile: shell integrals over [T, 2T] must shrink
    shells = []
    for k in range(3, 9):
        T = 2.0**k / lam
        rr = np.linspace(T, 2 * T, 2001)
        shells.append(float(np.trapezoid(np.abs(p(rr)) * rr ** (n - 1), rr)))
    if not (shells[-1] < 1e-3 * shells[0]):
        return AdmissibilityResult(math.inf, False, shells[-1], "profile does not decay; its transform is distributional and C_g diverges")
    r_cut = 40.0 / lam
    s = np.geomspace(1e-4 * lam, 256.0 * lam, points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        G = np.array([_radial_ft(p, n, si, r_cut) for si in s])
    y = s**2 * G**2  # integrand of C_g in log(s)
    body = float(np.trapezoid(y, np.log(s)))
    slope = float(np.log(y[-1] / y[-10]) / np.log(s[-1] / s[-10])) if y[-1] > 0 and y[-10] > 0 else -np.inf
    if not np.isfinite(body) or slope >= -0.5:
        return AdmissibilityResult(math.inf, False, math.inf, "integrand does not decay at high frequency")
    tail = float(y[-1] / -slope) if np.isfinite(slope) else 0.0
    head = float(y[0] / 2.0)  # y ~ s**2 near the origin
    value = body + tail + head
    if not value > 0:
        return AdmissibilityResult(value, False, tail, "C_g is not positive")
    return AdmissibilityResult(value, True, tail, "")


# --------------------------------------------------------------------------
# Gibbs demonstration


def gibbs_demo(n_fourier: int = 101, scales: int = 4, centers: int = 8, samples: int = 400, grid: int = 20001) -> dict:
    """Overshoot of truncated series for the step sign(x - 0.5) on [0, 1].

    Returns overshoot divided by the jump (2) for the Fourier partial sum
    with ``n_fourier`` odd harmonics and for a least-squares wavelet fit.
    Nothing is asserted here; the Fourier figure validates the harness
    against the classical 0.0895.
    """
    x = np.linspace(0.0, 1.0, grid)
    k = 2 * np.arange(n_fourier) + 1
    S = -(4.0 / math.pi) * (np.sin(2 * math.pi * np.outer(x, k)) / k).sum(axis=1)
    fourier = (float(S.max()) - 1.0) / 2.0
    dom = interval_domain(0.0, 1.0)
    basis = build_basis(dom, scales, default_centers(dom, centers))
    xs = (np.arange(samples) + 0.5) / samples
    fs = np.sign(xs - 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        exp = expand_collocation(xs[:, None], fs, basis)
    fit = evaluate_series(exp, x[:, None])
    rbf = (float(fit.max()) - 1.0) / 2.0
    return {
        "jump": 2.0,
        "fourier_terms": int(n_fourier),
        "fourier_overshoot": fourier,
        "rbf_atoms": basis.n_atoms,
        "rbf_overshoot": rbf,
        "reference": 0.08949,
    }


# --------------------------------------------------------------------------
# files

_EXP_FIELDS = {"scales", "centers", "a0", "coeffs", "kernel", "fit_residual"}


def save_expansion(exp: SeriesExpansion, path) -> None:
    doc = {
        "scales": exp.basis.scales.tolist(),
        "centers": exp.basis.centers.tolist(),
        "a0": exp.a0,
        "coeffs": exp.coeffs.tolist(),
        "kernel": exp.basis.kind.value,
        "fit_residual": exp.fit_residual,
    }
    atomic_write_text(path, json.dumps(doc, indent=2))


def load_expansion(path, domain: Optional[Domain] = None) -> SeriesExpansion:
    doc = json.loads(Path(path).read_text())
    extra = set(doc) - _EXP_FIELDS
    missing = _EXP_FIELDS - set(doc)
    if extra:
        raise ConfigError("unknown expansion field", sorted(extra)[0], "unknown_field")
    if missing:
        raise ConfigError("missing expansion field", sorted(missing)[0], "missing_field")
    centers = np.asarray(doc["centers"], dtype=float)
    dim = centers.shape[1]
    R = domain.enclosing_radius if domain is not None else 1.0
    basis = WaveletBasis(dim, doc["scales"], centers, doc["kernel"], R, domain)
    coeffs = np.asarray(doc["coeffs"], dtype=float).reshape(basis.shape)
    return SeriesExpansion(basis, float(doc["a0"]), coeffs, float(doc["fit_residual"]), "loaded")


def read_samples_csv(path, dimension: Optional[int] = None):
    """Read ``x1,...,xn,value`` samples; returns (points, values)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        n = len(header) - 1
        expected = [f"x{i + 1}" for i in range(n)] + ["value"]
        if header != expected:
            raise ConfigError(f"samples header must be {','.join(expected)}", "samples.header", "bad_format")
        if dimension is not None and n != dimension:
            raise ConfigError(f"samples have dimension {n}, geometry has {dimension}", "samples.dimension", "dimension_mismatch")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float).reshape(-1, n + 1)
    return data[:, :n], data[:, n]
