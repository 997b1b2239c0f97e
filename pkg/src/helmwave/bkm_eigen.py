"""Helmholtz eigenpairs on point-cloud domains by the boundary knot method.

The field is expanded in nonsingular general solutions centred at the
boundary nodes,

    v(x) = sum_s beta_s * c_s(x),
    c_s(x) = w_s phi(lam |x - x_s|) - d_s n_s . grad_x phi(lam |x - x_s|),

with (w_s, d_s) = (1, 0) for Dirichlet sources, (0, 1) for Neumann sources
and (a_s, 1) for Robin sources.  Each column satisfies the Helmholtz
equation exactly, so only the boundary conditions are collocated.  With this
choice the collocation matrix is symmetric for every mix of conditions.

Two eigenvalue schemes are provided:

* :func:`eigen_scan` looks for the wavenumbers where the collocation system
  becomes singular.
* :func:`eigen_algebraic` turns the problem into a standard matrix eigenvalue
  problem around a small shift ``delta`` by dual reciprocity.
"""
from __future__ import annotations

import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .exceptions import ConditioningError, DomainError
from .io_utils import atomic_write_text
from .geometry import BCKind, Domain, QuadratureRule, domain_quadrature, pairwise_distances
from .special_fn import KernelSpec, general_solution_derivatives

__all__ = [
    "Eigenpair",
    "Spectrum",
    "assemble_bkm_matrix",
    "basis_columns",
    "scan_objective",
    "eigen_scan",
    "eigen_algebraic",
    "eigenfunction_eval",
    "spectrum_to_records",
    "save_spectrum",
    "load_spectrum",
    "default_quadrature",
    "thread_count",
]

_SVD_RCOND = 1e-14


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """One Helmholtz eigenpair, -lap v = lam**2 v.

    ``beta`` already carries the L2 normalisation.  A pair with an empty
    ``beta`` is the constant mode; its value is ``constant``.
    """

    wavenumber: float
    beta: np.ndarray
    source_points: np.ndarray
    source_normals: np.ndarray
    source_weights: np.ndarray
    source_derivs: np.ndarray
    bc_residual: float
    norm: float = 1.0
    constant: float = 0.0
    multiplicity: int = 1
    sigma: float = 0.0

    @property
    def dimension(self) -> int:
        return int(self.source_points.shape[1])

    @property
    def is_constant(self) -> bool:
        return self.beta.size == 0


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs in ascending wavenumber order.

    Degenerate eigenvalues appear as several pairs sharing (numerically) the
    same wavenumber; :meth:`distinct_wavenumbers` collapses them.
    """

    pairs: tuple
    scheme: str
    scan_range: tuple
    delta: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.array([p.wavenumber for p in self.pairs])

    def distinct_wavenumbers(self, rtol: float = 1e-4) -> np.ndarray:
        out = []
        for lam in self.wavenumbers:
            if out and abs(lam - out[-1]) <= rtol * max(lam, 1e-300):
                continue
            out.append(lam)
        return np.array(out)

    def nonzero(self) -> "Spectrum":
        return replace(self, pairs=tuple(p for p in self.pairs if not p.is_constant))


def thread_count() -> int:
    raw = os.environ.get("HELMWAVE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def default_quadrature(domain: Domain) -> QuadratureRule:
    budget = {1: 64, 2: 64 * 64}.get(domain.dimension, 20000)
    return domain_quadrature(domain, budget)


# --------------------------------------------------------------------------
# basis


def _source_data(domain: Domain):
    pos = domain.boundary_positions
    nrm = domain.boundary_normals
    w = np.ones(len(pos))
    d = np.zeros(len(pos))
    for i, node in enumerate(domain.boundary):
        if node.bc.kind is BCKind.NEUMANN:
            w[i], d[i] = 0.0, 1.0
        elif node.bc.kind is BCKind.ROBIN:
            w[i], d[i] = node.bc.robin_a, 1.0
    return pos, nrm, w, d


def basis_columns(lam, points, src_pos, src_nrm, src_w, src_d, gradient=False):
    """Values (and optionally gradients) of the basis columns at ``points``.

    Returns ``V`` of shape (m, L) and, with ``gradient=True``, ``G`` of
    shape (m, L, n) as well.
    """
    X = np.asarray(points, dtype=float)
    n = src_pos.shape[1]
    X = X.reshape(-1, n)
    spec = KernelSpec(n, float(lam))
    diff = X[:, None, :] - src_pos[None, :, :]
    r = pairwise_distances(X, src_pos)
    phi, d1, d1r, d2 = general_solution_derivatives(spec, r.ravel())
    phi, d1, d1r, d2 = (a.reshape(r.shape) for a in (phi, d1, d1r, d2))
    # unit direction from source to field point; at coincidence use the
    # inward normal (the limit from inside the domain)
    with np.errstate(invalid="ignore", divide="ignore"):
        e = diff / r[..., None]
    zero = r == 0
    if np.any(zero):
        e[zero] = -np.broadcast_to(src_nrm[None, :, :], diff.shape)[zero]
    en = np.einsum("msk,sk->ms", e, src_nrm)
    if n == 1:
        dn = d1 * en  # n_s . grad phi
    else:
        dn = d1r * np.einsum("msk,sk->ms", diff, src_nrm)
    V = src_w[None, :] * phi - src_d[None, :] * dn
    if not gradient:
        return V
    if n == 1:
        grad_phi = d1[..., None] * e
        hess_n = (d2 * en)[..., None] * e
    else:
        grad_phi = d1r[..., None] * diff
        hess_n = (d2 * en)[..., None] * e + d1r[..., None] * (
            src_nrm[None, :, :] - en[..., None] * e
        )
    G = src_w[None, :, None] * grad_phi - src_d[None, :, None] * hess_n
    return V, G


def _apply_bc(V, G, normals, kinds, robin):
    """Push basis columns through each collocation node's boundary operator."""
    dn = np.einsum("msk,mk->ms", G, normals)
    out = np.empty_like(V)
    for i, kind in enumerate(kinds):
        if kind is BCKind.DIRICHLET:
            out[i] = V[i]
        elif kind is BCKind.NEUMANN:
            out[i] = dn[i]
        else:
            out[i] = dn[i] + robin[i] * V[i]
    return out


def _bc_rows(lam, nodes, src):
    pos = np.array([b.position for b in nodes])
    nrm = np.array([b.normal for b in nodes])
    kinds = [b.bc.kind for b in nodes]
    robin = np.array([b.bc.robin_a if b.bc.kind is BCKind.ROBIN else 0.0 for b in nodes])
    if all(k is BCKind.DIRICHLET for k in kinds):
        return basis_columns(lam, pos, *src)
    V, G = basis_columns(lam, pos, *src, gradient=True)
    return _apply_bc(V, G, nrm, kinds, robin)


def assemble_bkm_matrix(domain: Domain, lam: float) -> np.ndarray:
    """Square collocation matrix H(lam) of the boundary knot expansion.

    Row i applies node i's boundary operator (value, normal derivative, or
    normal derivative plus ``a`` times value) to every column.
    """
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"wavenumber must be positive, got {lam}")
    if len(domain.boundary) < 2:
        raise DomainError("the boundary knot matrix needs at least two boundary nodes")
    return _bc_rows(lam, domain.boundary, _source_data(domain))


# --------------------------------------------------------------------------
# scheme 1: singularity scan


class _ScanProblem:
    def __init__(self, domain, objective):
        if objective not in ("subspace", "raw"):
            raise DomainError(f"unknown scan objective {objective!r}")
        self.domain = domain
        self.objective = objective
        self.src = _source_data(domain)
        self.interior = domain.interior
        if objective == "subspace" and len(self.interior) == 0:
            raise DomainError("the subspace objective needs interior nodes")
        self.L = len(domain.boundary)

    def decompose(self, lam):
        H = _bc_rows(lam, self.domain.boundary, self.src)
        if self.objective == "raw":
            U, s, Vt = np.linalg.svd(H)
            return s / s[0], None
        A = np.vstack([H, basis_columns(lam, self.interior, *self.src)])
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        rank = int((s > _SVD_RCOND * s[0]).sum())
        QB = U[: self.L, :rank]
        sq = np.linalg.svd(QB, compute_uv=False)
        return sq, (U, s, Vt, rank)

    def sigma(self, lam):
        return float(self.decompose(lam)[0][-1])

    def null_vectors(self, lam, threshold):
        """BKM coefficient vectors spanning the (near) null space at lam."""
        H = _bc_rows(lam, self.domain.boundary, self.src)
        if self.objective == "raw":
            _, s, Vt = np.linalg.svd(H)
            s = s / s[0]
            k = max(1, int((s <= threshold).sum()))
            return Vt[-k:][::-1].T, s[-k:][::-1]
        A = np.vstack([H, basis_columns(lam, self.interior, *self.src)])
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        rank = int((s > _SVD_RCOND * s[0]).sum())
        _, sq, yt = np.linalg.svd(U[: self.L, :rank])
        k = max(1, int((sq <= threshold).sum()))
        Y = yt[-k:][::-1].T  # columns ordered by increasing singular value
        beta = Vt[:rank].T @ (Y / s[:rank, None])
        return beta, sq[-k:][::-1]


def scan_objective(domain: Domain, lams, objective: str = "subspace") -> np.ndarray:
    """Smallest singular value used by :func:`eigen_scan` at each wavenumber.

    ``"raw"`` is sigma_min(H) / sigma_max(H).  ``"subspace"`` (the default) is
    the smallest singular value of the boundary block of an orthonormal basis
    for the span of the basis columns sampled on boundary and interior nodes:
    it vanishes exactly where some nonzero field has zero boundary data, and
    unlike the raw value it is not swamped by the rapid singular-value decay
    of smooth-kernel matrices.
    """
    prob = _ScanProblem(domain, objective)
    return np.array([prob.sigma(float(l)) for l in np.atleast_1d(lams)])


def _map(fn, items):
    threads = thread_count()
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def eigen_scan(
    domain: Domain,
    lam_range=(0.1, 10.0),
    samples: Optional[int] = None,
    refine_tol: float = 1e-10,
    *,
    accept_rtol: float = 1e-6,
    bc_tol: float = 1e-4,
    merge_rtol: float = 1e-4,
    objective: str = "subspace",
    quadrature: Optional[QuadratureRule] = None,
    include_constant: bool = True,
) -> Spectrum:
    """Eigenwavenumbers in ``lam_range`` from minima of the scan objective.

    The objective is sampled on a uniform grid (default about 50 samples per
    unit of wavenumber), every interior local minimum is refined by
    golden-section search to ``refine_tol`` and accepted when the refined
    value is at most ``accept_rtol`` times the largest singular value of the
    same block.  For each accepted wavenumber one pair per singular value
    below the threshold is returned, orthonormalised in L2(domain), and
    pairs whose boundary residual on the dense check set exceeds
    ``bc_tol * max|v|`` are dropped.
    """
    lo, hi = (float(v) for v in lam_range)
    if not (0 < lo < hi):
        raise DomainError(f"need 0 < lam_min < lam_max, got {lam_range}")
    if samples is None:
        samples = max(64, int(np.ceil(50 * (hi - lo))))
    samples = int(samples)
    if samples < 16:
        raise DomainError("eigen_scan needs at least 16 samples")
    prob = _ScanProblem(domain, objective)
    grid = np.linspace(lo, hi, samples)
    sig = np.array(_map(prob.sigma, list(grid)))

    slopes = np.abs(np.diff(sig)) / (grid[1] - grid[0])
    lipschitz = float(np.max(slopes)) if len(slopes) else 0.0
    typical = float(np.median(slopes)) if len(slopes) else 0.0
    undersampled = bool(lipschitz > 50 * max(typical, 1e-300))

    minima = [i for i in range(1, samples - 1) if sig[i] <= sig[i - 1] and sig[i] < sig[i + 1]]
    refined = []
    for i in minima:
        res = optimize.minimize_scalar(
            prob.sigma,
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            tol=refine_tol,
        )
        lam = float(res.x)
        if not (grid[i - 1] <= lam <= grid[i + 1]):
            lam = float(grid[i])
        sq, _ = prob.decompose(lam)
        if sq[-1] <= accept_rtol * sq[0]:
            refined.append((lam, float(sq[-1]), float(sq[0])))

    merged = []
    for item in sorted(refined):
        if merged and abs(item[0] - merged[-1][0]) <= merge_rtol * item[0]:
            if item[1] < merged[-1][1]:
                merged[-1] = item
            continue
        merged.append(item)

    quad = quadrature if quadrature is not None else default_quadrature(domain)
    pairs, rejected = [], 0
    for lam, smin, smax in merged:
        betas, svals = prob.null_vectors(lam, accept_rtol * smax)
        new = _finalise(domain, lam, betas, quad, bc_tol, svals)
        rejected += betas.shape[1] - len(new)
        pairs.extend(new)
    if include_constant and domain.has_constant_mode:
        pairs.insert(0, _constant_pair(domain, quad))

    diagnostics = {
        "grid": grid,
        "sigma": sig,
        "lipschitz": lipschitz,
        "undersampled": undersampled,
        "minima": len(minima),
        "rejected_bc": rejected,
        "objective": objective,
    }
    if undersampled:
        warnings.warn("scan objective varies sharply between samples; consider more samples", RuntimeWarning, stacklevel=2)
    return Spectrum(tuple(pairs), "det_scan", (lo, hi), None, diagnostics)


def _constant_pair(domain, quad):
    pos, nrm, w, d = _source_data(domain)
    value = 1.0 / np.sqrt(quad.measure)
    return Eigenpair(0.0, np.zeros(0), pos, nrm, w, d, 0.0, 1.0, value)


def _finalise(domain, lam, betas, quad, bc_tol, svals=None):
    """Orthonormalise coefficient vectors in L2(domain) and build pairs."""
    pos, nrm, w, d = _source_data(domain)
    Vq = basis_columns(lam, quad.nodes, pos, nrm, w, d)
    fields = Vq @ betas
    gram = fields.T @ (quad.weights[:, None] * fields)
    evals, evecs = np.linalg.eigh(gram)
    keep = evals > 1e-12 * evals.max()
    if not keep.any():
        raise ConditioningError(f"eigenfunction at lam={lam:.6g} has zero norm on the quadrature")
    T = evecs[:, keep] / np.sqrt(evals[keep])
    betas = betas @ T
    fields = fields @ T
    check = domain.check_nodes
    bc_vals = _bc_rows(lam, check, (pos, nrm, w, d)) @ betas
    probe = np.vstack([quad.nodes, domain.interior]) if len(domain.interior) else quad.nodes
    probe_vals = basis_columns(lam, probe, pos, nrm, w, d) @ betas
    out = []
    mult = betas.shape[1]
    for k in range(mult):
        col = probe_vals[:, k]
        sign = 1.0 if col[np.argmax(np.abs(col))] >= 0 else -1.0
        beta = sign * betas[:, k]
        vmax = float(np.abs(col).max())
        res = float(np.abs(bc_vals[:, k]).max())
        if bc_tol is not None and res > bc_tol * vmax:
            continue
        norm = float(np.sqrt(quad.integrate(fields[:, k] ** 2)))
        sigma = float(svals[min(k, len(svals) - 1)]) if svals is not None else 0.0
        out.append(Eigenpair(float(lam), beta, pos, nrm, w, d, res, norm, 0.0, mult, sigma))
    return out


# --------------------------------------------------------------------------
# scheme 2: shifted algebraic eigenproblem


def _particular_basis(X, centres, delta, gradient=False):
    """Particular solutions for the quintic radial function augmented by
    a linear polynomial: (lap + delta**2) applied to columns gives the
    interpolation functions used in :func:`eigen_algebraic`."""
    r = pairwise_distances(X, centres)
    P = np.c_[np.ones(len(X)), X]
    vals = np.c_[r**5, P / delta**2]
    if not gradient:
        return vals
    n = X.shape[1]
    diff = X[:, None, :] - centres[None, :, :]
    g_rbf = 5.0 * (r**3)[..., None] * diff
    g_poly = np.zeros((len(X), n + 1, n))
    for k in range(n):
        g_poly[:, k + 1, k] = 1.0 / delta**2
    return vals, np.concatenate([g_rbf, g_poly], axis=1)


def eigen_algebraic(
    domain: Domain,
    delta: float = 0.1,
    n_interior: Optional[int] = None,
    *,
    imag_rtol: float = 1e-3,
    pinv_rcond: float = 1e-13,
    bc_tol: Optional[float] = None,
    quadrature: Optional[QuadratureRule] = None,
    include_constant: bool = True,
    max_pairs: Optional[int] = 12,
) -> Spectrum:
    """Eigenwavenumbers from a standard eigenproblem around the shift delta.

    Writing -lap v = lam**2 v as (lap + delta**2) v = mu v with
    mu = delta**2 - lam**2, the right side is interpolated at the nodes with
    the quintic radial function plus a linear polynomial, whose particular
    solutions of the shifted operator are known in closed form.  The
    homogeneous remainder is a boundary knot expansion at wavenumber delta
    whose coefficients remove the boundary data of the particular part.  The
    resulting nodal map K satisfies v = mu K v, so the eigenvalues nu of K on
    the non-Dirichlet nodes give lam = sqrt(delta**2 - 1/nu).

    Only real positive lam**2 are kept (imaginary part at most ``imag_rtol``
    relative); the number discarded is reported in the diagnostics.  Only
    the lowest ``max_pairs`` are turned into evaluable pairs (None keeps
    all); the higher algebraic eigenvalues are poorly resolved anyway.
    """
    delta = float(delta)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    interior = domain.interior
    if n_interior is not None:
        if n_interior < 1:
            raise DomainError("n_interior must be >= 1")
        if n_interior < len(interior):
            idx = np.linspace(0, len(interior) - 1, int(n_interior)).round().astype(int)
            interior = interior[np.unique(idx)]
    if len(interior) < 1:
        raise DomainError("the algebraic scheme needs at least one interior node")

    nodes = domain.boundary
    Bpos = domain.boundary_positions
    Bnrm = domain.boundary_normals
    Nb = len(nodes)
    X = np.vstack([Bpos, interior])
    N = len(X)
    n = domain.dimension
    r = pairwise_distances(X, X)
    Psi = 5.0 * (n + 3) * r**3 + delta**2 * r**5
    P = np.c_[np.ones(N), X]
    m = P.shape[1]
    aug = np.block([[Psi, P], [P.T, np.zeros((m, m))]])
    Ainv = np.linalg.inv(aug)[:, :N]

    vals, grads = _particular_basis(X[:Nb], X, delta, gradient=True)
    dn = np.einsum("ijk,ik->ij", grads, Bnrm)
    Lp = np.empty((Nb, N + m))
    for i, node in enumerate(nodes):
        if node.bc.kind is BCKind.DIRICHLET:
            Lp[i] = vals[i]
        elif node.bc.kind is BCKind.NEUMANN:
            Lp[i] = dn[i]
        else:
            Lp[i] = dn[i] + node.bc.robin_a * vals[i]
    Mp = _particular_basis(X, X, delta) @ Ainv
    Lp = Lp @ Ainv

    src = _source_data(domain)
    G = basis_columns(delta, X, *src)
    H = _bc_rows(delta, nodes, src)
    K = Mp - G @ (np.linalg.pinv(H, rcond=pinv_rcond) @ Lp)

    free = np.r_[[i for i, nd in enumerate(nodes) if nd.bc.kind is not BCKind.DIRICHLET], np.arange(Nb, N)].astype(int)
    nu, vecs = np.linalg.eig(K[np.ix_(free, free)])
    nonzero = np.abs(nu) > 1e-12 * max(np.abs(nu).max(), 1e-300)
    lam2 = np.full(nu.shape, np.nan, dtype=complex)
    lam2[nonzero] = delta**2 - 1.0 / nu[nonzero]
    good = nonzero & (lam2.real > 0) & (np.abs(lam2.imag) <= imag_rtol * np.abs(lam2))
    discarded = int((~good).sum())

    order = np.argsort(lam2.real[good])
    idx = np.flatnonzero(good)[order]
    if max_pairs is not None:
        idx = idx[: int(max_pairs)]
    quad = quadrature if quadrature is not None else default_quadrature(domain)
    pairs = []
    for j in idx:
        lam = float(np.sqrt(lam2[j].real))
        vec = vecs[:, j]
        vec = vec.real if nu[j].imag >= 0 else vec.imag
        nodal = np.zeros(N)
        nodal[free] = vec
        Vx = basis_columns(lam, X, *src)
        beta, *_ = np.linalg.lstsq(Vx, nodal, rcond=1e-12)
        pairs.extend(_finalise(domain, lam, beta[:, None], quad, bc_tol))
    if include_constant and domain.has_constant_mode:
        pairs.insert(0, _constant_pair(domain, quad))
    diagnostics = {"discarded_complex": discarded, "n_nodes": N, "n_interior": len(interior)}
    lams = [p.wavenumber for p in pairs]
    rng = (min(lams), max(lams)) if lams else (0.0, 0.0)
    return Spectrum(tuple(pairs), "algebraic_shift", rng, delta, diagnostics)


# --------------------------------------------------------------------------
# evaluation and export


def eigenfunction_eval(pair: Eigenpair, points, gradient: bool = False):
    """Evaluate v (and optionally grad v) at ``points``."""
    X = np.asarray(points, dtype=float).reshape(-1, pair.dimension)
    if pair.is_constant:
        vals = np.full(len(X), pair.constant)
        return (vals, np.zeros_like(X)) if gradient else vals
    args = (pair.source_points, pair.source_normals, pair.source_weights, pair.source_derivs)
    if not gradient:
        return basis_columns(pair.wavenumber, X, *args) @ pair.beta
    V, G = basis_columns(pair.wavenumber, X, *args, gradient=True)
    return V @ pair.beta, np.einsum("msk,s->mk", G, pair.beta)


def spectrum_to_records(spectrum: Spectrum) -> list:
    recs = []
    for p in spectrum.pairs:
        recs.append(
            {
                "lambda": p.wavenumber,
                "bc_residual": p.bc_residual,
                "scheme": spectrum.scheme,
                "beta": [float(b) for b in p.beta],
                "constant": p.constant,
                "multiplicity": p.multiplicity,
                "sources": p.source_points.tolist(),
                "normals": p.source_normals.tolist(),
                "weights": p.source_weights.tolist(),
                "derivs": p.source_derivs.tolist(),
            }
        )
    return recs


def save_spectrum(spectrum: Spectrum, path) -> None:
    doc = {
        "scheme": spectrum.scheme,
        "scan_range": list(spectrum.scan_range),
        "delta": spectrum.delta,
        "pairs": spectrum_to_records(spectrum),
    }
    atomic_write_text(path, json.dumps(doc, indent=2))


def load_spectrum(path) -> Spectrum:
    with open(path) as fh:
        doc = json.load(fh)
    pairs = []
    for rec in doc["pairs"]:
        pairs.append(
            Eigenpair(
                float(rec["lambda"]),
                np.asarray(rec["beta"], dtype=float),
                np.asarray(rec["sources"], dtype=float),
                np.asarray(rec["normals"], dtype=float),
                np.asarray(rec["weights"], dtype=float),
                np.asarray(rec["derivs"], dtype=float),
                float(rec["bc_residual"]),
                1.0,
                float(rec.get("constant", 0.0)),
                int(rec.get("multiplicity", 1)),
            )
        )
    return Spectrum(tuple(pairs), doc["scheme"], tuple(doc["scan_range"]), doc.get("delta"))
