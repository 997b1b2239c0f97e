"""Bessel functions of integer and half-integer order and the radial kernels
built from them.

The kernels follow two conventions used throughout the package:

* ``general_solution`` is the nonsingular (Bessel-J) solution of the
  n-dimensional Helmholtz equation, used as the wavelet atom and as the
  boundary-knot basis.  Its constant branch (wavenumber 0) is fixed to 1; see
  :data:`CONSTANT_BRANCH`.
* ``modified_kernel`` is the fundamental solution of the modified Helmholtz
  operator ``-lap + lam**2``; it is singular at the origin.

Numerical values of J, Y and K come from :mod:`scipy.special` (AMOS/Cephes);
this module adds the order/domain contracts, the r -> 0 limits and the zero
finder.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .exceptions import DomainError, SingularityError, UnsupportedOrderError

__all__ = [
    "CONSTANT_BRANCH",
    "BesselOverflowWarning",
    "KernelKind",
    "KernelSpec",
    "bessel_j",
    "bessel_y",
    "bessel_k",
    "bessel_j_zero",
    "profile_zero",
    "general_solution",
    "general_solution_derivatives",
    "modified_kernel",
    "scaled_bessel_j",
]

#: Value of the wavenumber-zero atom.  The coefficient formulas in
#: :mod:`helmwave.wavelet_series` assume this constant.
CONSTANT_BRANCH = 1.0

_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 14


class BesselOverflowWarning(RuntimeWarning):
    """Y_nu evaluated so close to the origin that the result overflowed."""


class KernelKind(str, enum.Enum):
    GENERAL_SOLUTION = "general_solution"
    MODIFIED_HELMHOLTZ = "modified_helmholtz"


@dataclass(frozen=True)
class KernelSpec:
    """Dimension, wavenumber and kind of a radial Helmholtz kernel."""

    dimension: int
    wavenumber: float
    kind: KernelKind = KernelKind.GENERAL_SOLUTION

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        lam = float(self.wavenumber)
        if not np.isfinite(lam) or lam < 0:
            raise DomainError(f"wavenumber must be finite and >= 0, got {self.wavenumber}")
        if self.kind is KernelKind.MODIFIED_HELMHOLTZ and lam == 0:
            raise DomainError("modified Helmholtz kernel needs a positive wavenumber")
        object.__setattr__(self, "wavenumber", lam)

    @property
    def order(self) -> float:
        """Bessel order n/2 - 1 carried by the kernel."""
        return self.dimension / 2.0 - 1.0

    def with_wavenumber(self, lam) -> "KernelSpec":
        return KernelSpec(self.dimension, lam, self.kind)


def _check_order(nu) -> float:
    nu = float(nu)
    twice = 2.0 * nu
    if nu < 0 or not np.isfinite(nu) or twice != round(twice):
        raise UnsupportedOrderError(
            f"order must be a nonnegative integer or half-integer, got {nu}"
        )
    return nu


def _wrap(result, scalar):
    return float(result) if scalar else result


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for x >= 0."""
    nu = _check_order(nu)
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("bessel_j requires x >= 0")
    return _wrap(special.jv(nu, arr), arr.ndim == 0)


def bessel_y(nu, x):
    """Bessel function of the second kind Y_nu(x) for x > 0.

    Arguments so small that Y overflows return ``-inf`` together with a
    :class:`BesselOverflowWarning`.
    """
    nu = _check_order(nu)
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_y requires x > 0; Y is singular at the origin")
    out = np.asarray(special.yv(nu, arr), dtype=float)
    bad = ~np.isfinite(out) | (np.abs(out) > 1e300)
    if np.any(bad):
        warnings.warn(
            f"Y_{nu} overflowed near the origin at {int(bad.sum())} point(s)",
            BesselOverflowWarning,
            stacklevel=2,
        )
        out = np.where(bad, -np.inf, out)
    return _wrap(out, arr.ndim == 0)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x) for x > 0."""
    nu = _check_order(abs(float(nu)))
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k requires x > 0")
    return _wrap(special.kv(nu, arr), arr.ndim == 0)


_ZEROS: dict = {}


def _extend_zeros(nu: float, k: int) -> list:
    zeros = _ZEROS.setdefault(nu, [])
    # Zeros of J_nu are spaced by more than 2.5 for nu >= 0, so a unit step
    # never skips a sign change.
    step = 1.0
    a = zeros[-1] + 1e-9 if zeros else max(nu, 1e-6)
    fa = special.jv(nu, a)
    while len(zeros) < k:
        b = a + step
        fb = special.jv(nu, b)
        if fa == 0.0:
            zeros.append(a)
            a, fa = a + 1e-9, special.jv(nu, a + 1e-9)
            continue
        if fa * fb < 0:
            root = optimize.brentq(lambda t: special.jv(nu, t), a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
            zeros.append(root)
        a, fa = b, fb
    return zeros


def bessel_j_zero(nu, k: int) -> float:
    """k-th positive zero of J_nu (k >= 1)."""
    nu = _check_order(nu)
    if int(k) != k or k < 1:
        raise DomainError(f"zero index must be an integer >= 1, got {k}")
    return float(_extend_zeros(nu, int(k))[int(k) - 1])


def profile_zero(dimension: int, k: int) -> float:
    """k-th positive zero of the radial profile of the general solution.

    ``sin`` for n = 1 and J_{n/2-1} otherwise.
    """
    if dimension == 1:
        return k * math.pi
    return bessel_j_zero(dimension / 2.0 - 1.0, k)


def _scaled_j(nu: float, z: np.ndarray) -> np.ndarray:
    """z**(-nu) * J_nu(z), finite at z = 0."""
    out = np.empty_like(z)
    small = z < _SERIES_CUTOFF
    zs = z[small]
    if zs.size:
        q = -(zs * zs) / 4.0
        term = np.full_like(zs, 1.0 / (2.0**nu * math.gamma(nu + 1.0)))
        total = term.copy()
        for m in range(1, _SERIES_TERMS):
            term = term * q / (m * (m + nu))
            total += term
        out[small] = total
    zb = z[~small]
    if zb.size:
        out[~small] = special.jv(nu, zb) * zb ** (-nu)
    return out


def scaled_bessel_j(nu, z):
    """z**(-nu) * J_nu(z) for z >= 0, including the finite value at z = 0."""
    nu = _check_order(nu)
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("scaled_bessel_j requires z >= 0")
    out = _scaled_j(nu, np.atleast_1d(arr).ravel()).reshape(arr.shape)
    return _wrap(out, arr.ndim == 0)


def _as_radius(r):
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("radius must be >= 0")
    return arr


def general_solution(spec: KernelSpec, r):
    """Nonsingular general solution phi_n(lam r) of the Helmholtz equation.

    n = 1:  sin(lam r) / (2 lam)
    n >= 2: (1/4) (lam / (2 pi r))**(n/2-1) J_{n/2-1}(lam r)
    lam = 0 gives the constant branch.
    """
    if spec.kind is not KernelKind.GENERAL_SOLUTION:
        raise DomainError("general_solution needs a GeneralSolution kernel spec")
    arr = _as_radius(r)
    return _wrap(_phi(spec.dimension, spec.wavenumber, arr)[0], arr.ndim == 0)


def general_solution_derivatives(spec: KernelSpec, r):
    """Return ``(phi, dphi/dr, (dphi/dr)/r, d2phi/dr2)`` of the general solution.

    For n >= 2 every entry is continuous at r = 0.  For n = 1 the profile has
    a kink at the centre; the one-sided limit r -> 0+ is returned there and
    ``(dphi/dr)/r`` is reported as 0, because the one-dimensional Hessian
    never uses it.
    """
    arr = _as_radius(r)
    return _phi(spec.dimension, spec.wavenumber, np.atleast_1d(arr), derivatives=True)


def _phi(n, lam, r, derivatives=False):
    r = np.asarray(r, dtype=float)
    if lam == 0.0:
        one = np.full_like(r, CONSTANT_BRANCH)
        zero = np.zeros_like(r)
        return (one, zero, zero, zero) if derivatives else (one,)
    if n == 1:
        val = np.sin(lam * r) / (2.0 * lam)
        if not derivatives:
            return (val,)
        d1 = np.cos(lam * r) / 2.0
        d2 = -lam * np.sin(lam * r) / 2.0
        return val, d1, np.zeros_like(r), d2
    nu = n / 2.0 - 1.0
    const = 0.25 * (lam * lam / (2.0 * math.pi)) ** nu
    z = lam * r
    val = const * _scaled_j(nu, z)
    if not derivatives:
        return (val,)
    d1_over_r = -const * lam * lam * _scaled_j(nu + 1.0, z)
    d1 = d1_over_r * r
    d2 = -lam * lam * val - (n - 1) * d1_over_r
    return val, d1, d1_over_r, d2


def modified_kernel(spec: KernelSpec, r):
    """Fundamental solution g_n(lam r) of the modified Helmholtz operator.

    g_n = (1 / (2 pi)) (lam / (2 pi r))**(n/2-1) K_{n/2-1}(lam r); for n = 1
    this is exp(-lam r) / (2 lam).  Singular at r = 0.
    """
    if spec.kind is not KernelKind.MODIFIED_HELMHOLTZ:
        raise DomainError("modified_kernel needs a ModifiedHelmholtz kernel spec")
    arr = np.asarray(r, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("radius must be >= 0")
    if np.any(arr == 0):
        raise SingularityError("the modified Helmholtz fundamental solution is singular at r = 0")
    return _wrap(_g(spec.dimension, spec.wavenumber, arr), arr.ndim == 0)


def _g(n, lam, r):
    if n == 1:
        return np.exp(-lam * r) / (2.0 * lam)
    if n == 3:
        return np.exp(-lam * r) / (4.0 * math.pi * r)
    nu = n / 2.0 - 1.0
    z = lam * r
    with np.errstate(over="ignore", under="ignore"):
        return (lam / (2.0 * math.pi * r)) ** nu * special.kv(abs(nu), z) / (2.0 * math.pi)
