import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmwave import special_fn as sf
from helmwave.exceptions import DomainError, SingularityError, UnsupportedOrderError
from helmwave.special_fn import KernelKind, KernelSpec

MH = KernelKind.MODIFIED_HELMHOLTZ


def test_bessel_j_examples():
    assert sf.bessel_j(0, 0.0) == 1.0
    assert sf.bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, abs=1e-12)
    assert abs(sf.bessel_j(0, 2.404826)) < 1e-6


def test_bessel_y_examples():
    assert sf.bessel_y(0.5, math.pi) == pytest.approx(math.sqrt(2) / math.pi, abs=1e-12)
    assert abs(sf.bessel_y(0.5, math.pi / 2)) < 1e-10


def test_bessel_y_overflow_near_origin():
    with pytest.warns(sf.BesselOverflowWarning):
        assert sf.bessel_y(2, 1e-320) == -math.inf


def test_bessel_k_examples():
    assert sf.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), abs=1e-12)
    # K_0(1) from the integral representation int_0^inf exp(-cosh t) dt
    oracle = float(mpmath.quad(lambda t: mpmath.exp(-mpmath.cosh(t)), [0, 2, 5, 10]))
    assert oracle == pytest.approx(0.421024, abs=1e-6)
    assert sf.bessel_k(0, 1.0) == pytest.approx(oracle, rel=1e-12)
    vals = sf.bessel_k(0.5, np.array([1.0, 10.0, 100.0, 700.0]))
    assert np.all(np.diff(vals) < 0) and vals[-1] < 1e-300


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2, 3.5, 5])
def test_bessel_against_mpmath(nu):
    x = np.array([1e-3, 0.3, 1.0, 4.7, 11.9, 12.1, 30.0, 49.5])
    j = sf.bessel_j(nu, x)
    y = sf.bessel_y(nu, x)
    k = sf.bessel_k(nu, x)
    for i, xi in enumerate(x):
        assert j[i] == pytest.approx(float(mpmath.besselj(nu, xi)), rel=1e-10, abs=1e-14)
        assert y[i] == pytest.approx(float(mpmath.bessely(nu, xi)), rel=1e-10)
        assert k[i] == pytest.approx(float(mpmath.besselk(nu, xi)), rel=1e-10)


def test_half_integer_closed_forms():
    x = np.linspace(1e-3, 50, 2000)
    s = np.sqrt(2 / (math.pi * x))
    assert np.abs(sf.bessel_j(0.5, x) - s * np.sin(x)).max() < 1e-12
    assert np.abs(sf.bessel_j(1.5, x) - s * (np.sin(x) / x - np.cos(x))).max() < 1e-12
    assert np.abs(sf.bessel_y(0.5, x) + s * np.cos(x)).max() < 1e-12


def test_bessel_errors():
    with pytest.raises(DomainError):
        sf.bessel_j(0, -1.0)
    with pytest.raises(UnsupportedOrderError):
        sf.bessel_j(1 / 3, 1.0)
    with pytest.raises(DomainError):
        sf.bessel_y(0, 0.0)
    with pytest.raises(DomainError):
        sf.bessel_k(0, -2.0)
    with pytest.raises(DomainError):
        sf.bessel_j_zero(0, 0)


def test_zeros():
    assert sf.bessel_j_zero(0, 1) == pytest.approx(2.404826, abs=1e-6)
    assert sf.bessel_j_zero(1, 1) == pytest.approx(3.831706, abs=1e-6)
    for k in range(1, 6):
        assert sf.bessel_j_zero(0.5, k) == pytest.approx(k * math.pi, abs=1e-12)
        assert sf.bessel_j_zero(0, k) == pytest.approx(float(mpmath.besseljzero(0, k)), abs=1e-12)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 1.5, 2])
def test_zero_brackets(nu):
    for k in range(1, 8):
        z = sf.bessel_j_zero(nu, k)
        assert (k - 1) * math.pi + nu * math.pi / 2 < z < k * math.pi + nu * math.pi / 2 + math.pi


def test_general_solution_examples():
    assert sf.general_solution(KernelSpec(1, math.pi), 0.5) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    assert sf.general_solution(KernelSpec(2, 3.7), 0.0) == pytest.approx(0.25, abs=1e-15)
    assert sf.general_solution(KernelSpec(3, 2.0), 1.0) == pytest.approx(math.sin(2) / (4 * math.pi), abs=1e-15)
    assert sf.general_solution(KernelSpec(2, 0.0), 3.0) == sf.CONSTANT_BRANCH


@pytest.mark.parametrize("lam", [0.5, 1, 2, 5])
def test_sinc_identity(lam):
    r = np.linspace(1e-6, 10, 4001)
    got = sf.general_solution(KernelSpec(3, lam), r)
    assert np.abs(got - np.sin(lam * r) / (4 * math.pi * r)).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_origin_limit(n):
    # limit of (1/4)(lam/(2 pi r))**nu J_nu(lam r) at r = 0
    lam = 1.7
    nu = n / 2 - 1
    expected = 0.25 * (lam**2 / (2 * math.pi)) ** nu / (2**nu * math.gamma(nu + 1))
    assert sf.general_solution(KernelSpec(n, lam), 0.0) == pytest.approx(expected, rel=1e-14)
    assert sf.general_solution(KernelSpec(n, lam), 1e-9) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(1, 5),
    lam=st.floats(0.2, 8.0),
    r=st.floats(0.2, 5.0),
)
def test_radial_helmholtz_ode(n, lam, r):
    spec = KernelSpec(n, lam)
    h = 1e-4
    f = [sf.general_solution(spec, r + k * h) for k in (-1, 0, 1)]
    d1 = (f[2] - f[0]) / (2 * h)
    d2 = (f[2] - 2 * f[1] + f[0]) / h**2
    scale = max(abs(sf.general_solution(spec, 0.0)), abs(f[1]), 1e-3) * max(lam**2, 1.0)
    assert abs(d2 + (n - 1) / r * d1 + lam**2 * f[1]) <= 1e-5 * scale


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 5), lam=st.floats(0.2, 4.0), r=st.floats(0.3, 4.0))
def test_modified_helmholtz_ode(n, lam, r):
    spec = KernelSpec(n, lam, MH)
    h = 1e-4
    f = [sf.modified_kernel(spec, r + k * h) for k in (-1, 0, 1)]
    d1 = (f[2] - f[0]) / (2 * h)
    d2 = (f[2] - 2 * f[1] + f[0]) / h**2
    assert abs(d2 + (n - 1) / r * d1 - lam**2 * f[1]) <= 1e-5 * max(abs(f[1]), 1e-12) * max(lam**2, 1.0) * 10


def test_derivatives_match_finite_differences():
    for n in (1, 2, 3, 4):
        spec = KernelSpec(n, 2.3)
        r = np.array([0.4, 1.1, 2.5])
        v, d1, d1r, d2 = sf.general_solution_derivatives(spec, r)
        h = 1e-5
        fd1 = (sf.general_solution(spec, r + h) - sf.general_solution(spec, r - h)) / (2 * h)
        assert np.allclose(d1, fd1, atol=1e-8)
        if n > 1:
            assert np.allclose(d1r, d1 / r, atol=1e-12)
        fd2 = (sf.general_solution(spec, r + h) - 2 * v + sf.general_solution(spec, r - h)) / h**2
        assert np.allclose(d2, fd2, atol=1e-5)


def test_modified_kernel_examples():
    assert sf.modified_kernel(KernelSpec(3, 1.0, MH), 1.0) == pytest.approx(math.exp(-1) / (4 * math.pi), abs=1e-15)
    assert sf.modified_kernel(KernelSpec(3, 2.0, MH), 0.5) == pytest.approx(math.exp(-1) / (2 * math.pi), abs=1e-15)
    assert sf.modified_kernel(KernelSpec(1, 1.0, MH), 800.0) == 0.0
    assert sf.modified_kernel(KernelSpec(2, 1.0, MH), 1.0) == pytest.approx(float(mpmath.besselk(0, 1)) / (2 * math.pi), rel=1e-13)
    with pytest.raises(SingularityError):
        sf.modified_kernel(KernelSpec(3, 1.0, MH), 0.0)


def test_kernel_spec_validation():
    with pytest.raises(DomainError):
        KernelSpec(0, 1.0)
    with pytest.raises(DomainError):
        KernelSpec(2, -1.0)
    with pytest.raises(DomainError):
        KernelSpec(2, 0.0, MH)
    assert KernelSpec(5, 1.0).order == 1.5


def test_scaled_bessel_continuity():
    for nu in (0, 0.5, 1, 2.5):
        below = sf.scaled_bessel_j(nu, np.nextafter(0.5, 0))
        above = sf.scaled_bessel_j(nu, 0.5)
        assert below == pytest.approx(above, rel=1e-13)
