import math

import numpy as np
import pytest
from scipy import integrate

from helmwave import transform as tr
from helmwave.exceptions import ConfigError, DomainError, UnsupportedFeatureError
from helmwave.geometry import QuadratureRule, domain_quadrature, rectangle_domain
from helmwave.special_fn import KernelKind, KernelSpec

MH = KernelKind.MODIFIED_HELMHOLTZ
LAMS = tr.default_lambda_grid(0.1, 40.0, 128)
XI = tr.default_center_grid(count=256)
X = np.linspace(0.0, 1.0, 101)[:, None]


def bump(center, width):
    return lambda Z: np.exp(-((np.asarray(Z)[:, 0] - center) ** 2) / width**2)


def test_zero_field():
    fld = tr.forward_transform(lambda Z: np.zeros(len(Z)), lambdas=LAMS[:8], centers=XI)
    assert not fld.values.any()
    rec = tr.inverse_transform(fld, X)
    assert not rec.values.any() and rec.truncation_error == 0.0
    assert tr.helmholtz_property_check(tr.TransformField(LAMS[:4], np.linspace(0, 1, 5), np.zeros((4, 5)), fld.kernel, 0.5)) == 0.0


def test_linearity():
    f, g = bump(0.3, 0.2), bump(0.7, 0.1)
    a, b = 1.7, -0.4
    Fa = tr.forward_transform(f, lambdas=LAMS, centers=XI).values
    Fb = tr.forward_transform(g, lambdas=LAMS, centers=XI).values
    Fab = tr.forward_transform(lambda Z: a * f(Z) + b * g(Z), lambdas=LAMS, centers=XI).values
    assert np.abs(Fab - a * Fa - b * Fb).max() <= 1e-12 * np.abs(Fab).max()


def test_sifting():
    eps, x0 = 1e-3, 0.5
    z = np.linspace(x0 - 12 * eps, x0 + 12 * eps, 4801)
    w = np.full(z.size, z[1] - z[0])
    w[[0, -1]] /= 2
    delta = lambda Z: np.exp(-((Z[:, 0] - x0) ** 2) / (2 * eps**2)) / (eps * math.sqrt(2 * math.pi))  # noqa: E731
    lams = np.array([0.5, 2.0, 5.0])
    xi = np.array([0.1, 0.9, 1.3])
    fld = tr.forward_transform(delta, lambdas=lams, centers=xi, quadrature=QuadratureRule(z[:, None], w, 0.0))
    r = np.abs(xi - x0)
    exact = np.exp(-np.outer(lams, r)) / (2 * lams[:, None])
    assert np.abs(fld.values - exact).max() <= 1e-4 * np.abs(exact).max()


def test_positive_and_bounded():
    f = lambda Z: np.abs(np.sin(7 * np.asarray(Z)[:, 0])) * (np.abs(Z[:, 0] - 0.5) < 0.5)  # noqa: E731
    fld = tr.forward_transform(f, lambdas=LAMS, centers=XI)
    assert fld.values.min() >= 0
    # sup |F| <= sup |f| * int |g_1(lam r)| dr = 1 / lam**2
    assert np.all(fld.values.max(axis=1) <= 1.0 / LAMS**2 * (1 + 1e-12))


def test_quadrature_route_matches_laguerre():
    dom = rectangle_domain((0.0, 0.0), (1.0, 1.0))
    q = domain_quadrature(dom, 4096)
    f = lambda Z: np.exp(-8 * np.sum((Z - 0.5) ** 2, axis=1))  # noqa: E731
    fld = tr.forward_transform(f, lambdas=[1.0, 3.0], centers=[[2.0, 0.5], [0.5, -1.0]], quadrature=q)
    assert fld.dimension == 2 and fld.diagnostics["rule"] == "quadrature"
    assert fld.values.min() > 0 and fld.Cg == pytest.approx(0.5, rel=1e-5)
    # same 1D integral by both routes
    z = np.linspace(-2.0, 3.0, 20001)
    w = np.full(z.size, z[1] - z[0])
    w[[0, -1]] /= 2
    g = bump(0.5, 0.25)
    a = tr.forward_transform(g, lambdas=[2.0], centers=[1.5], quadrature=QuadratureRule(z[:, None], w, 0.0)).values
    oracle = integrate.quad(lambda t: g([[t]])[0] * math.exp(-2 * abs(t - 1.5)) / 4, -3, 4, points=[0.5, 1.5], limit=200)[0]
    assert a[0, 0] == pytest.approx(oracle, rel=1e-9)
    # Gauss-Laguerre about the centre: a bump one unit away costs ~1e-3 at 60 nodes
    b60 = tr.forward_transform(g, lambdas=[2.0], centers=[1.5]).values[0, 0]
    b150 = tr.forward_transform(g, lambdas=[2.0], centers=[1.5], laguerre_nodes=150).values[0, 0]
    assert b60 == pytest.approx(oracle, rel=2e-3)
    assert b150 == pytest.approx(oracle, rel=1e-6)


@pytest.mark.parametrize("f", [bump(0.5, 0.25), bump(0.35, 0.2), bump(0.6, 0.3)])
def test_round_trip_bumps(f):
    fld = tr.forward_transform(f, lambdas=LAMS, centers=XI)
    rec = tr.inverse_transform(fld, X)
    ref = f(X)
    assert np.abs(rec.values - ref).max() / np.abs(ref).max() <= 0.05
    assert 0 < rec.truncation_error < 1


def test_shift_covariance():
    s = 0.2
    f = bump(0.4, 0.25)
    g = lambda Z: f(np.asarray(Z) - s)  # noqa: E731
    rf = tr.inverse_transform(tr.forward_transform(f, lambdas=LAMS, centers=XI), X).values
    rg = tr.inverse_transform(tr.forward_transform(g, lambdas=LAMS, centers=XI + s), X + s).values
    assert np.abs(rg - rf).max() / np.abs(rf).max() <= 0.05


def test_printed_formula_is_reported():
    f = bump(0.5, 0.25)
    fld = tr.forward_transform(f, lambdas=LAMS, centers=XI)
    dual = tr.inverse_transform(fld, X, reference=f(X))
    printed = tr.inverse_transform(fld, X, formula="printed", reference=f(X))
    assert printed.formula == "printed" and np.isfinite(printed.renormalization)
    assert dual.renormalization == pytest.approx(1.0, abs=0.05)
    assert printed.reference_error > 10 * dual.reference_error
    with pytest.raises(DomainError):
        tr.inverse_transform(fld, X, formula="other")


def test_helmholtz_check_positive_control():
    h = 0.002
    xi = np.arange(0.0, 1.0 + h / 2, h)
    lams = np.array([0.5, 1.0, 3.0])
    kern = KernelSpec(1, 1.0, MH)
    F = np.cos(np.outer(lams, xi))
    assert tr.helmholtz_property_check(tr.TransformField(lams, xi, F, kern, 0.5)) <= 1e-4
    # a smoothly graded (nonuniform) tensor grid in 2D
    s = np.arange(0.0, 0.4, h)
    ax = s + 0.5 * s**2
    g1, g2 = np.meshgrid(ax, ax[:40], indexing="ij")
    pts = np.c_[g1.ravel(), g2.ravel()]
    F2 = np.cos(lams[:, None] * (0.6 * pts[None, :, 0] + 0.8 * pts[None, :, 1]))
    assert tr.helmholtz_property_check(tr.TransformField(lams, pts, F2, KernelSpec(2, 1.0, MH), 0.5)) <= 1e-4


def test_helmholtz_check_modified_field_not_small():
    fld = tr.forward_transform(bump(0.5, 0.25), lambdas=np.array([1.0, 2.0, 4.0]), centers=np.linspace(-1, 2, 301))
    assert tr.helmholtz_property_check(fld) > 1e-2


def test_helmholtz_check_errors():
    kern = KernelSpec(1, 1.0, MH)
    with pytest.raises(DomainError):
        tr.helmholtz_property_check(tr.TransformField([1.0], [0.0, 1.0], np.ones((1, 2)), kern, 0.5))
    pts = np.array([[0, 0], [1, 0], [2, 0], [0, 1], [1, 1]], dtype=float)
    with pytest.raises(DomainError):
        tr.helmholtz_property_check(tr.TransformField([1.0], pts, np.ones((1, 5)), KernelSpec(2, 1.0, MH), 0.5))


def test_field_validation_and_unsupported():
    kern = KernelSpec(1, 1.0, MH)
    with pytest.raises(DomainError):
        tr.TransformField([2.0, 1.0], [0.0], np.zeros((2, 1)), kern, 0.5)
    with pytest.raises(DomainError):
        tr.TransformField([1.0], [0.0], np.zeros((1, 1)), kern, math.inf)
    with pytest.raises(UnsupportedFeatureError):
        tr.forward_transform(bump(0.5, 0.2), kernel=KernelSpec(1, 1.0), lambdas=[1.0], centers=[0.0])
    q = domain_quadrature(rectangle_domain((0, 0), (1, 1)), 100)
    fld = tr.forward_transform(lambda Z: np.ones(len(Z)), lambdas=[1.0, 2.0], centers=[[0.5, 0.5]], quadrature=q)
    with pytest.raises(UnsupportedFeatureError):
        tr.inverse_transform(fld, [[0.5, 0.5]])


def test_csv_roundtrip(tmp_path):
    fld = tr.forward_transform(bump(0.5, 0.25), lambdas=LAMS[::16], centers=XI[::8])
    path = tmp_path / "F.csv"
    tr.save_field(path, fld)
    assert path.read_text().splitlines()[0] == "lambda,xi1,F"
    back = tr.load_field(path)
    assert np.array_equal(back.lambdas, fld.lambdas)
    assert np.array_equal(back.centers, fld.centers)
    assert np.array_equal(back.values, fld.values)
    path.write_text("lam,xi,F\n1,0,0\n")
    with pytest.raises(ConfigError):
        tr.load_field(path)
