import math

import numpy as np
import pytest
from scipy import special

from helmwave import bkm_eigen as be
from helmwave.exceptions import DomainError
from helmwave.geometry import disk_domain, interval_domain
from helmwave.wavelet_series import scale_orthogonality_check

DISK = (2.404826, 3.831706, 5.135622, 5.520078)


@pytest.fixture(scope="module")
def line():
    dom = interval_domain()
    return dom, be.eigen_scan(dom, (0.1, 16.0))


@pytest.fixture(scope="module")
def disk():
    dom = disk_domain(1.0, n_boundary=48)
    return dom, be.eigen_scan(dom, (0.5, 6.0))


def test_bkm_matrix_interval():
    dom = interval_domain()
    lam = 2.0
    H = be.assemble_bkm_matrix(dom, lam)
    assert H.shape == (2, 2)
    assert np.allclose(H, [[0, math.sin(lam) / (2 * lam)], [math.sin(lam) / (2 * lam), 0]], atol=1e-15)
    assert abs(np.linalg.det(be.assemble_bkm_matrix(dom, math.pi))) < 1e-30
    with pytest.raises(DomainError):
        be.assemble_bkm_matrix(dom, 0.0)


def test_bkm_matrix_symmetric_dirichlet():
    H = be.assemble_bkm_matrix(disk_domain(1.0), 3.3)
    assert np.abs(H - H.T).max() < 1e-12


def test_interval_spectrum(line):
    _, spec = line
    lams = spec.nonzero().wavenumbers
    assert np.allclose(lams[:4], math.pi * np.arange(1, 5), atol=1e-6)
    assert np.all(np.diff(spec.wavenumbers) > 0)
    assert all(p.bc_residual <= 1e-4 for p in spec)


def test_disk_spectrum(disk):
    _, spec = disk
    assert np.allclose(spec.distinct_wavenumbers()[:4], DISK, atol=1e-3)
    mult = {round(p.wavenumber, 3): p.multiplicity for p in spec}
    assert mult[3.832] == 2 and mult[2.405] == 1


def test_empty_range():
    spec = be.eigen_scan(disk_domain(1.0), (0.1, 2.0))
    assert len(spec) == 0


def test_neumann_constant_mode():
    dom = interval_domain(bc="neumann")
    spec = be.eigen_scan(dom, (0.1, 7.0))
    assert spec.pairs[0].is_constant and spec.pairs[0].wavenumber == 0.0
    assert np.allclose(spec.nonzero().wavenumbers, [math.pi, 2 * math.pi], atol=1e-6)
    v = be.eigenfunction_eval(spec.pairs[1], np.linspace(0, 1, 11)[:, None])
    assert np.allclose(np.abs(v), math.sqrt(2) * np.abs(np.cos(math.pi * np.linspace(0, 1, 11))), atol=1e-6)


def test_robin_interval():
    # v = sin(k x) + c cos(k x) with v'(0) = v(0)... here Dirichlet at 0, Robin a at 1:
    # v = sin(k x), k cos k + a sin k = 0
    from helmwave.geometry import BoundaryCondition

    dom = interval_domain(bc=[BoundaryCondition("dirichlet"), BoundaryCondition("robin", 1.0)])
    spec = be.eigen_scan(dom, (0.5, 6.0))
    k = spec.nonzero().wavenumbers[0]
    assert abs(k * math.cos(k) + math.sin(k)) < 1e-8
    assert k == pytest.approx(2.028757838, abs=1e-6)


def test_eigenfunctions(line, disk):
    _, spec = line
    p = spec.pairs[0]
    assert np.abs(be.eigenfunction_eval(p, [[0.0], [1.0]])).max() <= p.bc_residual + 1e-12
    dom, dspec = disk
    rng = np.random.default_rng(3)
    r = np.sqrt(rng.uniform(0, 0.9, 200))
    t = rng.uniform(0, 2 * np.pi, 200)
    X = np.c_[r * np.cos(t), r * np.sin(t)]
    v = be.eigenfunction_eval(dspec.pairs[0], X)
    assert abs(np.corrcoef(v, special.j0(DISK[0] * r))[0, 1]) >= 0.999


def test_helmholtz_residual_any_beta(disk):
    dom, spec = disk
    rng = np.random.default_rng(5)
    p = spec.pairs[2]
    q = be.Eigenpair(p.wavenumber, rng.normal(size=p.beta.size), p.source_points, p.source_normals, p.source_weights, p.source_derivs, 0.0)
    h = 1e-3
    X = rng.uniform(-0.5, 0.5, (50, 2))
    v0 = be.eigenfunction_eval(q, X)
    lap = sum(be.eigenfunction_eval(q, X + h * e) + be.eigenfunction_eval(q, X - h * e) for e in np.eye(2)) - 4 * v0
    lap /= h * h
    assert np.abs(lap + p.wavenumber**2 * v0).max() <= 1e-5 * np.abs(v0).max() * 10


def test_orthogonality(line, disk):
    dom, spec = line
    assert scale_orthogonality_check(spec.pairs, be.default_quadrature(dom)) <= 1e-8
    dom, spec = disk
    q = be.default_quadrature(dom)
    assert scale_orthogonality_check(spec.pairs, q) <= max(1e-6, 10 * q.est_error)


def test_normalisation(disk):
    dom, spec = disk
    q = be.default_quadrature(dom)
    for p in spec:
        v = be.eigenfunction_eval(p, q.nodes)
        assert q.weights @ v**2 == pytest.approx(1.0, abs=max(1e-6, 10 * q.est_error))


def test_scan_diagnostics_and_objective():
    dom = interval_domain()
    spec = be.eigen_scan(dom, (1.0, 4.0), samples=20)
    assert "sigma" in spec.diagnostics and len(spec.diagnostics["grid"]) == 20
    obj = be.scan_objective(dom, [1.0, math.pi, 4.0])
    assert obj[1] < 1e-10 < obj[0]


def test_algebraic_interval_and_disk():
    for delta in (0.05, 0.1, 0.2):
        s = be.eigen_algebraic(interval_domain(), delta=delta)
        assert s.nonzero().wavenumbers[0] == pytest.approx(math.pi, abs=5e-2)
    firsts = [be.eigen_algebraic(disk_domain(1.0), delta=d).nonzero().wavenumbers[0] for d in (0.05, 0.1, 0.2)]
    assert max(firsts) - min(firsts) < 1e-2
    assert firsts[1] == pytest.approx(DISK[0], abs=5e-2)
    with pytest.raises(DomainError):
        be.eigen_algebraic(interval_domain(), delta=0.0)


def test_schemes_agree_first_three_interval():
    dom = interval_domain()
    a = be.eigen_algebraic(dom, delta=0.1).nonzero().wavenumbers[:3]
    b = be.eigen_scan(dom, (1.0, 10.0)).wavenumbers[:3]
    assert np.abs(a - b).max() < 5e-2


def test_spectrum_roundtrip(tmp_path, line):
    _, spec = line
    path = tmp_path / "spec.json"
    be.save_spectrum(spec, path)
    back = be.load_spectrum(path)
    assert np.array_equal(back.wavenumbers, spec.wavenumbers)
    X = np.linspace(0, 1, 7)[:, None]
    assert np.allclose(be.eigenfunction_eval(back.pairs[1], X), be.eigenfunction_eval(spec.pairs[1], X), atol=1e-14)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("HELMWAVE_THREADS", "3")
    assert be.thread_count() == 3
    spec3 = be.eigen_scan(interval_domain(), (1.0, 7.0))
    monkeypatch.setenv("HELMWAVE_THREADS", "1")
    spec1 = be.eigen_scan(interval_domain(), (1.0, 7.0))
    assert np.array_equal(spec1.wavenumbers, spec3.wavenumbers)
