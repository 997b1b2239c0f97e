import json
import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from helmwave import wavelet_series as ws
from helmwave.exceptions import ConditioningError, ConfigError, DomainError
from helmwave.geometry import ball_domain, disk_domain, domain_quadrature, interval_domain, rectangle_domain
from helmwave.special_fn import KernelKind, KernelSpec, general_solution


def test_scales_follow_profile_zeros():
    b = ws.build_basis(interval_domain(-1, 1), 3)
    assert np.allclose(b.scales, [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-12)
    b = ws.build_basis(disk_domain(1.0), 2)
    assert np.allclose(b.scales, [2.404826, 5.520078], atol=1e-6)
    b = ws.build_basis(disk_domain(2.0), 1)
    assert b.scales[0] == pytest.approx(1.202413, abs=1e-6)
    for dom in (interval_domain(-1, 1), disk_domain(1.3), ball_domain(0.7)):
        b = ws.build_basis(dom, 4)
        n = dom.dimension
        for eta in b.scales:
            # the profile r**-nu J_nu vanishes at eta R; compare against the origin scale
            spec = KernelSpec(n, eta)
            peak = np.abs(general_solution(spec, np.linspace(0.0, b.R, 201))).max()
            assert abs(general_solution(spec, b.R)) <= 1e-10 * peak


def test_basis_validation():
    with pytest.raises(DomainError):
        ws.build_basis(disk_domain(1.0), 2, np.zeros((0, 2)))
    with pytest.raises(DomainError):
        ws.build_basis(disk_domain(1.0), 0)
    with pytest.raises(DomainError):
        ws.WaveletBasis(1, [2.0, 1.0], [[0.0]])


def test_gram_schmidt_single_center_normalises():
    dom = interval_domain(0, 1)
    q = domain_quadrature(dom, 256)
    b = ws.gram_schmidt_within_scale(ws.build_basis(dom, 2, [[0.0]]), q)
    for j, eta in enumerate(b.scales):
        atom = np.sin(eta * q.nodes[:, 0]) / (2 * eta)
        assert b.ortho[j][0, 0] == pytest.approx(1 / math.sqrt(q.weights @ atom**2), rel=1e-12)


def test_gram_schmidt_two_centers_identity():
    dom = interval_domain(0, 1)
    q = domain_quadrature(dom, 256)
    b = ws.gram_schmidt_within_scale(ws.WaveletBasis(1, [math.pi], [[0.2], [0.7]], R=0.5, domain=dom), q)
    D = ws.design_matrix(b, q.nodes)
    assert np.abs(D.T @ (q.weights[:, None] * D) - np.eye(2)).max() <= 1e-8
    assert np.allclose(np.triu(b.ortho[0]), b.ortho[0])


def test_gram_schmidt_disk_identity():
    dom = disk_domain(1.0)
    q = domain_quadrature(dom, 4096)
    centers = [[0.0, 0.0], [0.3, 0.1], [-0.2, 0.4]]
    b = ws.gram_schmidt_within_scale(ws.build_basis(dom, 2, centers), q)
    D = ws.design_matrix(b, q.nodes)
    for j in range(2):
        blk = D[:, 3 * j : 3 * j + 3]
        assert np.abs(blk.T @ (q.weights[:, None] * blk) - np.eye(3)).max() <= max(1e-10, 10 * q.est_error)


def test_gram_schmidt_duplicate_center_dropped():
    dom = interval_domain(0, 1)
    q = domain_quadrature(dom, 128)
    b = ws.gram_schmidt_within_scale(ws.WaveletBasis(1, [math.pi], [[0.3], [0.3]], domain=dom), q)
    assert b.rank == (1,)
    assert ws.design_matrix(b, q.nodes).shape[1] == 1


def test_gram_schmidt_coarse_quadrature_names_scale():
    from helmwave.geometry import QuadratureRule

    bad = QuadratureRule(np.array([[0.1], [0.5]]), np.array([1.0, -5.0]), 0.0)
    with pytest.raises(ConditioningError, match="scale 0"):
        ws.gram_schmidt_within_scale(ws.WaveletBasis(1, [math.pi], [[0.0], [0.9]]), bad)


def test_collocation_zero():
    b = ws.build_basis(interval_domain(0, 1), 2, [[0.0], [1.0]])
    x = np.linspace(0, 1, 20)[:, None]
    e = ws.expand_collocation(x, np.zeros(20), b)
    assert e.a0 == 0 and not e.coeffs.any()
    assert not ws.evaluate_series(e, x).any()


def test_collocation_sine_single_atom():
    b = ws.WaveletBasis(1, [math.pi], [[0.0]])
    x = np.linspace(0, 1, 41)[:, None]
    e = ws.expand_collocation(x, np.sin(math.pi * x[:, 0]), b, fit_intercept=False)
    assert e.coeffs[0, 0] == pytest.approx(2 * math.pi, abs=1e-10)
    assert e.fit_residual <= 1e-10


def test_collocation_recovers_atom_indicator():
    dom = disk_domain(1.0)
    centers = ws.default_centers(dom, 5)
    b = ws.build_basis(dom, 2, centers)
    rng = np.random.default_rng(0)
    X = rng.uniform(-0.7, 0.7, (300, 2))
    f = general_solution(KernelSpec(2, b.scales[0]), np.linalg.norm(X - centers[2], axis=1))
    e = ws.expand_collocation(X, f, b)
    target = np.zeros(b.shape)
    target[0, 2] = 1.0
    assert np.abs(e.coeffs - target).max() <= 1e-10 * 1e3
    assert e.fit_residual <= 1e-10


def test_collocation_projection_and_linearity():
    dom = disk_domain(1.0)
    b = ws.build_basis(dom, 3, [[0.0, 0.0], [0.5, 0.0], [0.0, -0.4]])
    rng = np.random.default_rng(1)
    C = rng.normal(size=b.shape)
    x = rng.uniform(-0.7, 0.7, (200, 2))
    f = ws.design_matrix(b, x) @ C.ravel() + 0.7
    e = ws.expand_collocation(x, f, b)
    assert np.abs(e.coeffs - C).max() <= 1e-8
    assert e.a0 == pytest.approx(0.7, abs=1e-8)
    e1 = ws.SeriesExpansion(b, 0.0, C, 0.0)
    e2 = ws.SeriesExpansion(b, 0.0, rng.normal(size=b.shape), 0.0)
    both = ws.SeriesExpansion(b, 0.0, 2 * e1.coeffs - 3 * e2.coeffs, 0.0)
    lhs = ws.evaluate_series(both, x)
    rhs = 2 * ws.evaluate_series(e1, x) - 3 * ws.evaluate_series(e2, x)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(lhs).max())


def test_collocation_round_trip_within_residual():
    dom = interval_domain(0, 1)
    b = ws.build_basis(dom, 3, ws.default_centers(dom, 4))
    x = np.linspace(0, 1, 50)[:, None]
    f = np.exp(x[:, 0]) * x[:, 0] * (1 - x[:, 0])
    e = ws.expand_collocation(x, f, b)
    assert np.abs(ws.evaluate_series(e, x) - f).max() <= e.fit_residual + 1e-15


def test_collocation_errors_and_rank_warning():
    b = ws.build_basis(interval_domain(0, 1), 2, [[0.0], [0.5]])
    with pytest.raises(DomainError):
        ws.expand_collocation([[0.1], [0.2]], [1.0, 2.0], b)
    dup = ws.WaveletBasis(1, [math.pi], [[0.3], [0.3]])
    x = np.linspace(0, 1, 10)[:, None]
    with pytest.warns(ws.RankWarning):
        e = ws.expand_collocation(x, np.sin(math.pi * x[:, 0]), dup)
    assert e.diagnostics["dropped"] >= 1
    assert e.coeffs[0, 0] == pytest.approx(e.coeffs[0, 1])


def test_calibration_constants_pinned():
    assert ws.calibrate_direct_constants() == pytest.approx(ws.DIRECT_CALIBRATION, rel=1e-6)
    assert ws.DIRECT_CALIBRATION == {"9a": 0.5, "9b": 1.0, "10a": 1.0, "10b": 1.0, "29": 4.0, "30": 1.0}


def test_direct_zero_and_1d_sine():
    dom = interval_domain(-1, 1)
    q = domain_quadrature(dom, 512)
    b = ws.build_basis(dom, 3, [[0.0]])
    e = ws.expand_direct(lambda X: np.zeros(len(X)), b, q)
    assert e.a0 == 0 and not e.coeffs.any() and e.method == "direct"
    # sin(pi |x|) = 2 pi atom_1; the other scales are orthogonal to it on [-1, 1]
    e = ws.expand_direct(lambda X: np.sin(math.pi * np.abs(X[:, 0])), b, q)
    oracle = integrate.quad(lambda x: math.sin(math.pi * x) ** 2, 0, 1)[0] * 2
    assert oracle == pytest.approx(1.0)
    assert e.coeffs[0, 0] == pytest.approx(2 * math.pi * oracle, rel=1e-10)
    assert np.abs(e.coeffs[1:, 0]).max() < 1e-10
    # the kink of sin(pi |x|) at 0 limits the plain quadrature to about 1e-5
    assert e.a0 == pytest.approx(2 / math.pi, rel=1e-4)


def test_direct_matches_collocation_on_disk():
    dom = disk_domain(1.0)
    q = domain_quadrature(dom, 4096)
    b = ws.gram_schmidt_within_scale(ws.build_basis(dom, 4, [[0.0, 0.0]]), q)
    f = lambda X: 1 - np.sum(X**2, axis=1)  # noqa: E731
    d = ws.expand_direct(f, b, q)
    c = ws.expand_collocation(q.nodes, f(q.nodes), b, sample_weight=q.weights, fit_intercept=False)
    rel = np.linalg.norm(d.coeffs - c.coeffs) / np.linalg.norm(c.coeffs)
    assert rel <= 1e-3
    assert d.a0 == pytest.approx(0.5, abs=1e-3)


def test_direct_warns_off_ball():
    dom = rectangle_domain((0, 0), (1, 1))
    q = domain_quadrature(dom, 400)
    with pytest.warns(RuntimeWarning):
        ws.expand_direct(lambda X: X[:, 0], ws.build_basis(dom, 1), q)


def test_scale_orthogonality():
    dom = disk_domain(1.0)
    q = domain_quadrature(dom, 4096)
    single = ws.build_basis(dom, 3, [[0.0, 0.0]])
    assert ws.scale_orthogonality_check(single, q) <= max(1e-6, 10 * q.est_error)
    shifted = ws.build_basis(dom, 3, [[0.0, 0.0], [0.4, 0.0]])
    assert ws.scale_orthogonality_check(shifted, q) > 1e-3  # reported, not small
    with pytest.raises(DomainError):
        ws.scale_orthogonality_check(ws.build_basis(dom, 1), q)


def test_admissibility_modified_1d():
    res = ws.admissibility_constant(KernelSpec(1, 1.0, KernelKind.MODIFIED_HELMHOLTZ))
    assert res.converged and res.value > 0
    # e^{-r}/2 has transform 1/(1+s^2); int_0^inf s^2/(1+s^2)^2 ds/s = 1/2
    oracle = integrate.quad(lambda s: s / (1 + s * s) ** 2, 0, np.inf)[0]
    assert res.value == pytest.approx(oracle, rel=1e-4)


def test_admissibility_general_diverges():
    res = ws.admissibility_constant(KernelSpec(1, 1.0))
    assert not res.converged and math.isinf(res.value) and res.message


def test_admissibility_dilation_invariant():
    spec = KernelSpec(3, 1.5, KernelKind.MODIFIED_HELMHOLTZ)
    base = ws.admissibility_constant(spec).value
    for a in (0.5, 2.0):
        assert ws.admissibility_constant(spec, dilation=a).value == pytest.approx(base, rel=1e-2)


def test_gibbs_demo_reports():
    out = ws.gibbs_demo()
    assert out["fourier_overshoot"] == pytest.approx(out["reference"], abs=1e-3)
    assert out["rbf_atoms"] == 32 and np.isfinite(out["rbf_overshoot"])


def test_expansion_file_roundtrip(tmp_path):
    dom = interval_domain(0, 1)
    b = ws.build_basis(dom, 2, [[0.0], [1.0]])
    x = np.linspace(0, 1, 30)[:, None]
    e = ws.expand_collocation(x, x[:, 0] ** 2, b)
    path = tmp_path / "exp.json"
    ws.save_expansion(e, path)
    back = ws.load_expansion(path, dom)
    assert np.allclose(ws.evaluate_series(back, x), ws.evaluate_series(e, x), atol=1e-14)
    doc = json.loads(path.read_text())
    doc["extra"] = 1
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError) as info:
        ws.load_expansion(path)
    assert info.value.field == "extra"


def test_samples_csv(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("x1,x2,value\n0.1,0.2,3\n0.3,0.4,5\n")
    X, f = ws.read_samples_csv(path, 2)
    assert X.shape == (2, 2) and f.tolist() == [3.0, 5.0]
    with pytest.raises(ConfigError) as info:
        ws.read_samples_csv(path, 1)
    assert info.value.code == "dimension_mismatch"
    path.write_text("x,value\n1,2\n")
    with pytest.raises(ConfigError):
        ws.read_samples_csv(path)
