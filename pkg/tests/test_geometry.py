import json
import math

import numpy as np
import pytest
from scipy import special
from scipy.spatial.transform import Rotation

from helmwave import geometry as g
from helmwave.exceptions import ConfigError, DomainError, EmptyDomainError, GeometryError


def test_ball_volume_and_sphere_area():
    assert g.unit_ball_volume(1) == pytest.approx(2.0)
    assert g.unit_ball_volume(2) == pytest.approx(math.pi)
    assert g.unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert g.unit_sphere_area(2) == pytest.approx(2 * math.pi)
    assert g.unit_sphere_area(3) == pytest.approx(4 * math.pi)
    assert g.unit_sphere_area(4) == pytest.approx(2 * math.pi**2)
    for n in range(2, 9):
        assert g.unit_ball_volume(n) * n == pytest.approx(g.unit_sphere_area(n), rel=1e-12)
    with pytest.raises(DomainError):
        g.unit_ball_volume(0)
    with pytest.raises(DomainError):
        g.unit_sphere_area(1)


def test_sphere_area_shell_recursion():
    # |S^{n-1}| = |S^{n-2}| * int_0^pi sin^{n-2}
    for n in range(3, 8):
        from scipy.integrate import quad

        factor = quad(lambda t: math.sin(t) ** (n - 2), 0, math.pi)[0]
        assert g.unit_sphere_area(n) == pytest.approx(g.unit_sphere_area(n - 1) * factor, rel=1e-10)


def test_interval_construction():
    nodes = [((0.0,), (-1.0,), "dirichlet"), ((1.0,), (1.0,), "dirichlet")]
    dom = g.build_domain(1, nodes, np.linspace(0.1, 0.9, 9)[:, None])
    assert dom.dimension == 1 and len(dom.boundary) == 2 and len(dom.interior) == 9
    assert dom.enclosing_radius == pytest.approx(0.5)


def test_circle_construction():
    t = 2 * np.pi * np.arange(32) / 32
    pts = np.c_[np.cos(t), np.sin(t)]
    dom = g.build_domain(2, [(p, p, "dirichlet") for p in pts])
    assert len(dom.boundary) == 32
    assert np.allclose(np.linalg.norm(dom.boundary_normals, axis=1), 1.0, atol=1e-12)


def test_bad_normal_names_index():
    nodes = [((0.0, 0.0), (0.0, -1.0), "dirichlet"), ((1.0, 0.0), (0.5, 0.0), "dirichlet"), ((0.0, 1.0), (0.0, 1.0), "dirichlet")]
    with pytest.raises(GeometryError) as info:
        g.build_domain(2, nodes)
    assert info.value.index == 1


def test_empty_boundary_and_bad_interior():
    with pytest.raises(GeometryError):
        g.build_domain(1, [])
    nodes = [((0.0,), (-1.0,), "dirichlet"), ((1.0,), (1.0,), "dirichlet")]
    with pytest.raises(GeometryError) as info:
        g.build_domain(1, nodes, [[0.5], [1.5]])
    assert info.value.index == 1


def test_dirichlet_first_and_robin_validation():
    nodes = [((0.0,), (-1.0,), "neumann"), ((1.0,), (1.0,), "dirichlet")]
    dom = g.build_domain(1, nodes)
    assert dom.bc_kinds[0] is g.BCKind.DIRICHLET
    with pytest.raises(GeometryError):
        g.BoundaryCondition("robin", -1.0)
    with pytest.raises(GeometryError):
        g.BoundaryCondition.parse("dirichlit")


def test_builtin_shapes():
    assert g.disk_domain(1.0).has_constant_mode is False
    assert g.interval_domain(bc="neumann").has_constant_mode
    b = g.ball_domain(2.0, center=(1.0, 1.0, 1.0))
    assert b.enclosing_radius == pytest.approx(2.0, rel=1e-9)
    assert np.all(b.contains(b.interior))
    r = g.rectangle_domain((0, 0), (2, 1))
    assert r.contains([[1.0, 0.5], [2.5, 0.5]]).tolist() == [True, False]


def test_quadrature_examples():
    disk = g.disk_domain(1.0)
    q = g.domain_quadrature(disk, 64 * 64)
    assert q.measure == pytest.approx(math.pi, abs=1e-3)
    assert np.all(disk.contains(q.nodes))
    line = g.interval_domain()
    q1 = g.domain_quadrature(line, 32)
    assert q1.integrate(lambda X: X[:, 0]) == pytest.approx(0.5, abs=1e-12)
    # Fourier-Bessel norm: int_disk J0(j01 r)^2 = pi R^2 J1(j01)^2
    j01 = 2.404825557695773
    val = q.integrate(lambda X: special.j0(j01 * np.linalg.norm(X, axis=1)) ** 2)
    assert val == pytest.approx(math.pi * special.j1(j01) ** 2, abs=1e-6)


def test_quadrature_polynomials_on_box():
    line = g.interval_domain(-1.0, 2.0)
    q = g.domain_quadrature(line, 64)
    for k in range(6):
        assert q.integrate(lambda X: X[:, 0] ** k) == pytest.approx((2.0 ** (k + 1) - (-1.0) ** (k + 1)) / (k + 1), abs=1e-12)
    rect = g.rectangle_domain((0, 0), (2, 1))
    q2 = g.domain_quadrature(rect, 4096)
    for a in range(6):
        for b in range(6 - a):
            exact = 2.0 ** (a + 1) / (a + 1) / (b + 1)
            assert q2.integrate(lambda X: X[:, 0] ** a * X[:, 1] ** b) == pytest.approx(exact, abs=1e-12)


def test_quadrature_ball_volume():
    q = g.domain_quadrature(g.ball_domain(1.0), 20000)
    assert q.measure == pytest.approx(4 * math.pi / 3, rel=2e-2)
    assert q.est_error > 0


def test_empty_domain():
    nodes = [((0.0,), (-1.0,), "dirichlet"), ((1.0,), (1.0,), "dirichlet")]
    dom = g.build_domain(1, nodes, indicator=lambda X: np.zeros(len(X), dtype=bool))
    with pytest.raises(EmptyDomainError):
        g.domain_quadrature(dom)


def test_pairwise_distances():
    A = np.array([[0.0], [1.0]])
    assert np.array_equal(g.pairwise_distances(A, A), [[0, 1], [1, 0]])
    assert g.pairwise_distances([[0, 0]], [[3, 4]])[0, 0] == 5.0
    with pytest.raises(DomainError):
        g.pairwise_distances([[0, 0]], [[0, 0, 0]])
    rng = np.random.default_rng(0)
    P = rng.normal(size=(30, 3))
    D = g.pairwise_distances(P, P)
    assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :].transpose(1, 0, 2) + 1e-12)
    for n in (2, 3):
        A, B = rng.normal(size=(10, n)), rng.normal(size=(7, n))
        Q = Rotation.random(random_state=1).as_matrix()[:n, :n] if n == 3 else np.array([[0.6, -0.8], [0.8, 0.6]])
        assert np.allclose(g.pairwise_distances(A @ Q.T, B @ Q.T), g.pairwise_distances(A, B), atol=1e-12)


def test_geometry_file_roundtrip(tmp_path):
    doc = {
        "dimension": 1,
        "boundary": [
            {"position": [0.0], "normal": [-1.0], "bc": "dirichlet"},
            {"position": [1.0], "normal": [1.0], "bc": "robin", "robin_a": 2.0},
        ],
        "interior": [[0.5]],
    }
    path = tmp_path / "geom.json"
    path.write_text(json.dumps(doc))
    dom = g.load_geometry(path)
    assert dom.robin_coefficients.tolist() == [0.0, 2.0]


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"dimension": 1, "boundary": [{"position": [0.0], "normal": [-1.0], "bc": "dirichlit"}]}, "geometry.boundary[0].bc"),
        ({"dimension": 1, "boundary": [{"position": [0.0], "normal": [-1.0], "colour": 1}]}, "geometry.boundary[0].colour"),
        ({"shape": {"disk": {"radius": 1, "bc": "nope"}}}, "geometry.shape.disk.bc"),
        ({"boundary": []}, "geometry.dimension"),
        ({"shape": {"torus": {}}}, "geometry.shape.torus"),
    ],
)
def test_geometry_file_errors(doc, field):
    with pytest.raises(ConfigError) as info:
        g.domain_from_record(doc)
    assert info.value.field == field
