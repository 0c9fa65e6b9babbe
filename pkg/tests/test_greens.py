import numpy as np
import pytest

from onecauchy import DiskGreens, UniformMesh, circle_curve, fundamental_solution
from onecauchy.errors import GeometryError

RADIUS = 5.0


@pytest.fixture(scope="module")
def greens():
    return DiskGreens((0.0, 0.0), RADIUS)


@pytest.fixture(scope="module")
def mesh():
    return UniformMesh(circle_curve((0.0, 0.0), RADIUS), 64)


def test_fundamental_solution_values():
    assert abs(fundamental_solution([1.0, 0.0], [0.0, 0.0])) < 1e-15
    got = fundamental_solution([np.exp(-1.0), 0.0], [0.0, 0.0])
    assert abs(got - 1.0 / (2 * np.pi)) < 1e-15
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = rng.normal(size=(2, 2))
        assert fundamental_solution(x, y) == fundamental_solution(y, x)
    with pytest.raises(ValueError):
        fundamental_solution([1.0, 2.0], [1.0, 2.0])


def test_boundary_vanishing(greens):
    rng = np.random.default_rng(42)
    theta = 2 * np.pi * np.arange(256) / 256
    boundary = RADIUS * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    worst = 0.0
    for _ in range(50):
        r = RADIUS * np.sqrt(rng.uniform(0, 0.9))
        ang = rng.uniform(0, 2 * np.pi)
        z = [r * np.cos(ang), r * np.sin(ang)]
        worst = max(worst, np.abs(greens.value(boundary, z)).max())
    assert worst <= 1e-12


def test_reciprocity(greens):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        x, y = rng.uniform(-3.0, 3.0, size=(2, 2))
        worst = max(worst, abs(greens.value(x, y) - greens.value(y, x)))
    assert worst <= 1e-12


def test_regular_part_is_harmonic(greens):
    # 5-point Laplacian of K - Phi0 in x vanishes to quadrature+roundoff level;
    # a generic non-harmonic function would give O(1) here
    y = np.array([1.0, 0.5])
    x0 = np.array([-1.5, 2.0])

    def regular_part(x):
        return greens.value(x, y) - fundamental_solution(x, y)

    def discrete_laplacian(h):
        val = -4.0 * regular_part(x0)
        for step in ([h, 0], [-h, 0], [0, h], [0, -h]):
            val += regular_part(x0 + step)
        return val / h**2

    assert abs(discrete_laplacian(1e-2)) < 1e-8
    assert abs(discrete_laplacian(5e-3)) < 1e-8


def test_source_rejection(greens):
    with pytest.raises(GeometryError):
        greens.value([0.0, 0.0], [RADIUS, 0.0])
    with pytest.raises(GeometryError):
        greens.value([0.0, 0.0], [RADIUS + 1.0, 0.0])


def test_centered_source_limit(greens, mesh):
    # continuity of the centered-source limit
    near = greens.value([2.0, 1.0], [1e-9, 0.0])
    exact = greens.value([2.0, 1.0], [0.0, 0.0])
    assert abs(near - exact) < 1e-8
    trace = greens.normal_trace([0.0, 0.0], mesh)
    assert np.allclose(trace, trace[0])


def test_trace_matches_finite_difference(greens, mesh):
    z = np.array([1.3, -0.7])
    trace = greens.normal_trace(z, mesh)
    h = 1e-6
    nu = mesh.points / RADIUS
    fd = (greens.value(mesh.points + h * nu, z)
          - greens.value(mesh.points - h * nu, z)) / (2 * h)
    assert np.max(np.abs(trace - fd)) / np.max(np.abs(trace)) <= 1e-6


def test_trace_quadrature_of_constant(greens, mesh):
    z = np.array([2.2, 0.4])
    flux = np.sum(mesh.quad_weights * greens.normal_trace(z, mesh))
    assert abs(flux + 1.0) <= 1e-8


def test_probe_point_rejection(greens, mesh):
    with pytest.raises(GeometryError):
        greens.normal_trace([RADIUS, 0.0], mesh)


def test_representation_formula(greens, mesh):
    # harmonic extension of cos(theta) recovered from the boundary kernel
    f = np.cos(mesh.t)
    for x in (np.array([2.0, 0.0]), np.array([1.0, 1.5])):
        u = -np.sum(mesh.quad_weights * greens.normal_trace(x, mesh) * f)
        r = np.linalg.norm(x)
        exact = (r / RADIUS) * np.cos(np.arctan2(x[1], x[0]))
        assert abs(u - exact) <= 1e-8
