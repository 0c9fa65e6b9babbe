import numpy as np
import pytest

from onecauchy import (CauchyPair, EmptyDiskSolver, GradedMesh, ObstacleSolver,
                       PolygonBoundary, UniformMesh, circle_curve,
                       dtn_sampling_disk, regular_polygon, synthesize_cauchy)
from onecauchy.errors import ConfigError, NumericalError
from onecauchy.forward import check_evaluation_clearance, trig_interpolate
from onecauchy.inversion import weighted_inner

RADIUS = 5.0
PAPER_POLYGON = [(0.25, -0.75), (1.5, -0.5), (1.5, 0.5), (0.5, 0.5)]


@pytest.fixture(scope="module")
def circle():
    return circle_curve((0.0, 0.0), RADIUS)


@pytest.fixture(scope="module")
def mesh64(circle):
    return UniformMesh(circle, 64)


@pytest.fixture(scope="module")
def empty_solver(mesh64):
    return EmptyDiskSolver(mesh64)


@pytest.fixture(scope="module")
def annulus_solver(mesh64):
    poly = regular_polygon((0.0, 0.0), 1.0, 128)
    return ObstacleSolver(mesh64, GradedMesh(poly, 256, 2.0))


def test_empty_disk_annihilates_constants(empty_solver, mesh64):
    flux = empty_solver.dtn_apply(2.5 * np.ones(mesh64.size))
    assert np.abs(flux).max() <= 1e-10


def test_empty_disk_fourier_modes(empty_solver, mesh64):
    for k in (1, 3, 8, 16):
        f = np.cos(k * mesh64.t)
        expect = (k / RADIUS) * f
        err = np.abs(empty_solver.dtn_apply(f) - expect).max() / np.abs(expect).max()
        assert err <= 1e-6 if k <= 16 else 1e-4


def test_empty_disk_matrix_modes(empty_solver, mesh64):
    dtn = empty_solver.dtn_matrix()
    assert np.abs(dtn.matrix @ np.ones(mesh64.size)).max() <= 1e-10 * np.abs(dtn.matrix).max() * mesh64.size
    for k in range(1, 9):
        for vec in (np.cos(k * mesh64.t), np.sin(k * mesh64.t)):
            err = np.abs(dtn.matrix @ vec - (k / RADIUS) * vec).max() / (k / RADIUS)
            assert err <= 1e-6


def test_annulus_constant_flux(annulus_solver, mesh64):
    psi, wpsi = annulus_solver.densities(np.ones(mesh64.size))
    flux = annulus_solver.outer_neumann(psi, wpsi)
    exact = 1.0 / (RADIUS * np.log(RADIUS))
    assert np.abs(flux - exact).max() / exact <= 1e-3


def test_annulus_mode_eigenvalues(annulus_solver, mesh64):
    dtn = annulus_solver.dtn_matrix()
    for k in range(1, 5):
        v = np.cos(k * mesh64.t)
        exact = (k / RADIUS) * (RADIUS ** (2 * k) + 1.0) / (RADIUS ** (2 * k) - 1.0)
        rayleigh = weighted_inner(dtn.quad_weights, v, dtn.matrix @ v) \
            / weighted_inner(dtn.quad_weights, v, v)
        assert abs(rayleigh - exact) / exact <= 1e-3


def test_zero_data_gives_zero_densities(annulus_solver, mesh64):
    psi, wpsi = annulus_solver.densities(np.zeros(mesh64.size))
    assert np.abs(psi).max() == 0.0
    assert np.abs(wpsi).max() == 0.0


def test_difference_weighted_symmetry(mesh64, empty_solver):
    poly = PolygonBoundary(PAPER_POLYGON)
    lam_d = ObstacleSolver(mesh64, GradedMesh(poly, 64, 2.0)).dtn_matrix()
    lam_0 = empty_solver.dtn_matrix()
    diff = lam_d.matrix - lam_0.matrix
    weighted = lam_0.quad_weights[:, None] * diff
    asym = np.linalg.norm(weighted - weighted.T) / np.linalg.norm(weighted)
    assert asym <= 1e-6


def test_interior_field_empty_disk(empty_solver, mesh64):
    psi = empty_solver.density(np.cos(mesh64.t))
    u = empty_solver.eval_interior(psi, np.array([2.0, 0.0]))
    assert abs(u - 0.4) <= 1e-8
    psi0 = empty_solver.density(np.zeros(mesh64.size))
    assert abs(empty_solver.eval_interior(psi0, np.array([1.0, 1.0]))) == 0.0


def test_interior_field_annulus(annulus_solver, mesh64):
    psi, wpsi = annulus_solver.densities(np.ones(mesh64.size))
    u = annulus_solver.eval_interior(psi, wpsi, np.array([2.0, 0.0]))
    exact = np.log(2.0) / np.log(5.0)
    assert abs(u - exact) <= 1e-3


def test_evaluation_clearance_guard(annulus_solver, mesh64):
    with pytest.raises(NumericalError):
        check_evaluation_clearance(mesh64, annulus_solver.gmesh,
                                   np.array([4.99, 0.0]), (0.0, 0.0), RADIUS)
    with pytest.raises(NumericalError):
        check_evaluation_clearance(mesh64, annulus_solver.gmesh,
                                   np.array([1.01, 0.0]), (0.0, 0.0), RADIUS)
    check_evaluation_clearance(mesh64, annulus_solver.gmesh,
                               np.array([2.5, 0.0]), (0.0, 0.0), RADIUS)


def test_obstacle_neumann_annulus(annulus_solver, mesh64):
    psi, wpsi = annulus_solver.densities(np.ones(mesh64.size))
    trace = annulus_solver.obstacle_neumann(psi, wpsi, 1e-4)
    exact = 1.0 / np.log(5.0)
    gm = annulus_solver.gmesh
    per = gm.size // gm.poly.n_corners
    rank = np.arange(gm.size) % per
    mid = (rank >= per // 4) & (rank < per - per // 4)
    assert np.abs(trace[mid] - exact).max() / exact <= 1e-2

    psi0, wpsi0 = annulus_solver.densities(np.zeros(mesh64.size))
    assert np.abs(annulus_solver.obstacle_neumann(psi0, wpsi0, 1e-4)).max() == 0.0

    # stability away from corners under a change of regularization
    other = annulus_solver.obstacle_neumann(psi, wpsi, 2e-4)
    rel = np.abs(other[mid] - trace[mid]) / np.abs(trace[mid])
    assert rel.max() < 1e-3

    with pytest.raises(ConfigError):
        annulus_solver.obstacle_neumann(psi, wpsi, 0.0)


def test_trig_interpolate_reproduces_samples():
    rng = np.random.default_rng(12)
    values = rng.normal(size=16)
    fine = trig_interpolate(values, 4)
    assert np.allclose(fine[::4], values, atol=1e-12)
    # exact for resolvable modes
    t8 = np.pi * np.arange(16) / 8
    t32 = np.pi * np.arange(64) / 32
    assert np.allclose(trig_interpolate(np.cos(3 * t8), 4), np.cos(3 * t32), atol=1e-12)


@pytest.fixture(scope="module")
def synth_inputs(circle):
    poly = PolygonBoundary(PAPER_POLYGON)
    f_of_t = lambda t: np.where(np.mod(t, 2 * np.pi) < np.pi, 1.0, 0.0)
    return poly, f_of_t


def test_synthesize_clean_and_noisy(circle, synth_inputs):
    poly, f_of_t = synth_inputs
    clean = synthesize_cauchy(circle, poly, f_of_t, 2.0, 0.0, 9,
                              n_half_outer=32, n_half_obstacle=32, outer_radius=RADIUS)
    noisy = synthesize_cauchy(circle, poly, f_of_t, 2.0, 0.01, 9,
                              n_half_outer=32, n_half_obstacle=32, outer_radius=RADIUS)
    assert clean.dirichlet.shape == (64,)
    bound = 0.01 * np.abs(clean.neumann).max()
    assert np.abs(noisy.neumann - clean.neumann).max() <= bound + 1e-15
    again = synthesize_cauchy(circle, poly, f_of_t, 2.0, 0.01, 9,
                              n_half_outer=32, n_half_obstacle=32, outer_radius=RADIUS)
    assert np.array_equal(noisy.neumann, again.neumann)
    with pytest.raises(ConfigError):
        synthesize_cauchy(circle, poly, f_of_t, 2.0, -0.1, 9,
                          n_half_outer=32, n_half_obstacle=32)


def test_synthesize_gamma_scales_neumann(circle, synth_inputs):
    poly, f_of_t = synth_inputs
    one = synthesize_cauchy(circle, poly, f_of_t, 1.0, 0.0, 0,
                            n_half_outer=32, n_half_obstacle=32, outer_radius=RADIUS)
    two = synthesize_cauchy(circle, poly, f_of_t, 2.0, 0.0, 0,
                            n_half_outer=32, n_half_obstacle=32, outer_radius=RADIUS)
    assert np.allclose(two.neumann, 2.0 * one.neumann, atol=1e-14)


def test_cauchy_pair_validation():
    with pytest.raises(ConfigError):
        CauchyPair(dirichlet=np.zeros(4), neumann=np.zeros(5), noise_ratio=0.0,
                   rng_seed=0, outer_radius=5.0, n_half=2)
    with pytest.raises(ConfigError):
        CauchyPair(dirichlet=np.zeros(4), neumann=np.zeros(4), noise_ratio=-1.0,
                   rng_seed=0, outer_radius=5.0, n_half=2)


def test_sampling_disk_positive_spectrum(mesh64, empty_solver):
    dtn = dtn_sampling_disk(mesh64, (0.0, 0.0), 3.0, sides=64, n_half=64)
    diff = dtn.matrix - empty_solver.dtn_matrix().matrix
    from onecauchy import weighted_eigs
    eig = weighted_eigs(diff, dtn.quad_weights, 1e-8)
    lam_max = np.abs(eig.eigenvalues).max()
    assert eig.eigenvalues.min() >= -1e-8 * lam_max
