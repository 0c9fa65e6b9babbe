"""Built-in oracle battery: analytic checks the CLI can run in seconds.

Each oracle compares a computed quantity against an independent closed
form (Fourier mode action of the disk DtN, annulus separation of
variables, image-formula identities, exactness of the periodic quadrature
rules, finite differences for the shape Jacobian).
"""

import numpy as np

from .assembly import hypersingular_weights, log_kernel_weights
from .forward import EmptyDiskSolver, ObstacleSolver
from .geometry import GradedMesh, PolygonBoundary, UniformMesh, circle_curve, regular_polygon
from .greens import DiskGreens
from .inversion import weighted_inner
from .newton import (corner_basis_normal_components, domain_derivative,
                     extrapolated_corner_jacobian, forward_map)

DEFAULT_TOLERANCES = {
    "log_weights_constants": 1e-12,
    "hyper_weights_constants": 1e-12,
    "greens_boundary_vanishing": 1e-12,
    "greens_reciprocity": 1e-12,
    "greens_flux_of_constant": 1e-8,
    "dtn_fourier_modes": 1e-6,
    "annulus_constant_flux": 1e-3,
    "annulus_mode_eigenvalues": 1e-3,
    "jacobian_finite_difference": 1e-3,
}

PAPER_POLYGON = [(0.25, -0.75), (1.5, -0.5), (1.5, 0.5), (0.5, 0.5)]


def _check_quadrature_identities():
    worst_log = 0.0
    worst_hyper = 0.0
    for n in (16, 32, 64):
        nodes = np.pi / (2 * n) + np.pi * np.arange(2 * n) / n
        diffs = nodes[:, None] - nodes[None, :]
        worst_log = max(worst_log, np.abs(log_kernel_weights(n, diffs).sum(axis=1)).max())
        tnodes = np.pi * np.arange(2 * n) / n
        tdiffs = tnodes[:, None] - tnodes[None, :]
        worst_hyper = max(worst_hyper,
                          np.abs(hypersingular_weights(n, tdiffs).sum(axis=1)).max())
    return worst_log, worst_hyper


def _check_greens(n_half=64, radius=5.0, seed=20240901):
    rng = np.random.default_rng(seed)
    greens = DiskGreens((0.0, 0.0), radius)
    theta = 2.0 * np.pi * np.arange(256) / 256
    boundary = radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)

    worst_boundary = 0.0
    for _ in range(50):
        r = radius * np.sqrt(rng.uniform(0.0, 0.94))
        ang = rng.uniform(0.0, 2.0 * np.pi)
        z = np.array([r * np.cos(ang), r * np.sin(ang)])
        worst_boundary = max(worst_boundary, np.abs(greens.value(boundary, z)).max())

    worst_recip = 0.0
    for _ in range(100):
        pts = radius * 0.97 * rng.uniform(-0.7, 0.7, size=(2, 2))
        worst_recip = max(worst_recip,
                          abs(greens.value(pts[0], pts[1]) - greens.value(pts[1], pts[0])))

    mesh = UniformMesh(circle_curve((0.0, 0.0), radius), n_half)
    z = np.array([1.3, -0.4])
    flux = np.sum(mesh.quad_weights * greens.normal_trace(z, mesh))
    return worst_boundary, worst_recip, abs(flux + 1.0)


def _check_dtn_fourier(n_half=64, radius=5.0, max_mode=8):
    mesh = UniformMesh(circle_curve((0.0, 0.0), radius), n_half)
    solver = EmptyDiskSolver(mesh)
    worst = 0.0
    first_mode = None
    for k in range(1, max_mode + 1):
        f = np.cos(k * mesh.t)
        expect = (k / radius) * f
        err = np.max(np.abs(solver.dtn_apply(f) - expect)) / np.max(np.abs(expect))
        if k == 1:
            first_mode = err
        worst = max(worst, err)
    return worst, first_mode


def _check_annulus(n_half_outer=64, radius=5.0, rho=1.0, sides=128):
    mesh = UniformMesh(circle_curve((0.0, 0.0), radius), n_half_outer)
    poly = regular_polygon((0.0, 0.0), rho, sides)
    gmesh = GradedMesh(poly, 2 * sides)
    solver = ObstacleSolver(mesh, gmesh)

    psi_outer, wpsi = solver.densities(np.ones(mesh.size))
    flux = solver.outer_neumann(psi_outer, wpsi)
    exact0 = 1.0 / (radius * np.log(radius / rho))
    err_const = np.max(np.abs(flux - exact0)) / abs(exact0)

    dtn = solver.dtn_matrix()
    worst_mode = 0.0
    for k in range(1, 5):
        v = np.cos(k * mesh.t)
        exact = (k / radius) * (radius ** (2 * k) + rho ** (2 * k)) \
            / (radius ** (2 * k) - rho ** (2 * k))
        rayleigh = weighted_inner(dtn.quad_weights, v, dtn.matrix @ v) \
            / weighted_inner(dtn.quad_weights, v, v)
        worst_mode = max(worst_mode, abs(rayleigh - exact) / exact)
    return err_const, worst_mode


def _check_jacobian_fd(n_half_outer=32, n_half_fd=128, n_half_jac=256,
                       radius=5.0, eps=1e-4, grading_p=3.0):
    mesh = UniformMesh(circle_curve((0.0, 0.0), radius), n_half_outer)
    f = np.where(mesh.t < np.pi, 1.0, 0.0)
    corners = np.array(PAPER_POLYGON)
    jac = extrapolated_corner_jacobian(corners, mesh, f, n_half_jac, grading_p)
    flux0, _, _, _ = forward_map(corners, mesh, f, n_half_fd, grading_p)

    worst = 0.0
    n_corners = len(corners)
    for col in range(2 * n_corners):
        bumped = corners.copy()
        if col < n_corners:
            bumped[col, 0] += eps
        else:
            bumped[col - n_corners, 1] += eps
        flux_eps, _, _, _ = forward_map(bumped, mesh, f, n_half_fd, grading_p)
        fd = (flux_eps - flux0) / eps
        denom = np.linalg.norm(jac[:, col])
        worst = max(worst, np.linalg.norm(fd - jac[:, col]) / denom)
    return worst


def run_selftest(tolerances=None):
    """Run every oracle; returns (all_passed, report_lines)."""
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tols.update(tolerances)
    results = []

    worst_log, worst_hyper = _check_quadrature_identities()
    results.append(("log_weights_constants", worst_log))
    results.append(("hyper_weights_constants", worst_hyper))

    boundary_err, recip_err, flux_err = _check_greens()
    results.append(("greens_boundary_vanishing", boundary_err))
    results.append(("greens_reciprocity", recip_err))
    results.append(("greens_flux_of_constant", flux_err))

    fourier_err, mode1_err = _check_dtn_fourier()
    results.append(("dtn_fourier_modes", fourier_err))

    annulus_const, annulus_modes = _check_annulus()
    results.append(("annulus_constant_flux", annulus_const))
    results.append(("annulus_mode_eigenvalues", annulus_modes))

    results.append(("jacobian_finite_difference", _check_jacobian_fd()))

    lines = []
    all_ok = True
    for name, err in results:
        tol = tols[name]
        ok = err <= tol
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: measured {err:.3e} (tol {tol:.1e})")
    lines.append(f"INFO dtn mode-1 relative error at n_half=64: {mode1_err:.3e}")
    return all_ok, lines
