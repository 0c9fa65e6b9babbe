"""Forward Dirichlet solvers and discrete Dirichlet-to-Neumann maps.

The empty disk is solved with a double-layer ansatz; the disk-with-obstacle
problem with a combined double-layer (outer) + single-layer (obstacle)
ansatz.  Because the grading derivative w' is tiny near corners, the solver
always works with the weighted density w'(s_j)*phi(t_j) as the unknown and
never divides by w'.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .assembly import (coupling_blocks, double_layer_outer, hypersingular_outer,
                       single_layer_obstacle)
from .errors import ConfigError, NumericalError
from .geometry import GradedMesh, UniformMesh, regular_polygon
from .greens import INV_TWO_PI


@dataclass(frozen=True)
class DtnMatrix:
    """Dense DtN map on the outer boundary nodes.

    quad_weights are the arc-length weights defining the discrete L2 inner
    product every spectral computation downstream uses.
    """
    matrix: np.ndarray
    quad_weights: np.ndarray
    tag: str

    @property
    def size(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CauchyPair:
    """One (f, gamma * normal derivative) measurement on the outer boundary."""
    dirichlet: np.ndarray
    neumann: np.ndarray
    noise_ratio: float
    rng_seed: int | None
    outer_radius: float
    n_half: int
    gamma_true: float | None = None

    def __post_init__(self):
        if self.dirichlet.shape != self.neumann.shape:
            raise ConfigError("Cauchy pair vectors must share the mesh")
        if self.noise_ratio < 0:
            raise ConfigError("noise ratio must be nonnegative")


class EmptyDiskSolver:
    """Interior Dirichlet problem on the outer curve alone."""

    def __init__(self, mesh):
        self.mesh = mesh
        self.outer_center = mesh.points.mean(axis=0)
        self.outer_radius = float(np.sum(mesh.quad_weights)) / (2.0 * np.pi)
        self.dl = double_layer_outer(mesh).entries
        self.hyper = hypersingular_outer(mesh).entries
        system = self.dl - np.eye(mesh.size)
        try:
            self.lu = lu_factor(system)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - circle never singular
            raise NumericalError(f"empty-disk system is singular: {exc}") from exc

    def density(self, f_nodal):
        return lu_solve(self.lu, 2.0 * np.asarray(f_nodal, dtype=float))

    def dtn_apply(self, f_nodal):
        psi = self.density(f_nodal)
        return 0.5 * (self.hyper @ psi) / self.mesh.speeds

    def dtn_matrix(self):
        inv = lu_solve(self.lu, np.eye(self.mesh.size))
        mat = (self.hyper @ inv) / self.mesh.speeds[:, None]
        return DtnMatrix(mat, self.mesh.quad_weights.copy(), "empty")

    def eval_interior(self, psi, points):
        check_evaluation_clearance(self.mesh, None, points,
                                   self.outer_center, self.outer_radius)
        return _double_layer_potential(self.mesh, psi, points)


class ObstacleSolver:
    """Interior Dirichlet problem outside a polygonal obstacle inside the disk."""

    def __init__(self, umesh, gmesh):
        self.umesh = umesh
        self.gmesh = gmesh
        self.outer_center = umesh.points.mean(axis=0)
        self.outer_radius = float(np.sum(umesh.quad_weights)) / (2.0 * np.pi)
        blocks = coupling_blocks(umesh, gmesh)
        self.hyper = hypersingular_outer(umesh).entries
        self.normal_single_to_outer = blocks["normal_single_to_outer"].entries
        self.hyper_to_obstacle = blocks["hyper_to_obstacle"].entries
        self.normal_single_obstacle = blocks["normal_single_obstacle"].entries
        nb, nd = umesh.size, gmesh.size
        system = np.zeros((nb + nd, nb + nd))
        system[:nb, :nb] = double_layer_outer(umesh).entries - np.eye(nb)
        system[:nb, nb:] = blocks["single_to_outer"].entries
        system[nb:, :nb] = blocks["double_to_obstacle"].entries
        system[nb:, nb:] = single_layer_obstacle(gmesh).entries
        try:
            self.lu = lu_factor(system)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"combined-layer system is singular: {exc}") from exc
        cond_proxy = np.abs(np.diag(self.lu[0]))
        if cond_proxy.min() < 1e-14 * cond_proxy.max():
            raise NumericalError(
                "combined-layer system is numerically singular "
                f"(pivot ratio {cond_proxy.min() / cond_proxy.max():.3e})")

    def densities(self, f_nodal, g_nodal=None):
        """Solve for (outer density, weighted obstacle density).

        f_nodal is the Dirichlet trace on the outer nodes, g_nodal the
        (optional) Dirichlet trace on the obstacle nodes.
        """
        nb, nd = self.umesh.size, self.gmesh.size
        rhs = np.zeros(nb + nd)
        rhs[:nb] = 2.0 * np.asarray(f_nodal, dtype=float)
        if g_nodal is not None:
            rhs[nb:] = 2.0 * np.asarray(g_nodal, dtype=float)
        sol = lu_solve(self.lu, rhs)
        return sol[:nb], sol[nb:]

    def outer_neumann(self, psi_outer, wpsi_obstacle):
        """Normal derivative of the solution on the outer nodes."""
        return 0.5 * (self.hyper @ psi_outer
                      + self.normal_single_to_outer @ wpsi_obstacle) / self.umesh.speeds

    def dtn_matrix(self, tag="obstacle"):
        nb, nd = self.umesh.size, self.gmesh.size
        rhs = np.zeros((nb + nd, nb))
        rhs[:nb, :] = np.eye(nb)
        sol = lu_solve(self.lu, rhs)
        mat = (self.hyper @ sol[:nb] + self.normal_single_to_outer @ sol[nb:]) \
            / self.umesh.speeds[:, None]
        return DtnMatrix(mat, self.umesh.quad_weights.copy(), tag)

    def obstacle_neumann(self, psi_outer, wpsi_obstacle, alpha0):
        """Regularized normal derivative of the solution on the obstacle nodes.

        The raw nodal values carry a factor w'(s_j) that vanishes toward the
        corners; dividing by (alpha0 + w') instead of w' keeps the corner
        nodes bounded while leaving mid-panel nodes essentially untouched.
        """
        if alpha0 <= 0:
            raise ConfigError(f"trace regularization alpha0 must be positive, got {alpha0}")
        w = self.gmesh.wprime
        speeds = self.gmesh.speeds
        weighted = (w * (self.hyper_to_obstacle @ psi_outer)
                    + w * (self.normal_single_obstacle @ wpsi_obstacle)
                    - speeds * wpsi_obstacle)
        return 0.5 * weighted / (speeds * (alpha0 + w))

    def eval_interior(self, psi_outer, wpsi_obstacle, points):
        check_evaluation_clearance(self.umesh, self.gmesh, points,
                                   self.outer_center, self.outer_radius)
        u = _double_layer_potential(self.umesh, psi_outer, points)
        pts = np.asarray(points, dtype=float)
        diff = pts[..., None, :] - self.gmesh.points
        r = np.linalg.norm(diff, axis=-1)
        kern = -INV_TWO_PI * np.log(r)
        u = u + (np.pi / self.gmesh.n_half) * kern @ (self.gmesh.speeds * wpsi_obstacle)
        return u


def _double_layer_potential(mesh, psi, points):
    pts = np.asarray(points, dtype=float)
    diff = pts[..., None, :] - mesh.points
    r2 = np.sum(diff * diff, axis=-1)
    nu = mesh.d1[:, ::-1] * np.array([1.0, -1.0])  # (x2', -x1') per node
    kern = INV_TWO_PI * np.einsum("...jk,jk->...j", diff, nu) / r2
    return (np.pi / mesh.n_half) * kern @ psi


def check_evaluation_clearance(umesh, gmesh, points, outer_center, outer_radius):
    """Refuse interior evaluation points inside two mesh spacings of a boundary."""
    pts = np.asarray(points, dtype=float)
    rad = np.linalg.norm(pts - np.asarray(outer_center, dtype=float), axis=-1)
    band_outer = 2.0 * np.pi * outer_radius / umesh.n_half
    if np.any(rad >= outer_radius - band_outer):
        raise NumericalError("evaluation point inside the outer-boundary clearance band")
    if gmesh is not None:
        gaps = np.linalg.norm(np.diff(gmesh.points, axis=0), axis=1)
        band_obst = 2.0 * float(gaps.max())
        if np.any(gmesh.poly.distance(pts) <= band_obst):
            raise NumericalError("evaluation point inside the obstacle clearance band")


def dtn_sampling_disk(umesh, center, radius, sides=64, n_half=None, grading_p=2.0):
    """DtN map of a sampling disk, realized as an inscribed regular polygon.

    One code path serves circles and polygons alike; the polygonization
    error is far below the indicator resolution (see the annulus oracle).
    """
    if n_half is None:
        n_half = sides
    poly = regular_polygon(center, radius, sides)
    gmesh = GradedMesh(poly, n_half, grading_p)
    return ObstacleSolver(umesh, gmesh).dtn_matrix(tag=f"sampler:{center[0]},{center[1]},{radius}")


def trig_interpolate(values, factor):
    """Evaluate the trigonometric interpolant of periodic samples on a mesh
    refined by an integer factor; the original samples are reproduced."""
    values = np.asarray(values, dtype=float)
    if factor == 1:
        return values.copy()
    m = len(values)
    spec = np.fft.rfft(values)
    if m % 2 == 0:
        spec = spec.copy()
        spec[-1] *= 0.5  # split the Nyquist bin symmetrically
    return np.fft.irfft(spec, n=factor * m) * factor


def synthesize_cauchy(outer_curve, poly, f_of_t, gamma, delta, seed,
                      n_half_outer, n_half_obstacle, grading_p=2.0,
                      fine_factor=2, outer_radius=None):
    """Generate one synthetic Cauchy pair on the outer boundary.

    By default the forward solve runs on meshes refined by fine_factor and
    is then restricted to the reporting mesh (whose nodes are a subset), so
    the inversion never sees data produced at its own resolution.  The
    Dirichlet datum of the experiment is the trigonometric interpolant of
    its reporting-mesh samples: boundary data are specified by their knot
    values, and a band-limited truth keeps the restriction free of
    aliasing, which would otherwise corrupt the deep spectral coefficients
    every indicator divides by.  Noise is multiplicative and uniform per
    node: g -> g * (1 + delta * zeta).
    """
    if delta < 0:
        raise ConfigError(f"noise ratio must be nonnegative, got {delta}")
    if fine_factor < 1:
        raise ConfigError(f"fine_factor must be >= 1, got {fine_factor}")
    coarse_t = np.pi * np.arange(2 * n_half_outer) / n_half_outer
    f_nodal = np.asarray(f_of_t(coarse_t), dtype=float)
    fine_u = UniformMesh(outer_curve, fine_factor * n_half_outer)
    fine_g = GradedMesh(poly, fine_factor * n_half_obstacle, grading_p)
    solver = ObstacleSolver(fine_u, fine_g)
    psi_outer, wpsi = solver.densities(trig_interpolate(f_nodal, fine_factor))
    flux_fine = solver.outer_neumann(psi_outer, wpsi)

    neumann = gamma * flux_fine[::fine_factor]
    if delta > 0:
        rng = np.random.default_rng(seed)
        zeta = rng.uniform(-1.0, 1.0, size=neumann.size)
        neumann = neumann * (1.0 + delta * zeta)
    if outer_radius is None:
        outer_radius = float(np.sum(fine_u.quad_weights)) / (2.0 * np.pi)
    return CauchyPair(dirichlet=f_nodal, neumann=neumann, noise_ratio=delta,
                      rng_seed=seed, outer_radius=float(outer_radius),
                      n_half=n_half_outer, gamma_true=gamma)
