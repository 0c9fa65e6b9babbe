"""Dense Nystrom matrices for the boundary-integral operators.

On the outer circle: double-layer and hypersingular matrices on a uniform
mesh with trigonometric quadrature.  On the obstacle polygon: single-layer
matrix on the graded mesh with the logarithmic kernel split off and handled
by the dedicated periodic log-weights.  Cross blocks between the boundaries
have smooth kernels and use plain trapezoidal weights.

All trigonometric weight sums are evaluated by direct summation; matrices
here never exceed a few hundred rows so no acceleration is warranted.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

INV_TWO_PI = 1.0 / (2.0 * np.pi)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    kind: str
    row_tag: str
    col_tag: str

    @property
    def shape(self):
        return self.entries.shape


def log_kernel_weights(n_half, delta):
    """Periodic quadrature weights for the kernel ln(4 sin^2((s - s_j)/2)).

    delta is s - s_j; the rule integrates trigonometric densities of degree
    below n_half exactly against the log kernel.
    """
    n = int(n_half)
    delta = np.asarray(delta, dtype=float)
    m = np.arange(1, n)
    acc = np.cos(np.multiply.outer(delta, m)) @ (1.0 / m)
    return -(2.0 * np.pi / n) * acc - (np.pi / n**2) * np.cos(n * delta)


def hypersingular_weights(n_half, delta):
    """Periodic quadrature weights for the 1/(4*pi*sin^2((t - t_j)/2)) kernel."""
    n = int(n_half)
    delta = np.asarray(delta, dtype=float)
    m = np.arange(1, n)
    acc = np.cos(np.multiply.outer(delta, m)) @ m.astype(float)
    return -acc / n - 0.5 * np.cos(n * delta)


def _circulant(values):
    """Matrix C[i, j] = values[(i - j) mod len(values)]."""
    idx = np.arange(len(values))
    return values[(idx[:, None] - idx[None, :]) % len(values)]


def _rotated_tangents(d1):
    """(x2', -x1') per node: outward-scaled normals of a positively oriented curve."""
    return np.stack([d1[:, 1], -d1[:, 0]], axis=1)


def double_layer_outer(mesh):
    """Double-layer collocation matrix on the outer curve (2x-scaled operator)."""
    pts = mesh.points
    q = _rotated_tangents(mesh.d1)
    diff = pts[:, None, :] - pts[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    num = np.einsum("ijk,jk->ij", diff, q)
    np.fill_diagonal(r2, 1.0)
    kernel = num / (np.pi * r2)
    diag = np.einsum("ik,ik->i", mesh.d2, q) / (2.0 * np.pi * mesh.speeds**2)
    np.fill_diagonal(kernel, diag)
    entries = (np.pi / mesh.n_half) * kernel
    tag = f"uniform:{mesh.n_half}"
    return OperatorMatrix(entries, "double_layer_outer", tag, tag)


def hypersingular_outer(mesh):
    """Hypersingular (DtN numerator) matrix on the outer curve.

    Combines the periodic finite-part weights with the smooth remainder;
    needs third derivatives of the parametrization for the diagonal.
    """
    n = mesh.n_half
    pts = mesh.points
    q = _rotated_tangents(mesh.d1)
    dvec = np.pi * np.arange(2 * n) / n
    weight_mat = _circulant(hypersingular_weights(n, dvec))

    diff = pts[:, None, :] - pts[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    cosd = _circulant(np.cos(dvec))
    d1dot = mesh.d1 @ mesh.d1.T
    np.fill_diagonal(r2, 1.0)
    one_minus = 1.0 - cosd
    np.fill_diagonal(one_minus, 1.0)
    k_a = INV_TWO_PI * (2.0 * one_minus * d1dot - cosd * r2) / (one_minus * r2)
    speeds2 = mesh.speeds**2
    ka_diag = (np.einsum("ik,ik->i", mesh.d1, mesh.d3) / 6.0
               - np.einsum("ik,ik->i", mesh.d2, mesh.d2) / 4.0
               + 5.0 * speeds2 / 12.0) / (np.pi * speeds2)
    np.fill_diagonal(k_a, ka_diag)

    row_fac = np.einsum("ijk,ik->ij", diff, q)
    col_fac = np.einsum("ijk,jk->ij", diff, q)
    k_2 = -(2.0 / np.pi) * row_fac * col_fac / r2**2
    np.fill_diagonal(k_2, INV_TWO_PI * np.einsum("ik,ik->i", mesh.d2, q) ** 2 / speeds2**2)

    entries = weight_mat + (np.pi / n) * (k_a + k_2 - INV_TWO_PI)
    tag = f"uniform:{n}"
    return OperatorMatrix(entries, "hypersingular_outer", tag, tag)


def single_layer_obstacle(gmesh):
    """Single-layer collocation matrix on the graded obstacle mesh.

    The logarithmic singularity is split in the graded variable, so the
    diagonal picks up a ln w'(s) correction and every entry stays finite
    however small w' gets near the corners.
    """
    n = gmesh.n_half
    pts = gmesh.points
    speeds = gmesh.speeds
    dvec = np.pi * np.arange(2 * n) / n
    log_mat = _circulant(log_kernel_weights(n, dvec))

    diff = pts[:, None, :] - pts[None, :, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(r, 1.0)
    sin_half = np.sin(0.5 * dvec)
    log4sin2 = np.log(4.0 * sin_half**2, out=np.zeros_like(dvec), where=sin_half != 0.0)
    log4sin2_mat = _circulant(log4sin2)

    part1 = -speeds[None, :] * INV_TWO_PI
    part2 = -(speeds[None, :] / np.pi) * np.log(r) + speeds[None, :] * INV_TWO_PI * log4sin2_mat
    np.fill_diagonal(part2, -(speeds / np.pi) * np.log(gmesh.wprime * speeds))

    entries = log_mat * part1 + (np.pi / n) * part2
    tag = f"graded:{n}"
    return OperatorMatrix(entries, "single_layer_obstacle", tag, tag)


def coupling_blocks(umesh, gmesh, clearance_rel=1e-6):
    """All smooth-kernel blocks coupling the outer curve and the obstacle.

    Returns a dict with keys
      single_to_outer      : single layer of the obstacle, traced on the outer curve
      double_to_obstacle   : outer double layer, traced on the obstacle
      normal_single_to_outer : outer normal derivative of the obstacle single layer
      hyper_to_obstacle    : obstacle normal derivative of the outer double layer
      normal_single_obstacle : adjoint double layer on the obstacle itself

    Refuses to assemble when the boundaries come within clearance_rel of the
    outer radius of touching; the smooth-kernel quadratures degrade there.
    """
    bp = umesh.points
    dp = gmesh.points
    qb = _rotated_tangents(umesh.d1)
    qd = _rotated_tangents(gmesh.d1)
    nb, nd = umesh.n_half, gmesh.n_half

    outer_radius = float(np.sum(umesh.quad_weights)) / (2.0 * np.pi)
    center = bp.mean(axis=0)
    # |x| is convex along straight edges, so the vertices realize the maximum
    vertex_reach = np.linalg.norm(gmesh.poly.corners - center, axis=1).max()
    clearance = outer_radius - vertex_reach
    if clearance <= clearance_rel * outer_radius:
        raise GeometryError(
            f"obstacle too close to outer boundary: clearance {clearance:.3e} "
            f"<= {clearance_rel:.1e} * outer radius {outer_radius:.3e}")
    diff_bd = bp[:, None, :] - dp[None, :, :]          # outer row, obstacle col
    r2_bd = np.einsum("ijk,ijk->ij", diff_bd, diff_bd)
    dmin = np.sqrt(r2_bd.min())
    if dmin <= clearance_rel * outer_radius:
        raise GeometryError(
            f"obstacle too close to outer boundary: min node distance {dmin:.3e} "
            f"<= {clearance_rel:.1e} * outer radius {outer_radius:.3e}")

    utag = f"uniform:{nb}"
    gtag = f"graded:{nd}"

    # single layer of the obstacle evaluated on the outer curve
    m_db = (np.pi / nd) * (gmesh.speeds[None, :] / np.pi) * (-0.5) * np.log(r2_bd)
    single_to_outer = OperatorMatrix(m_db, "single_to_outer", utag, gtag)

    # outer double layer evaluated on the obstacle
    diff_db = dp[:, None, :] - bp[None, :, :]
    r2_db = np.einsum("ijk,ijk->ij", diff_db, diff_db)
    num = np.einsum("ijk,jk->ij", diff_db, qb)
    l_bd = (np.pi / nb) * num / (np.pi * r2_db)
    double_to_obstacle = OperatorMatrix(l_bd, "double_to_obstacle", gtag, utag)

    # outer normal derivative of the obstacle single layer
    num_h = np.einsum("ijk,ik->ij", -diff_bd, qb)      # (x(tau) - xb(t)) . q_b(t)
    h_db = (np.pi / nd) * (num_h / (np.pi * r2_bd)) * gmesh.speeds[None, :]
    normal_single_to_outer = OperatorMatrix(h_db, "normal_single_to_outer", utag, gtag)

    # obstacle normal derivative of the outer double layer
    row_fac = np.einsum("ijk,ik->ij", diff_db, qd)
    col_fac = np.einsum("ijk,jk->ij", diff_db, qb)
    qq = qd @ qb.T
    t_bd = (np.pi / nb) * (-(2.0 / np.pi) * row_fac * col_fac / r2_db**2
                           + qq / (np.pi * r2_db))
    hyper_to_obstacle = OperatorMatrix(t_bd, "hyper_to_obstacle", gtag, utag)

    # adjoint double layer on the obstacle (diagonal vanishes on straight panels)
    diff_dd = dp[:, None, :] - dp[None, :, :]
    r2_dd = np.einsum("ijk,ijk->ij", diff_dd, diff_dd)
    np.fill_diagonal(r2_dd, 1.0)
    num_d = np.einsum("ijk,ik->ij", -diff_dd, qd)
    h_d = (num_d / (np.pi * r2_dd)) * gmesh.speeds[None, :]
    np.fill_diagonal(h_d, np.einsum("ik,ik->i", gmesh.d2, qd) / (2.0 * np.pi * gmesh.speeds))
    normal_single_obstacle = OperatorMatrix((np.pi / nd) * h_d, "normal_single_obstacle", gtag, gtag)

    return {
        "single_to_outer": single_to_outer,
        "double_to_obstacle": double_to_obstacle,
        "normal_single_to_outer": normal_single_to_outer,
        "hyper_to_obstacle": hyper_to_obstacle,
        "normal_single_obstacle": normal_single_obstacle,
    }


def matrix_to_csv(op, path):
    """Debug dump: row-major entries, full precision, scientific notation."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# kind={op.kind} rows={op.row_tag} cols={op.col_tag} "
                 f"shape={op.shape[0]}x{op.shape[1]}\n")
        for row in op.entries:
            fh.write(",".join(f"{v:.17e}" for v in row) + "\n")
