"""Boundary parametrizations and the quadrature meshes built on them.

Two kinds of boundaries appear: smooth closed curves (the outer disk and
auxiliary sampling disks) carried by ``SmoothCurve``, and closed polygons
carried by ``PolygonBoundary``.  Smooth curves get uniform trigonometric
meshes; polygons get meshes graded toward the corners through a polynomial
substitution so that the corner singularities of the densities are resolved.
"""

import numpy as np

from .errors import ConfigError, GeometryError

TWO_PI = 2.0 * np.pi


def wrap_angle(t):
    """Wrap parameter values into [0, 2*pi)."""
    return np.mod(t, TWO_PI)


class SmoothCurve:
    """Closed analytic curve with a regular 2*pi-periodic parametrization.

    Parameters
    ----------
    param, deriv1, deriv2, deriv3 : callable
        Vectorized maps from parameter values of shape (...,) to points /
        derivative vectors of shape (..., 2).  deriv1 must never vanish.
    """

    closed = True

    def __init__(self, param, deriv1, deriv2, deriv3):
        self.param = param
        self.deriv1 = deriv1
        self.deriv2 = deriv2
        self.deriv3 = deriv3

    def speed(self, t):
        return np.linalg.norm(self.deriv1(t), axis=-1)


def circle_curve(center, radius):
    """Circle of given center and radius, positively oriented."""
    if radius <= 0:
        raise GeometryError(f"circle radius must be positive, got {radius}")
    cx, cy = float(center[0]), float(center[1])
    r = float(radius)

    def _vec(fx, fy):
        def eval_at(t):
            t = np.asarray(t, dtype=float)
            return np.stack([fx(t), fy(t)], axis=-1)
        return eval_at

    param = _vec(lambda t: cx + r * np.cos(t), lambda t: cy + r * np.sin(t))
    d1 = _vec(lambda t: -r * np.sin(t), lambda t: r * np.cos(t))
    d2 = _vec(lambda t: -r * np.cos(t), lambda t: -r * np.sin(t))
    d3 = _vec(lambda t: r * np.sin(t), lambda t: -r * np.cos(t))
    return SmoothCurve(param, d1, d2, d3)


def kite_curve(center=(2.0, 1.0)):
    """Kite-shaped closed curve, the usual non-convex benchmark obstacle."""
    cx, cy = float(center[0]), float(center[1])

    def _vec(fx, fy):
        def eval_at(t):
            t = np.asarray(t, dtype=float)
            return np.stack([fx(t), fy(t)], axis=-1)
        return eval_at

    param = _vec(lambda t: cx + 0.5 * (np.cos(t) + 0.65 * np.cos(2 * t) - 0.65),
                 lambda t: cy + 0.75 * np.sin(t))
    d1 = _vec(lambda t: 0.5 * (-np.sin(t) - 1.3 * np.sin(2 * t)),
              lambda t: 0.75 * np.cos(t))
    d2 = _vec(lambda t: 0.5 * (-np.cos(t) - 2.6 * np.cos(2 * t)),
              lambda t: -0.75 * np.sin(t))
    d3 = _vec(lambda t: 0.5 * (np.sin(t) + 5.2 * np.sin(2 * t)),
              lambda t: -0.75 * np.cos(t))
    return SmoothCurve(param, d1, d2, d3)


class PolygonBoundary:
    """Closed polygon with corners listed counterclockwise.

    The parametrization traverses edge ``l`` (from corner l to corner l+1)
    linearly as t runs over [2*l*pi/N, 2*(l+1)*pi/N), so parameter
    2*l*pi/N lands exactly on corner l.
    """

    closed = True

    def __init__(self, corners):
        corners = np.array(corners, dtype=float).reshape(-1, 2)
        n = len(corners)
        if n < 3:
            raise GeometryError(f"polygon needs at least 3 corners, got {n}")
        edges = np.roll(corners, -1, axis=0) - corners
        edge_len = np.linalg.norm(edges, axis=1)
        if np.any(edge_len < 1e-14):
            raise GeometryError("polygon has coincident consecutive corners")
        area2 = np.sum(corners[:, 0] * np.roll(corners[:, 1], -1)
                       - np.roll(corners[:, 0], -1) * corners[:, 1])
        if area2 <= 0.0:
            raise GeometryError("polygon corners must be ordered counterclockwise")
        self.corners = corners
        self.n_corners = n
        self.edges = edges
        self.edge_lengths = edge_len
        # constant parametrization velocity on each edge
        self.edge_speeds = edge_len * n / TWO_PI
        # outward unit normal of each edge (tangent rotated clockwise)
        self.edge_normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / edge_len[:, None]
        self.corners.setflags(write=False)

    def panel_of(self, t):
        """Index of the edge containing parameter t (wrapped)."""
        t = wrap_angle(np.asarray(t, dtype=float))
        idx = np.floor(t * self.n_corners / TWO_PI).astype(int)
        return np.clip(idx, 0, self.n_corners - 1)

    def param(self, t):
        t = wrap_angle(np.asarray(t, dtype=float))
        idx = self.panel_of(t)
        frac = t * self.n_corners / TWO_PI - idx
        return self.corners[idx] + frac[..., None] * self.edges[idx]

    def deriv1(self, t):
        idx = self.panel_of(t)
        return self.edges[idx] * (self.n_corners / TWO_PI)

    def deriv2(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(t.shape + (2,))

    def speed(self, t):
        return self.edge_speeds[self.panel_of(t)]

    def normal(self, t):
        """Outward unit normal of the edge containing t (undefined at corners)."""
        return self.edge_normals[self.panel_of(t)]

    def perimeter(self):
        return float(np.sum(self.edge_lengths))

    def contains(self, points):
        """Even-odd crossing test; points of shape (..., 2), corners excluded."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        a = self.corners
        b = np.roll(self.corners, -1, axis=0)
        inside = np.zeros(len(flat), dtype=bool)
        for (ax, ay), (bx, by) in zip(a, b):
            cond = (ay > flat[:, 1]) != (by > flat[:, 1])
            with np.errstate(divide="ignore", invalid="ignore"):
                xcross = ax + (flat[:, 1] - ay) * (bx - ax) / (by - ay)
            inside ^= cond & (flat[:, 0] < xcross)
        return inside.reshape(pts.shape[:-1])

    def distance(self, points):
        """Euclidean distance from points of shape (..., 2) to the boundary."""
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, 2)
        best = np.full(len(flat), np.inf)
        for a, e, L in zip(self.corners, self.edges, self.edge_lengths):
            rel = flat - a
            proj = np.clip((rel @ e) / L**2, 0.0, 1.0)
            foot = a + proj[:, None] * e
            best = np.minimum(best, np.linalg.norm(flat - foot, axis=1))
        return best.reshape(pts.shape[:-1])


def regular_polygon(center, radius, sides, phase=0.0):
    """Regular polygon inscribed in the circle (center, radius)."""
    if radius <= 0:
        raise GeometryError(f"polygon radius must be positive, got {radius}")
    ang = phase + TWO_PI * np.arange(sides) / sides
    pts = np.stack([center[0] + radius * np.cos(ang),
                    center[1] + radius * np.sin(ang)], axis=1)
    return PolygonBoundary(pts)


def polygonize(curve, sides):
    """Inscribe a polygon in a smooth curve by sampling uniformly in parameter."""
    t = TWO_PI * np.arange(sides) / sides
    return PolygonBoundary(curve.param(t))


def grading_profile(sigma, p):
    """Polynomial grading substitution on one panel, pulled back to [0, 2*pi].

    Returns the substituted parameter and its derivative; both vanish to
    order p-1 at the endpoints, which is what clusters quadrature nodes
    toward the panel ends.
    """
    if p < 2:
        raise ConfigError(f"grading exponent must be >= 2, got {p}")
    sigma = np.asarray(sigma, dtype=float)

    def v(s):
        return (1.0 / p - 0.5) * ((np.pi - s) / np.pi) ** 3 \
            + (s - np.pi) / (p * np.pi) + 0.5

    def v_prime(s):
        return -3.0 * (1.0 / p - 0.5) * (np.pi - s) ** 2 / np.pi**3 + 1.0 / (p * np.pi)

    va, vb = v(sigma), v(TWO_PI - sigma)
    a = va**p
    b = vb**p
    denom = a + b
    w = TWO_PI * a / denom
    w_prime = TWO_PI * p * (va ** (p - 1) * v_prime(sigma) * b
                            + a * vb ** (p - 1) * v_prime(TWO_PI - sigma)) / denom**2
    return w, w_prime


def graded_substitution(s, n_corners, p):
    """Map a global parameter through the per-panel grading.

    Each corner panel [2*l*pi/N, 2*(l+1)*pi/N) is mapped bijectively onto
    itself; the derivative vanishes at panel ends so nodes accumulate at
    the corners.  Returns (w(s), w'(s)).
    """
    s = wrap_angle(np.asarray(s, dtype=float))
    idx = np.clip(np.floor(s * n_corners / TWO_PI).astype(int), 0, n_corners - 1)
    sigma = s * n_corners - TWO_PI * idx
    sigma = np.clip(sigma, 0.0, TWO_PI)
    w_local, w_prime = grading_profile(sigma, p)
    return (TWO_PI * idx + w_local) / n_corners, w_prime


class UniformMesh:
    """Equispaced parameter nodes t_j = j*pi/n_half on a smooth curve."""

    def __init__(self, curve, n_half):
        if n_half < 1:
            raise ConfigError(f"n_half must be positive, got {n_half}")
        self.curve = curve
        self.n_half = int(n_half)
        self.t = np.pi * np.arange(2 * self.n_half) / self.n_half
        self.points = curve.param(self.t)
        self.d1 = curve.deriv1(self.t)
        self.d2 = curve.deriv2(self.t)
        self.d3 = curve.deriv3(self.t)
        self.speeds = np.linalg.norm(self.d1, axis=1)
        if np.any(self.speeds <= 0):
            raise GeometryError("parametrization is not regular at a mesh node")
        for arr in (self.t, self.points, self.d1, self.d2, self.d3, self.speeds):
            arr.setflags(write=False)

    @property
    def size(self):
        return 2 * self.n_half

    @property
    def quad_weights(self):
        """Arc-length trapezoidal weights (pi/n_half)*|x'(t_j)|."""
        return (np.pi / self.n_half) * self.speeds


class GradedMesh:
    """Corner-graded parameter nodes t_j = w(s_j) on a polygon.

    The collocation grid s_j = pi/(2n) + j*pi/n is uniform and offset by a
    half spacing, so no node ever lands on a corner; the substitution w
    supplies the clustering and its derivative w'(s_j) enters the assembled
    systems as the diagonal weight matrix.
    """

    def __init__(self, poly, n_half, grading_p=2.0):
        n = int(n_half)
        N = poly.n_corners
        if n < 1:
            raise ConfigError(f"n_half must be positive, got {n}")
        if n % N != 0:
            raise ConfigError(
                f"n_half={n} is not divisible by the corner count N={N}")
        self.poly = poly
        self.n_half = n
        self.grading_p = float(grading_p)
        self.s = np.pi / (2 * n) + np.pi * np.arange(2 * n) / n
        self.t, self.wprime = graded_substitution(self.s, N, self.grading_p)
        if np.any(self.wprime <= 0):
            raise GeometryError("grading derivative must stay positive at nodes")
        if np.any(np.diff(self.t) <= 0):
            raise GeometryError("graded nodes are not strictly increasing")
        self.points = poly.param(self.t)
        self.d1 = poly.deriv1(self.t)
        self.d2 = poly.deriv2(self.t)
        self.speeds = poly.speed(self.t)
        self.normals = poly.normal(self.t)
        self.panel = poly.panel_of(self.t)
        for arr in (self.s, self.t, self.wprime, self.points, self.d1,
                    self.d2, self.speeds, self.normals, self.panel):
            arr.setflags(write=False)

    @property
    def size(self):
        return 2 * self.n_half


def build_mesh(boundary, n_half, grading_p=2.0):
    """Uniform mesh for smooth curves, graded mesh for polygons."""
    if isinstance(boundary, PolygonBoundary):
        return GradedMesh(boundary, n_half, grading_p)
    return UniformMesh(boundary, n_half)
