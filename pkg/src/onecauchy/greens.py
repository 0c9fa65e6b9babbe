"""Laplace fundamental solution and the Dirichlet Green's function of a disk.

The disk Green's function is realized by the method of images: reflecting
the source across the circle gives a closed form that vanishes identically
on the boundary, so no boundary-value solve is ever needed for it.
"""

import numpy as np

from .errors import GeometryError

INV_TWO_PI = 1.0 / (2.0 * np.pi)


def fundamental_solution(x, y):
    """Free-space kernel (1/2pi)*ln(1/|x-y|).

    Broadcasts over leading axes; raises on coincident points.
    """
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.linalg.norm(diff, axis=-1)
    if np.any(r == 0.0):
        raise ValueError("singular evaluation: coincident points")
    return -INV_TWO_PI * np.log(r)


class DiskGreens:
    """Green's function of the Laplacian on a disk, zero Dirichlet trace."""

    def __init__(self, center, radius):
        if radius <= 0:
            raise GeometryError(f"disk radius must be positive, got {radius}")
        self.center = np.array(center, dtype=float).reshape(2)
        self.radius = float(radius)
        self.center.setflags(write=False)

    def _image(self, y):
        """Reflected source point; None when y sits at the center."""
        off = y - self.center
        d = np.linalg.norm(off)
        if d >= self.radius:
            raise GeometryError("source point must lie strictly inside the disk")
        if d == 0.0:
            return None, 0.0
        return self.center + off * (self.radius / d) ** 2, d

    def value(self, x, y):
        """K(x, y) for x anywhere in the closed disk, y strictly interior."""
        y = np.asarray(y, dtype=float).reshape(2)
        x = np.asarray(x, dtype=float)
        ystar, d = self._image(y)
        rx = np.linalg.norm(x - y, axis=-1)
        if np.any(rx == 0.0):
            raise ValueError("singular evaluation: coincident points")
        if ystar is None:
            # centered source: the image recedes to infinity, leaving ln(R/|x-c|)
            rc = np.linalg.norm(x - self.center, axis=-1)
            return INV_TWO_PI * (np.log(self.radius) - np.log(rc))
        rstar = np.linalg.norm(x - ystar, axis=-1)
        return INV_TWO_PI * (np.log(d * rstar) - np.log(self.radius * rx))

    def gradient_x(self, x, y):
        """Gradient of K(., y) with respect to the first argument."""
        y = np.asarray(y, dtype=float).reshape(2)
        x = np.asarray(x, dtype=float)
        ystar, _ = self._image(y)
        dx = x - y
        g = -dx / np.sum(dx * dx, axis=-1, keepdims=True)
        if ystar is None:
            return INV_TWO_PI * g
        dxs = x - ystar
        g = g + dxs / np.sum(dxs * dxs, axis=-1, keepdims=True)
        return INV_TWO_PI * g

    def normal_trace(self, z, mesh):
        """Outward normal derivative of K(., z) sampled at boundary mesh nodes.

        This is the probe vector of the point-sampling indicator; z must be
        strictly interior.
        """
        z = np.asarray(z, dtype=float).reshape(2)
        if np.linalg.norm(z - self.center) >= self.radius:
            raise GeometryError("probe point must lie strictly inside the disk")
        nu = (mesh.points - self.center) / self.radius
        grad = self.gradient_x(mesh.points, z)
        return np.sum(grad * nu, axis=1)
