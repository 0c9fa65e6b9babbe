"""Conductivity and polygonal-obstacle recovery from a single Cauchy pair.

Boundary-integral forward solvers on a disk-with-obstacle geometry,
discrete Dirichlet-to-Neumann maps, Picard-series sampling indicators, and
a Tikhonov-regularized Newton refinement of the obstacle corners.
"""

from .errors import ConfigError, GeometryError, NumericalError
from .geometry import (GradedMesh, PolygonBoundary, SmoothCurve, UniformMesh,
                       build_mesh, circle_curve, graded_substitution, kite_curve,
                       polygonize, regular_polygon)
from .greens import DiskGreens, fundamental_solution
from .forward import (CauchyPair, DtnMatrix, EmptyDiskSolver, ObstacleSolver,
                      dtn_sampling_disk, synthesize_cauchy)
from .inversion import (IndicatorField, WeightedEigensystem, conductivity_scan,
                        domain_scan, estimate_gamma, picard_value,
                        point_indicator_field, weighted_eigs)
from .newton import (NewtonState, corner_basis_normal_components, domain_derivative,
                     extrapolated_corner_jacobian, forward_map, newton_run,
                     tikhonov_step)
from .config import ExperimentConfig

__version__ = "0.1.0"

__all__ = [
    "CauchyPair", "ConfigError", "DiskGreens", "DtnMatrix", "EmptyDiskSolver",
    "ExperimentConfig", "GeometryError", "GradedMesh", "IndicatorField",
    "NewtonState", "NumericalError", "ObstacleSolver", "PolygonBoundary",
    "SmoothCurve", "UniformMesh", "WeightedEigensystem", "build_mesh",
    "circle_curve", "conductivity_scan", "corner_basis_normal_components",
    "domain_derivative", "domain_scan", "dtn_sampling_disk", "estimate_gamma",
    "forward_map", "fundamental_solution", "graded_substitution", "kite_curve",
    "extrapolated_corner_jacobian", "newton_run", "picard_value",
    "point_indicator_field", "polygonize", "regular_polygon", "synthesize_cauchy",
    "tikhonov_step", "weighted_eigs",
]
