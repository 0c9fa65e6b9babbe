"""Picard-series sampling indicators built on one weighted eigendecomposition.

Everything here works with the difference of two discrete DtN maps on the
outer boundary.  The difference is self-adjoint with respect to the
arc-length inner product up to discretization error, so it is symmetrized
in the weighted similarity frame and the residual asymmetry is kept as a
diagnostic rather than an error.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError

PICARD_CAP = 1e30


@dataclass(frozen=True)
class WeightedEigensystem:
    """Kept eigenpairs of a DtN difference, orthonormal in the weighted product."""
    eigenvalues: np.ndarray     # descending |lambda|
    eigenvectors: np.ndarray    # columns, (m, kept)
    weights: np.ndarray
    cutoff_rel: float
    asymmetry: float            # weighted-symmetry residual of the input matrix

    @property
    def kept_count(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class IndicatorField:
    """Indicator values over a family of samples (points, taus, or disks)."""
    kind: str                  # "points" | "tau" | "disks"
    samples: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)


def weighted_inner(weights, f, g):
    """Discrete L2 inner product on the outer boundary."""
    return float(np.sum(weights * f * g))


def weighted_eigs(diff, weights=None, cutoff_rel=1e-8):
    """Eigendecomposition of a DtN difference in the weighted inner product.

    diff may be a DtnMatrix (weights taken from it) or a plain matrix with
    weights passed separately.  Eigenpairs with |lambda| below
    cutoff_rel * max|lambda| are discarded; they sit at or below the
    discretization/noise floor and would wreck the Picard series.
    """
    if hasattr(diff, "matrix"):
        weights = diff.quad_weights if weights is None else weights
        mat = diff.matrix
    else:
        mat = np.asarray(diff, dtype=float)
    if weights is None:
        weights = np.ones(mat.shape[0])
    weights = np.asarray(weights, dtype=float)
    if not 0.0 < cutoff_rel < 1.0:
        raise ConfigError(f"cutoff_rel must lie in (0, 1), got {cutoff_rel}")

    dw_mat = weights[:, None] * mat
    scale = np.linalg.norm(dw_mat)
    if scale == 0.0:
        raise NumericalError("DtN difference vanishes; no spectrum to keep")
    asym = np.linalg.norm(dw_mat - dw_mat.T) / scale
    sqrt_w = np.sqrt(weights)
    sim = sqrt_w[:, None] * mat / sqrt_w[None, :]
    sym = 0.5 * (sim + sim.T)
    lam, vec = np.linalg.eigh(sym)
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    vec = vec[:, order]
    keep = np.abs(lam) >= cutoff_rel * np.abs(lam[0])
    if not np.any(keep):
        raise NumericalError("all eigenvalues fall below the spectral cutoff")
    lam = lam[keep]
    vec = vec[:, keep] / sqrt_w[:, None]
    return WeightedEigensystem(eigenvalues=lam, eigenvectors=vec,
                               weights=weights, cutoff_rel=float(cutoff_rel),
                               asymmetry=float(asym))


def picard_value(g, eig, cap=PICARD_CAP):
    """Inverse Picard series of a probe vector against the kept eigenpairs.

    Large values flag membership of the probe in the range of the square
    root of the decomposed operator; a vanishing series (probe orthogonal
    to everything kept) maps to the cap so fields stay plottable.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != eig.weights.shape:
        raise ConfigError(
            f"probe vector has {g.shape} entries, eigensystem mesh has {eig.weights.shape}")
    coeffs = eig.eigenvectors.T @ (eig.weights * g)
    series = np.sum(coeffs**2 / np.abs(eig.eigenvalues))
    if series <= 0.0:
        return cap
    return min(1.0 / series, cap)


def point_indicator_field(eig, greens, mesh, points):
    """Sampling indicator over interior probe points.

    Positive response localizes the obstacle: the probe trace lies in the
    tested range exactly when the point is inside.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    values = np.empty(len(pts))
    for i, z in enumerate(pts):
        trace = greens.normal_trace(z, mesh)
        values[i] = picard_value(trace, eig)
    return IndicatorField(kind="points", samples=pts, values=values,
                          metadata={"cutoff_rel": eig.cutoff_rel,
                                    "kept": eig.kept_count,
                                    "n_half": mesh.n_half})


def default_cutoff(noise_ratio):
    """Spectral cutoff tied to the data quality: noise floor if noisy."""
    return 1e-8 if noise_ratio == 0 else float(noise_ratio)


def conductivity_scan(pair, dtn_empty, dtn_omega, taus, cutoff_rel=None):
    """Scan the conductivity test parameter over a grid.

    For each tau the probe is (measured flux) - tau * (empty-disk DtN
    applied to the measured Dirichlet data); the scan peaks where tau
    matches the true conductivity.
    """
    taus = np.asarray(taus, dtype=float)
    if taus.size == 0:
        raise ConfigError("tau grid must not be empty")
    if cutoff_rel is None:
        cutoff_rel = default_cutoff(pair.noise_ratio)
    eig = weighted_eigs(dtn_omega.matrix - dtn_empty.matrix,
                        dtn_empty.quad_weights, cutoff_rel)
    base_flux = dtn_empty.matrix @ pair.dirichlet
    values = np.empty(taus.size)
    for i, tau in enumerate(taus):
        values[i] = picard_value(pair.neumann - tau * base_flux, eig)
    return IndicatorField(kind="tau", samples=taus, values=values,
                          metadata={"cutoff_rel": float(cutoff_rel),
                                    "kept": eig.kept_count,
                                    "asymmetry": eig.asymmetry,
                                    "n_half": pair.n_half})


def estimate_gamma(scan, flat_ratio=2.0):
    """Argmax of a conductivity scan with a tie-break toward the smaller tau.

    Returns (gamma_hat, diagnostics); a peak only marginally above the
    median marks the estimate low-confidence rather than failing.
    """
    if scan.values.size == 0:
        raise ConfigError("empty conductivity scan")
    best = np.max(scan.values)
    ties = np.flatnonzero(scan.values == best)
    gamma_hat = float(np.min(scan.samples[ties]))
    med = float(np.median(scan.values))
    ratio = float(np.inf) if med == 0 else best / med
    diagnostics = {
        "peak_to_median": ratio,
        "low_confidence": bool(ratio < flat_ratio),
        "peak_value": float(best),
    }
    return gamma_hat, diagnostics


def domain_scan(pair, gamma_hat, dtn_empty, disks, build_omega, cutoff_rel=None):
    """Containment scan over a family of sampling disks.

    build_omega(center, radius) must return the DtN map of that disk on the
    same outer mesh.  The probe (measured flux) - gamma_hat * (empty DtN
    applied to f) responds strongly for disks containing the obstacle.
    """
    if gamma_hat <= 0:
        raise ConfigError(f"gamma_hat must be positive, got {gamma_hat}")
    disks = np.asarray(disks, dtype=float).reshape(-1, 3)
    if cutoff_rel is None:
        cutoff_rel = default_cutoff(pair.noise_ratio)
    probe = pair.neumann - gamma_hat * (dtn_empty.matrix @ pair.dirichlet)
    values = np.empty(len(disks))
    for i, (cx, cy, radius) in enumerate(disks):
        dtn_omega = build_omega((cx, cy), radius)
        eig = weighted_eigs(dtn_omega.matrix - dtn_empty.matrix,
                            dtn_empty.quad_weights, cutoff_rel)
        values[i] = picard_value(probe, eig)
    return IndicatorField(kind="disks", samples=disks, values=values,
                          metadata={"cutoff_rel": float(cutoff_rel),
                                    "gamma_hat": float(gamma_hat),
                                    "n_half": pair.n_half})
