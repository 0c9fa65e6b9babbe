"""Delimited output and figure rendering for the reconstruction pipelines.

Every CSV starts with '#' comment lines naming the schema, the units, and
the hash of the generating config, followed by a column-header row.  Floats
are written with shortest round-trip precision so outputs are byte-stable
across runs.  Figures are rendered next to the CSVs with matplotlib (Agg).
"""

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError  # noqa: E402
from .forward import CauchyPair  # noqa: E402


def fmt(x):
    """Shortest decimal that round-trips the float."""
    return repr(float(x))


def color_scalars(values):
    """Map values affinely onto [-1, 1]; a flat family maps to all zeros."""
    values = np.asarray(values, dtype=float)
    vmin, vmax = values.min(), values.max()
    if vmax == vmin:
        return np.zeros_like(values)
    return 2.0 * (values - vmin) / (vmax - vmin) - 1.0


def rgb_ramp(v):
    """Green-anchored diverging ramp: -1 -> blue, 0 -> green, +1 -> red."""
    v = float(v)
    if v >= 0.0:
        return (v, 1.0 - v, 0.0)
    return (0.0, 1.0 + v, -v)


def _log10_or_neg_inf(values):
    values = np.asarray(values, dtype=float)
    out = np.full_like(values, -np.inf)
    np.log10(values, out=out, where=values > 0)
    return out


def write_cauchy_csv(path, pair, config_hash="", label=""):
    gamma = "none" if pair.gamma_true is None else fmt(pair.gamma_true)
    seed = "none" if pair.rng_seed is None else str(int(pair.rng_seed))
    t = np.pi * np.arange(2 * pair.n_half) / pair.n_half
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# onecauchy cauchy-pair v1\n")
        fh.write(f"# config_hash={config_hash} label={label}\n")
        fh.write(f"# R={fmt(pair.outer_radius)} n_half={pair.n_half} gamma={gamma} "
                 f"delta={fmt(pair.noise_ratio)} seed={seed}\n")
        fh.write("# units: t radians in [0,2pi); f Dirichlet trace; "
                 "g = gamma * outward normal derivative\n")
        fh.write("node_index,t,f,g\n")
        for j in range(2 * pair.n_half):
            fh.write(f"{j},{fmt(t[j])},{fmt(pair.dirichlet[j])},{fmt(pair.neumann[j])}\n")


def read_cauchy_csv(path):
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        key, _, value = token.partition("=")
                        meta[key] = value
                continue
            if line.startswith("node_index"):
                continue
            rows.append(line.split(","))
    required = ("R", "n_half", "delta")
    for key in required:
        if key not in meta:
            raise ConfigError(f"{path}: missing {key} in the cauchy-pair header")
    f = np.array([float(r[2]) for r in rows])
    g = np.array([float(r[3]) for r in rows])
    n_half = int(meta["n_half"])
    if len(f) != 2 * n_half:
        raise ConfigError(f"{path}: expected {2 * n_half} rows, found {len(f)}")
    gamma = None if meta.get("gamma", "none") == "none" else float(meta["gamma"])
    seed = None if meta.get("seed", "none") == "none" else int(meta["seed"])
    return CauchyPair(dirichlet=f, neumann=g, noise_ratio=float(meta["delta"]),
                      rng_seed=seed, outer_radius=float(meta["R"]),
                      n_half=n_half, gamma_true=gamma)


def write_indicator_csv(path, field, config_hash="", extra=None):
    """One row per sample; layout depends on the field kind."""
    logs = _log10_or_neg_inf(field.values)
    meta = " ".join(f"{k}={v}" for k, v in sorted(field.metadata.items()))
    extra = extra or {}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# onecauchy indicator-field v1 kind={field.kind}\n")
        fh.write(f"# config_hash={config_hash} {meta}\n")
        if field.kind == "tau":
            fh.write("# units: tau dimensionless; indicator nonnegative\n")
            cols = ["tau", "indicator", "log10_indicator"]
            data = [field.samples, field.values, logs]
        elif field.kind == "points":
            fh.write("# units: x,y in plane coordinates; indicator nonnegative\n")
            cols = ["x", "y", "indicator", "log10_indicator"]
            data = [field.samples[:, 0], field.samples[:, 1], field.values, logs]
        elif field.kind == "disks":
            fh.write("# units: center/radius in plane coordinates; indicator nonnegative\n")
            cols = ["center_x", "center_y", "radius", "indicator", "log10_indicator"]
            data = [field.samples[:, 0], field.samples[:, 1], field.samples[:, 2],
                    field.values, logs]
        else:
            raise ConfigError(f"unknown indicator field kind {field.kind!r}")
        for name, values in extra.items():
            cols.append(name)
            data.append(np.asarray(values, dtype=float))
        fh.write(",".join(cols) + "\n")
        for i in range(len(field.values)):
            fh.write(",".join(fmt(col[i]) for col in data) + "\n")


def write_newton_csv(path, state, config_hash="", alpha=None, alpha0=None):
    total = max(state.iterations, 1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# onecauchy newton-history v1\n")
        fh.write(f"# config_hash={config_hash} alpha={alpha} alpha0={alpha0} "
                 f"total_iterations={state.iterations} aborted={state.aborted}\n")
        if state.aborted:
            fh.write(f"# abort_reason={state.abort_reason!r}\n")
        fh.write("# units: x,y plane coordinates; residual weighted L2 on the outer boundary; "
                 "color_scalar in [-1,1] encodes the iteration index\n")
        fh.write("iteration,corner_index,x,y,residual,color_scalar\n")
        for m, (corners, residual) in enumerate(zip(state.corners_history, state.residuals)):
            scalar = 2.0 * m / total - 1.0
            for idx, (x, y) in enumerate(corners):
                fh.write(f"{m},{idx},{fmt(x)},{fmt(y)},{fmt(residual)},{fmt(scalar)}\n")


# -- figures ----------------------------------------------------------------


def _outer_circle_artist(ax, center, radius):
    ax.add_patch(plt.Circle(tuple(center), radius, fill=False, color="red", lw=1.2))
    ax.set_aspect("equal")
    ax.set_xlim(center[0] - 1.1 * radius, center[0] + 1.1 * radius)
    ax.set_ylim(center[1] - 1.1 * radius, center[1] + 1.1 * radius)


def plot_gamma_scan(field, gamma_hat, path, gamma_true=None):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(field.samples, field.values, "k.-", ms=4, lw=0.8)
    ax.axvline(gamma_hat, color="tab:blue", lw=1.0, label=f"estimate {gamma_hat:g}")
    if gamma_true is not None:
        ax.axvline(gamma_true, color="red", lw=1.0, ls="--", label=f"true {gamma_true:g}")
    ax.set_xlabel("tau")
    ax.set_ylabel("indicator")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_disk_families(families, center, radius, path, poly=None):
    """families: list of (samples (m,3), color scalars (m,)) drawn as circles."""
    fig, ax = plt.subplots(figsize=(5, 5))
    _outer_circle_artist(ax, center, radius)
    for samples, scalars in families:
        for (cx, cy, r), v in zip(samples, scalars):
            ax.add_patch(plt.Circle((cx, cy), r, fill=False,
                                    color=rgb_ramp(v), lw=0.8))
    if poly is not None:
        closed = np.vstack([poly.corners, poly.corners[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "k-", lw=1.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_newton(state, center, radius, path, true_corners=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    _outer_circle_artist(ax, center, radius)
    total = max(state.iterations, 1)
    for m, corners in enumerate(state.corners_history):
        closed = np.vstack([corners, corners[:1]])
        if m == 0:
            ax.plot(closed[:, 0], closed[:, 1], "--", color="0.4", lw=1.0)
        else:
            ax.plot(closed[:, 0], closed[:, 1], "-",
                    color=rgb_ramp(2.0 * m / total - 1.0), lw=0.9)
    if true_corners is not None:
        true_corners = np.asarray(true_corners, dtype=float)
        ax.plot(true_corners[:, 0], true_corners[:, 1], "k.", ms=8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cauchy_pair(pair, path):
    t = np.pi * np.arange(2 * pair.n_half) / pair.n_half
    fig, axes = plt.subplots(2, 1, figsize=(6, 4), sharex=True)
    axes[0].plot(t, pair.dirichlet, "k.-", ms=3, lw=0.7)
    axes[0].set_ylabel("f")
    axes[1].plot(t, pair.neumann, "b.-", ms=3, lw=0.7)
    axes[1].set_ylabel("g")
    axes[1].set_xlabel("t (radians)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_point_indicator(field, center, radius, path, poly=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    pts = field.samples
    logs = _log10_or_neg_inf(field.values)
    finite = np.isfinite(logs)
    sc = ax.scatter(pts[finite, 0], pts[finite, 1], c=logs[finite], s=12,
                    cmap="viridis", marker="s")
    fig.colorbar(sc, ax=ax, label="log10 indicator")
    _outer_circle_artist(ax, center, radius)
    if poly is not None:
        closed = np.vstack([poly.corners, poly.corners[:1]])
        ax.plot(closed[:, 0], closed[:, 1], "k-", lw=1.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
