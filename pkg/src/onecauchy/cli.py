"""Command-line front end.

Subcommands::

    selftest       run the analytic oracle battery
    synthesize     generate clean + noisy Cauchy pairs from a config
    recover-gamma  scan the conductivity test parameter against one pair
    locate         containment scans over families of sampling disks
    newton         corner-refinement iteration from an initial polygon

Exit codes: 0 success, 1 oracle/acceptance failure, 2 configuration error,
3 numerical abort.  Reports are CSVs plus matplotlib figures rendered next
to them (suppress with --no-plots).
"""

import argparse
import os
import sys

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, GeometryError, NumericalError
from .forward import EmptyDiskSolver, dtn_sampling_disk, synthesize_cauchy
from .geometry import UniformMesh, circle_curve
from .inversion import IndicatorField, conductivity_scan, domain_scan, estimate_gamma
from .newton import newton_run
from . import reporting

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="onecauchy",
        description="Conductivity and polygonal-obstacle recovery from one Cauchy pair")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap the BLAS thread pool")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("selftest", help="run the oracle battery")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config path")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override data.seed")
    common.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    sub.add_parser("synthesize", parents=[common],
                   help="generate synthetic Cauchy pairs")

    withdata = argparse.ArgumentParser(add_help=False, parents=[common])
    withdata.add_argument("--data", required=True, help="cauchy-pair CSV path")

    sub.add_parser("recover-gamma", parents=[withdata],
                   help="scan the conductivity parameter")
    sub.add_parser("locate", parents=[withdata],
                   help="sampling-disk containment scans")
    sub.add_parser("newton", parents=[withdata],
                   help="Newton corner refinement")
    return parser


def _load_config(args):
    cfg = ExperimentConfig.from_file(args.config).validate()
    os.makedirs(args.out, exist_ok=True)
    return cfg


def _outer_mesh_for(cfg, pair):
    center = cfg.get_point("geometry.center", np.zeros(2))
    curve = circle_curve(center, pair.outer_radius)
    return UniformMesh(curve, pair.n_half), center


def _resolve_gamma(cfg, args, section):
    key = f"{section}.gamma_hat"
    if key in cfg.entries:
        return cfg.get_float(key)
    handoff = os.path.join(args.out, "gamma_hat.txt")
    if os.path.exists(handoff):
        with open(handoff, "r", encoding="utf-8") as fh:
            return float(fh.read().strip())
    raise ConfigError(
        f"no conductivity estimate: set {key} or run recover-gamma into the same --out")


def cmd_selftest(_args):
    from .selftest import run_selftest

    ok, lines = run_selftest()
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_synthesize(args):
    cfg = _load_config(args)
    curve, _center, radius = cfg.outer_curve()
    poly = cfg.true_obstacle()
    f_of_t, f_desc = cfg.boundary_data()
    n_half = cfg.get_int("geometry.n_half_outer", 32)
    n_half_obst = cfg.get_int("geometry.n_half_obstacle", 32)
    grading_p = cfg.get_float("geometry.grading_p", 2.0)
    gamma = cfg.get_float("data.gamma", 1.0)
    delta = cfg.get_float("data.noise", 0.0)
    seed = args.seed if args.seed is not None else cfg.get_int("data.seed", 0)
    fine = cfg.get_int("data.fine_factor", 2) \
        if cfg.get_bool("data.anti_inverse_crime", True) else 1

    common = dict(outer_curve=curve, poly=poly, f_of_t=f_of_t, gamma=gamma,
                  n_half_outer=n_half, n_half_obstacle=n_half_obst,
                  grading_p=grading_p, fine_factor=fine, outer_radius=radius)
    clean = synthesize_cauchy(delta=0.0, seed=seed, **common)
    noisy = synthesize_cauchy(delta=delta, seed=seed, **common)

    chash = cfg.hash()
    clean_path = os.path.join(args.out, "cauchy_clean.csv")
    noisy_path = os.path.join(args.out, "cauchy_noisy.csv")
    reporting.write_cauchy_csv(clean_path, clean, chash, label=f"clean f={f_desc}")
    reporting.write_cauchy_csv(noisy_path, noisy, chash, label=f"noisy f={f_desc}")
    if not args.no_plots:
        reporting.plot_cauchy_pair(noisy, os.path.join(args.out, "fig_cauchy_pair.png"))
    print(f"wrote {clean_path} and {noisy_path}")
    return EXIT_OK


def cmd_recover_gamma(args):
    cfg = _load_config(args)
    pair = reporting.read_cauchy_csv(args.data)
    umesh, _center = _outer_mesh_for(cfg, pair)
    dtn_empty = EmptyDiskSolver(umesh).dtn_matrix()

    omega_center = cfg.get_point("gamma_scan.omega_center", np.zeros(2))
    omega_radius = cfg.get_float("gamma_scan.omega_radius", 3.0)
    sides = cfg.get_int("gamma_scan.omega_sides", 64)
    omega_n_half = cfg.get_int("gamma_scan.omega_n_half", sides)
    dtn_omega = dtn_sampling_disk(umesh, omega_center, omega_radius,
                                  sides=sides, n_half=omega_n_half)

    taus = cfg.get_grid("gamma_scan.tau_grid", "0, 2, 0.05")
    cutoff = cfg.get_float("gamma_scan.cutoff_rel", 0.0) or None
    field = conductivity_scan(pair, dtn_empty, dtn_omega, taus, cutoff)
    gamma_hat, diag = estimate_gamma(field)

    chash = cfg.hash()
    field.metadata.update(gamma_hat=gamma_hat,
                          peak_to_median=f"{diag['peak_to_median']:.6g}",
                          low_confidence=diag["low_confidence"])
    scan_path = os.path.join(args.out, "gamma_scan.csv")
    reporting.write_indicator_csv(scan_path, field, chash)
    with open(os.path.join(args.out, "gamma_hat.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"{gamma_hat!r}\n")
    if not args.no_plots:
        reporting.plot_gamma_scan(field, gamma_hat,
                                  os.path.join(args.out, "fig_gamma_scan.png"),
                                  gamma_true=pair.gamma_true)
    flag = " (low confidence)" if diag["low_confidence"] else ""
    print(f"gamma_hat = {gamma_hat!r}{flag}  peak/median = {diag['peak_to_median']:.3g}")
    print(f"wrote {scan_path}")
    return EXIT_OK


def cmd_locate(args):
    cfg = _load_config(args)
    pair = reporting.read_cauchy_csv(args.data)
    gamma_hat = _resolve_gamma(cfg, args, "locate")
    umesh, center = _outer_mesh_for(cfg, pair)
    dtn_empty = EmptyDiskSolver(umesh).dtn_matrix()
    sides = cfg.get_int("locate.disk_sides", 64)
    disk_n_half = cfg.get_int("locate.disk_n_half", sides)

    def build_omega(disk_center, disk_radius):
        return dtn_sampling_disk(umesh, disk_center, disk_radius,
                                 sides=sides, n_half=disk_n_half)

    chash = cfg.hash()
    poly_true = cfg.true_obstacle() if (
        "obstacle.kind" in cfg.entries or "obstacle.corners" in cfg.entries) else None

    # Approach 1: concentric radius sweeps around each listed center
    centers = cfg.get_points("locate.centers", np.array([[0.0, 0.0]]))
    radii = cfg.get_grid("locate.radius_grid", "0.5, 3.0, 0.1")
    fields = []
    families = []
    family_ids = []
    for fam, (cx, cy) in enumerate(centers):
        disks = np.column_stack([np.full(radii.size, cx), np.full(radii.size, cy), radii])
        field = domain_scan(pair, gamma_hat, dtn_empty, disks, build_omega)
        fields.append(field)
        families.append((disks, reporting.color_scalars(field.values)))
        family_ids.append(np.full(radii.size, float(fam)))
    combined = IndicatorField(
        kind="disks",
        samples=np.vstack([f.samples for f in fields]),
        values=np.concatenate([f.values for f in fields]),
        metadata=dict(fields[0].metadata, approach=1),
    )
    extra = {"color_scalar": np.concatenate([fam[1] for fam in families]),
             "family": np.concatenate(family_ids)}
    path1 = os.path.join(args.out, "locate_approach1.csv")
    reporting.write_indicator_csv(path1, combined, chash, extra)
    if not args.no_plots:
        reporting.plot_disk_families(families, center, pair.outer_radius,
                                     os.path.join(args.out, "fig_locate_approach1.png"),
                                     poly=poly_true)

    # Approach 2: fixed-radius disk grids over the search square
    r_list = cfg.get_floats("locate.approach2_r", np.array([1.0, 0.5, 0.25, 0.125]))
    fields2 = []
    families2 = []
    extra2 = {"color_scalar": [], "color_scalar_log": [], "family": []}
    for r in r_list:
        steps = int(round(2.0 / r))
        coords = -2.0 + 2.0 * r * np.arange(steps + 1)
        px, py = np.meshgrid(coords, coords, indexing="ij")
        disks = np.column_stack([px.ravel(), py.ravel(), np.full(px.size, r)])
        field = domain_scan(pair, gamma_hat, dtn_empty, disks, build_omega)
        fields2.append(field)
        families2.append((disks, reporting.color_scalars(field.values)))
        extra2["color_scalar"].append(reporting.color_scalars(field.values))
        with np.errstate(divide="ignore"):
            extra2["color_scalar_log"].append(
                reporting.color_scalars(np.log(np.maximum(field.values, 1e-300))))
        extra2["family"].append(np.full(px.size, float(r)))
    combined2 = IndicatorField(
        kind="disks",
        samples=np.vstack([f.samples for f in fields2]),
        values=np.concatenate([f.values for f in fields2]),
        metadata=dict(fields2[0].metadata, approach=2),
    )
    path2 = os.path.join(args.out, "locate_approach2.csv")
    reporting.write_indicator_csv(path2, combined2, chash,
                                  {k: np.concatenate(v) for k, v in extra2.items()})
    if not args.no_plots:
        reporting.plot_disk_families(families2, center, pair.outer_radius,
                                     os.path.join(args.out, "fig_locate_approach2.png"),
                                     poly=poly_true)
    print(f"wrote {path1} and {path2}")
    return EXIT_OK


def cmd_newton(args):
    cfg = _load_config(args)
    pair = reporting.read_cauchy_csv(args.data)
    gamma_hat = _resolve_gamma(cfg, args, "newton")
    umesh, center = _outer_mesh_for(cfg, pair)

    initial = cfg.get_points("newton.initial_corners")
    alpha = cfg.get_float("newton.alpha", 1e-3)
    alpha0 = cfg.get_float("newton.alpha0", 1e-4)
    max_iters = cfg.get_int("newton.max_iters", 20)
    n_half_obst = cfg.get_int("newton.n_half_obstacle",
                              cfg.get_int("geometry.n_half_obstacle", 32))
    grading_p = cfg.get_float("geometry.grading_p", 2.0)

    state = newton_run(initial, pair, umesh, gamma_hat, n_half_obst,
                       alpha, alpha0, max_iters, grading_p,
                       outer_center=center)

    chash = cfg.hash()
    hist_path = os.path.join(args.out, "newton_history.csv")
    reporting.write_newton_csv(hist_path, state, chash, alpha=alpha, alpha0=alpha0)
    if not args.no_plots:
        true_corners = cfg.get_points("obstacle.corners", None)
        reporting.plot_newton(state, center, pair.outer_radius,
                              os.path.join(args.out, "fig_newton.png"),
                              true_corners=true_corners)
    if state.aborted:
        print(f"newton aborted: {state.abort_reason}", file=sys.stderr)
        print(f"wrote {hist_path}")
        return EXIT_NUMERICAL
    print(f"final corners after {state.iterations} iterations; "
          f"residual {state.residuals[-1]:.3e}")
    print(f"wrote {hist_path}")
    return EXIT_OK


_COMMANDS = {
    "selftest": cmd_selftest,
    "synthesize": cmd_synthesize,
    "recover-gamma": cmd_recover_gamma,
    "locate": cmd_locate,
    "newton": cmd_newton,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None:
            try:
                import threadpoolctl
            except ImportError:
                print("threadpoolctl not installed; --threads ignored", file=sys.stderr)
            else:
                with threadpoolctl.threadpool_limits(limits=args.threads):
                    return _COMMANDS[args.command](args)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GeometryError, NumericalError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
