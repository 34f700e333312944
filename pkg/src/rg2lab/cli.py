"""Command-line driver: one subcommand per scenario, CSV/SVG output, JSON manifest.

Exit status is 0 on success, 2 for invalid flags and 3 when an integration
fails (step-size underflow where none is expected, or the step budget runs
out).
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import svg
from .cigar import (
    CigarParams,
    first_integral_drift,
    integrate_cigar,
    plateau_radius,
    ricci_cigar_profile,
    soliton_residual,
)
from .constant_curvature import (
    ConstantCurvatureProblem,
    classify_regime,
    evolve_phi,
    extinction_from_trajectory,
    extinction_time,
    phi_closed_form,
    phi_implicit_residual,
)
from .curvature3d import (
    FlowParams,
    check_parabolicity,
    fixed_point_residual,
    kn_local_homogeneity,
    sectional_from_ricci,
    solve_fixed_points,
)
from .homogeneous import (
    AsymptoticsClass,
    Family,
    MilnorGeometry,
    classify_asymptotics,
    evolve_homogeneous,
    phase_plane_scan,
)
from .ode import IntegratorOptions, TerminationKind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRATION = 3

_DEFAULTS = IntegratorOptions()


class IntegrationFailure(RuntimeError):
    pass


def _fmt(x):
    """Shortest round-trip text for floats; everything else via str."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _check(traj, what):
    if traj.termination.kind in (TerminationKind.STEP_SIZE_UNDERFLOW, TerminationKind.MAX_STEPS):
        raise IntegrationFailure(
            f"{what}: integration stopped with {traj.termination.kind.value} at t={traj.termination.time!r}"
        )


class _Run:
    """Collects artifacts for one invocation and writes the manifest last."""

    def __init__(self, args, argv, parameters):
        self.args = args
        self.argv = list(argv)
        self.parameters = parameters
        self.artifacts = []
        self.want_csv = args.csv or not (args.csv or args.svg)
        self.want_svg = args.svg or not (args.csv or args.svg)
        os.makedirs(args.out_dir, exist_ok=True)

    @property
    def options(self):
        return IntegratorOptions(rel_tol=self.args.rel_tol, abs_tol=self.args.abs_tol,
                                 max_steps=self.args.max_steps)

    def path(self, suffix):
        return os.path.join(self.args.out_dir, f"{self.args.command}{suffix}")

    def write_csv(self, header, rows, suffix=".csv"):
        if not self.want_csv:
            return
        p = self.path(suffix)
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        self.artifacts.append(p)

    def write_svg(self, text, suffix=".svg"):
        if not self.want_svg:
            return
        p = self.path(suffix)
        with open(p, "w", encoding="utf-8") as fh:
            fh.write(text)
        self.artifacts.append(p)

    def write_manifest(self):
        p = self.args.manifest or self.path("_manifest.json")
        doc = {
            "command": self.args.command,
            "argv": self.argv,
            "parameters": self.parameters,
            "tolerances": {"rel_tol": self.args.rel_tol, "abs_tol": self.args.abs_tol,
                           "max_steps": self.args.max_steps},
            "artifacts": self.artifacts,
            "manifest": p,
            "version": __version__,
        }
        d = os.path.dirname(p)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return p


def _constant_curvature(run, out):
    a = run.args
    prob = ConstantCurvatureProblem(K=a.K, params=FlowParams(alpha=a.alpha, n=a.n))
    regime = classify_regime(a.K, prob.params)
    grid = np.linspace(0.0, a.t_end, a.samples)
    traj = evolve_phi(prob, a.t_end, run.options, t_eval=grid)
    _check(traj, "constant-curvature")
    rows = []
    for t, phi in zip(traj.times, traj.states[:, 0]):
        try:
            closed = phi_closed_form(t, prob)
        except ValueError:
            closed = math.nan
        try:
            res = phi_implicit_residual(phi, t, prob)
        except ValueError:
            res = math.nan
        rows.append((t, phi, closed, res, regime.value))
    run.write_csv(["t", "phi", "phi_closed_form", "implicit_residual", "regime"], rows)
    run.write_svg(svg.line_plot(
        [("phi (ODE)", traj.times, traj.states[:, 0]),
         ("phi (closed form)", traj.times, [r[2] for r in rows])],
        title=f"scale factor, K={a.K:g}, n={a.n}, alpha={a.alpha:g}", xlabel="t", ylabel="phi",
    ))
    print(f"regime {regime.value}", file=out)
    T = extinction_time(prob)
    if T is not None:
        print(f"extinction_time {T!r}", file=out)
    t_ev = extinction_from_trajectory(traj)
    if t_ev is not None:
        print(f"ode_extinction_time {t_ev!r}", file=out)


def _fixed_points(run, out):
    a = run.args
    sols = solve_fixed_points(a.alpha, seed_grid=a.seed_grid)
    rows = []
    for r, label in sols:
        res = float(np.linalg.norm(fixed_point_residual(r, a.alpha)))
        rows.append((r.lam, r.mu, r.nu, label.value, res, kn_local_homogeneity(r),
                     check_parabolicity(sectional_from_ricci(r), a.alpha)))
    run.write_csv(["lambda", "mu", "nu", "class", "residual_norm", "locally_homogeneous", "parabolic"],
                  rows)
    series = [(row[3], [k + 1 for k in range(3)], row[:3]) for row in rows]
    run.write_svg(svg.line_plot(series, title=f"fixed-point Ricci eigenvalues, alpha={a.alpha:g}",
                                xlabel="eigenvalue index", ylabel="Ricci eigenvalue", markers=True))
    for row in rows:
        print(f"{row[3]} ({row[0]!r}, {row[1]!r}, {row[2]!r}) residual {row[4]:.3e}", file=out)


def _cigar(run, out):
    a = run.args
    p = CigarParams(c=a.c, alpha=a.alpha)
    s_max = a.s_max if a.s_max is not None else 20.0 / math.sqrt(a.c)
    prof = integrate_cigar(p, s_max, run.options)
    if prof.termination.kind in (TerminationKind.STEP_SIZE_UNDERFLOW, TerminationKind.MAX_STEPS):
        raise IntegrationFailure(f"cigar: integration stopped with {prof.termination.kind.value}")
    psi, k_psi = ricci_cigar_profile(a.c, prof.s)
    rows = zip(prof.s, prof.phi, prof.v, prof.K, prof.f, psi, k_psi)
    run.write_csv(["s", "phi", "v", "K", "f", "psi", "K_psi"], rows)
    series = [("phi", prof.s, prof.phi), ("K", prof.s, prof.K)]
    if a.compare:
        series += [("psi (Ricci)", prof.s, psi), ("K_psi (Ricci)", prof.s, k_psi)]
    run.write_svg(svg.line_plot(series, title=f"steady soliton, c={a.c:g}, alpha={a.alpha:g}",
                                xlabel="s", ylabel="profile"))
    print(f"max_soliton_residual {soliton_residual(prof, p):.3e}", file=out)
    print(f"first_integral_drift {first_integral_drift(prof, p):.3e}", file=out)
    print(f"plateau_radius {plateau_radius(p)!r}", file=out)
    if a.compare:
        print(f"sup_gap_to_ricci {float(np.max(np.abs(prof.phi - psi)))!r}", file=out)


def _grid(lo, hi, n):
    if not (lo > 0 and hi >= lo and n >= 1):
        raise ValueError("grid bounds must satisfy 0 < min <= max and count >= 1")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([lo])


def _phase_plane(run, out):
    a = run.args
    scan = phase_plane_scan(a.family, a.alpha, _grid(a.a_min, a.a_max, a.n_a),
                            _grid(a.b_min, a.b_max, a.n_b), t_horizon=a.t_horizon,
                            opts=run.options)
    classes = list(AsymptoticsClass)
    rows = []
    for i, a0 in enumerate(scan.a_values):
        for j, b0 in enumerate(scan.b_values):
            rows.append((a0, b0, scan.labels[i, j].value))
    run.write_csv(["A0", "B0", "class"], rows)
    codes = np.vectorize(classes.index)(scan.labels)
    run.write_svg(svg.class_raster(codes, [c.value for c in classes], scan.a_values, scan.b_values,
                                   title=f"{scan.family.value}, alpha={a.alpha:g}, B0=C0",
                                   xlabel="A0", ylabel="B0 = C0"))
    for cls, n in scan.counts().items():
        print(f"{cls.value} {n}", file=out)
    if scan.shrinker_mask().any() and scan.immortal_mask().any():
        print(f"boundary_contiguous {str(scan.boundary_is_contiguous()).lower()}", file=out)


def _homogeneous(run, out):
    a = run.args
    geom = MilnorGeometry(a.family, a.A, a.B, a.C)
    traj = evolve_homogeneous(geom, a.alpha, a.t_end, run.options)
    if traj.termination.kind is TerminationKind.MAX_STEPS:
        # underflow here is a genuine blow-down and is reported as a class, not a failure
        _check(traj, "homogeneous")
    run.write_csv(["t", "A", "B", "C"], ((t, *g) for t, g in zip(traj.times, traj.states)))
    t = traj.times
    run.write_svg(svg.line_plot(
        [(name, t, np.log10(traj.states[:, k])) for k, name in enumerate("ABC")],
        title=f"{geom.family.value}, alpha={a.alpha:g}", xlabel="t", ylabel="log10 coefficient",
    ))
    term = traj.termination
    print(f"termination {term.kind.value} t={term.time!r}" + (f" {term.label}" if term.label else ""),
          file=out)
    print(f"class {classify_asymptotics(traj).value}", file=out)


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _tolerance(text):
    x = _positive(text)
    if x > 1e-3:
        raise argparse.ArgumentTypeError("tolerances must not exceed 1e-3")
    return x


def _count(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for output files")
    common.add_argument("--csv", action="store_true", help="write CSV (default: CSV and SVG)")
    common.add_argument("--svg", action="store_true", help="write SVG (default: CSV and SVG)")
    common.add_argument("--rel-tol", type=_tolerance, default=_DEFAULTS.rel_tol)
    common.add_argument("--abs-tol", type=_tolerance, default=_DEFAULTS.abs_tol)
    common.add_argument("--max-steps", type=_count, default=_DEFAULTS.max_steps,
                        help="step budget per integration")
    common.add_argument("--manifest", default=None,
                        help="manifest path (default: <out-dir>/<command>_manifest.json)")

    parser = argparse.ArgumentParser(prog="rg2lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constant-curvature", parents=[common],
                       help="scale factor of a constant-curvature metric")
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t-end", type=_positive, default=1.0)
    p.add_argument("--samples", type=_count, default=101)

    p = sub.add_parser("fixed-points", parents=[common], help="3D fixed points")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed-grid", type=_count, default=17, help="Newton seeds per axis")

    p = sub.add_parser("cigar", parents=[common], help="2D steady soliton profile")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--s-max", type=_positive, default=None, help="default 20/sqrt(c)")
    p.add_argument("--compare", action="store_true", help="overlay the Ricci-flow cigar")

    p = sub.add_parser("phase-plane", parents=[common], help="classify symmetric data B0 = C0")
    p.add_argument("--family", choices=[f.value for f in Family if f not in (Family.H3, Family.H2xR)],
                   default="sol")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--a-min", type=float, default=1e-3)
    p.add_argument("--a-max", type=float, default=10.0)
    p.add_argument("--b-min", type=float, default=0.1)
    p.add_argument("--b-max", type=float, default=10.0)
    p.add_argument("--n-a", type=_count, default=20)
    p.add_argument("--n-b", type=_count, default=20)
    p.add_argument("--t-horizon", type=_positive, default=1e3)

    p = sub.add_parser("homogeneous", parents=[common], help="flow of one diagonal metric")
    p.add_argument("--family", choices=[f.value for f in Family], default="nil")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--A", type=_positive, default=1.0)
    p.add_argument("--B", type=_positive, default=1.0)
    p.add_argument("--C", type=_positive, default=1.0)
    p.add_argument("--t-end", type=_positive, default=1e3)
    return parser


_HANDLERS = {
    "constant-curvature": _constant_curvature,
    "fixed-points": _fixed_points,
    "cigar": _cigar,
    "phase-plane": _phase_plane,
    "homogeneous": _homogeneous,
}

_COMMON = {"out_dir", "csv", "svg", "rel_tol", "abs_tol", "max_steps", "manifest", "command"}


def main(argv=None, out=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _COMMON}
    run = _Run(args, argv, params)
    try:
        _HANDLERS[args.command](run, out)
    except IntegrationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        run.write_manifest()
        return EXIT_INTEGRATION
    except ValueError as exc:
        # invalid parameter combinations surface as domain errors from the library
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    run.write_manifest()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
