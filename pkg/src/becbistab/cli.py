"""Command-line entry point.

Subcommands: steady, sweep, dynamics, potential, critical-points, presets.
Dimensionless flags (``--eta-over-kappa`` and friends) scale by the resolved
kappa; absolute rad/s values come from a ``--config`` JSON file.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .dynamics import FullState, MechState, integrate_adiabatic, integrate_full
from .exceptions import NumericalError, ParameterError
from .output import (branch_rows, build_manifest, file_sha256, manifest_hash, trace_rows,
                     trajectory_rows, write_csv, write_manifest, write_sidecar)
from .params import (CONVENTIONS, FIG5_DELTA, FIG5_ETA, PRESETS, TWO_PI, load_params,
                     params_from_mapping, preset, preset_notes)
from .potential import find_critical_points, potential_grid, v_s_of_n
from .steady_state import saturation_scan, steady_state_at, sweep_1d, sweep_2d

log = logging.getLogger("becbistab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

# options that never change results and are left out of the manifest
RUNTIME_ONLY = ("jobs", "out_dir", "manifest", "preset", "config", "verbose", "func")

RATIO_FLAGS = ("eta", "eta_eff", "delta")


class ConfigError(Exception):
    pass


def _ratio_overrides(params, opts):
    ratios = {name: opts.get(f"{name}_over_kappa") for name in RATIO_FLAGS}
    return params.with_ratios(**{k: v for k, v in ratios.items() if v is not None})


def _convention(opts, default):
    return opts.get("sign_convention") or default


def _ratio_grid(kappa, start, stop, num):
    if num is None or num < 2:
        raise ParameterError("num", "grid needs at least 2 points")
    return np.linspace(start, stop, int(num)) * kappa


# --- commands ----------------------------------------------------------------
# each takes (params, opts, ctx) where ctx holds out_dir, jobs and the manifest digest


def run_steady(params, opts, ctx):
    params = _ratio_overrides(params, opts)
    branches = steady_state_at(params, opts["tol"], _convention(opts, "steady"))
    rows = ((b.n_s, b.q_s, b.Q_s, b.P_s, b.stability.value, b.residual) for b in branches)
    path = ctx.csv("steady.csv", ["n_s", "q_s", "Q_s", "P_s", "stability", "residual"], rows)
    return params, [path]


def run_sweep(params, opts, ctx):
    params = _ratio_overrides(params, opts)
    kappa = params.kappa
    conv = _convention(opts, "steady")
    grid = _ratio_grid(kappa, opts["start"], opts["stop"], opts["num"])
    if opts["reverse"]:
        grid = grid[::-1]
    if opts["saturation"]:
        if opts["axis"] != "eta":
            raise ParameterError("axis", "saturation scans sweep eta")
        eta_effs = np.asarray(opts["eta_eff_list"] or [], dtype=float) * kappa
        res = saturation_scan(params, grid, eta_effs, opts["tol"], conv, ctx.jobs)
        rows = ((w.axis, v / kappa, w.lower / kappa, w.upper / kappa, w.width / kappa)
                for w, v in zip(res.windows, eta_effs))
        header = ["axis", "eta_eff_over_kappa", "lower_over_kappa", "upper_over_kappa", "width_over_kappa"]
        extra = [ctx.csv("sweep_windows.csv", header, rows)]
    elif opts["axis2"]:
        grid2 = _ratio_grid(kappa, opts["start2"], opts["stop2"], opts["num2"])
        res = sweep_2d(params, opts["axis"], opts["axis2"], grid, grid2, opts["tol"], conv, ctx.jobs)
        extra = []
    else:
        res = sweep_1d(params, opts["axis"], grid, opts["tol"], conv, ctx.jobs)
        extra = []
    names = [f"{name}_over_kappa" for name, _ in res.axes]
    paths = [
        ctx.csv("sweep_branches.csv", names + ["n_s", "q_s", "Q_s", "P_s", "stability", "residual"],
                branch_rows(res, kappa)),
        ctx.csv("sweep_hysteresis.csv", names + ["n_s", "direction"], trace_rows(res, kappa)),
    ] + extra
    for i, err in sorted(res.errors.items()):
        log.warning("point %d: %s", i, err)
    return params, paths


def run_dynamics(params, opts, ctx):
    if opts.get("eta_over_kappa") is None:
        params = params.replace(eta=FIG5_ETA)
    if opts.get("delta_over_kappa") is None:
        params = params.replace(delta=FIG5_DELTA)
    params = _ratio_overrides(params, opts)
    conv = _convention(opts, "dynamics")
    kw = dict(t_end=opts["t_end"], dt=opts["dt"], method=opts["method"], sample_interval=opts["sample"],
              convention=conv, rtol=opts["rtol"], atol=opts["atol"])
    if opts["model"] == "adiabatic":
        init = MechState(opts["q0"], opts["q_dot0"], opts["Q0"], opts["Q_dot0"])
        traj = integrate_adiabatic(init, params, **kw)
    else:
        init = FullState(0.0, 0.0, opts["q_dot0"] / params.omega_m, opts["q0"],
                         opts["Q_dot0"] / params.big_omega, opts["Q0"])
        traj = integrate_full(init, params, **kw)
    path = ctx.csv("trajectory.csv", ["t", "q", "q_dot", "Q", "Q_dot", "photon_number"], trajectory_rows(traj))
    meta = {"manifest_sha256": ctx.digest, "model": traj.model, "integrator": traj.method, "dt": traj.dt,
            "time_unit": "omega_m*t", "stats": traj.stats}
    side = write_sidecar(os.path.join(ctx.out_dir, "trajectory.json"), meta)
    return params, [path, side]


def _potential_common(params, opts, ctx):
    params = _ratio_overrides(params, opts)
    conv = _convention(opts, "steady")
    res = opts["resolution"]
    grid = potential_grid(params, opts["q_range"], opts["Q_range"], (res, res), opts["quad_tol"], conv,
                          paper_literal_signs=opts["paper_literal_signs"], jobs=ctx.jobs)
    points = find_critical_points(grid, params, opts["tol"], conv)
    rows = ((c.q, c.Q, c.V, c.kind.value, c.hess_eigs[0], c.hess_eigs[1]) for c in points)
    cp_path = ctx.csv("critical_points.csv", ["q", "Q", "V", "class", "hess_eig1", "hess_eig2"], rows)
    return params, grid, cp_path


def run_potential(params, opts, ctx):
    params, grid, cp_path = _potential_common(params, opts, ctx)
    rows = ((qi, Qj, grid.V[i, j]) for i, qi in enumerate(grid.q) for j, Qj in enumerate(grid.Q))
    paths = [ctx.csv("potential_grid.csv", ["q", "Q", "V"], rows), cp_path]
    if opts["vs_points"]:
        n_max = opts["vs_n_max"]
        if n_max is None:
            branches = steady_state_at(params, opts["tol"], _convention(opts, "steady"))
            n_max = 1.5 * max(b.n_s for b in branches) or 1.0
        n, vs, err = v_s_of_n(params, np.linspace(0.0, n_max, opts["vs_points"]), opts["quad_tol"])
        paths.append(ctx.csv("v_s.csv", ["n", "V_s", "err_bound"], zip(n, vs, err)))
    return params, paths


def run_critical_points(params, opts, ctx):
    params, _, cp_path = _potential_common(params, opts, ctx)
    return params, [cp_path]


COMMANDS = {
    "steady": run_steady,
    "sweep": run_sweep,
    "dynamics": run_dynamics,
    "potential": run_potential,
    "critical-points": run_critical_points,
}


# --- argument parsing --------------------------------------------------------

def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return [lo, hi]


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ratio_args(p):
    p.add_argument("--eta-over-kappa", type=float, help="pump strength eta/kappa")
    p.add_argument("--eta-eff-over-kappa", type=float, help="transverse coupling eta_eff/kappa")
    p.add_argument("--delta-over-kappa", type=float, help="effective detuning Delta/kappa")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--preset", help=f"parameter preset ({', '.join(PRESETS)})")
    g.add_argument("--config", help="JSON parameter file")
    g.add_argument("--manifest", help="replay a run from its manifest.json")
    g.add_argument("--out-dir", default=".", help="output directory (default: .)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps and grids")
    g.add_argument("--tol", type=float, default=1e-12, help="root residual tolerance")
    g.add_argument("--sign-convention", choices=CONVENTIONS,
                   help="detuning sign convention (default: steady, dynamics for the dynamics command)")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="becbistab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady", parents=[common], help="steady-state branches at one parameter point")
    _ratio_args(p)

    p = sub.add_parser("sweep", parents=[common], help="1D/2D sweeps with hysteresis traces")
    _ratio_args(p)
    p.add_argument("--axis", choices=("eta", "eta_eff", "delta"), default="eta")
    p.add_argument("--start", type=float, default=0.0, help="first axis value / kappa")
    p.add_argument("--stop", type=float, default=25.0, help="last axis value / kappa")
    p.add_argument("--num", type=int, default=251)
    p.add_argument("--reverse", action="store_true", help="traverse the first axis backwards")
    p.add_argument("--axis2", choices=("eta", "eta_eff", "delta"))
    p.add_argument("--start2", type=float, default=-600.0)
    p.add_argument("--stop2", type=float, default=600.0)
    p.add_argument("--num2", type=int, default=121)
    p.add_argument("--saturation", action="store_true", help="bistable-window scan over --eta-eff-list")
    p.add_argument("--eta-eff-list", type=_floats, help="eta_eff/kappa values, comma-separated")

    p = sub.add_parser("dynamics", parents=[common], help="integrate the equations of motion")
    _ratio_args(p)
    p.add_argument("--model", choices=("adiabatic", "full"), default="adiabatic")
    p.add_argument("--method", choices=("rk4", "rk45-adaptive"), default="rk4")
    p.add_argument("--t-end", type=float, default=100.0, help="final omega_m t")
    p.add_argument("--dt", type=float, default=TWO_PI / 1000.0, help="step in omega_m t")
    p.add_argument("--sample", type=float, default=TWO_PI / 50.0, help="output interval in omega_m t")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--q-dot0", type=float, default=0.0)
    p.add_argument("--Q0", type=float, default=0.0)
    p.add_argument("--Q-dot0", type=float, default=0.0)

    for name, text in (("potential", "effective potential grid, critical points and V_s(n)"),
                       ("critical-points", "critical points of the effective potential")):
        p = sub.add_parser(name, parents=[common], help=text)
        _ratio_args(p)
        p.add_argument("--q-range", type=_range, help="lo,hi (auto-widened to bracket the branches)")
        p.add_argument("--Q-range", type=_range, help="lo,hi (auto-widened to bracket the branches)")
        p.add_argument("--resolution", type=int, default=101)
        p.add_argument("--quad-tol", type=float, default=1e-10)
        p.add_argument("--paper-literal-signs", action="store_true",
                       help="report the potential with the harmonic signs as printed (= -V)")
        if name == "potential":
            p.add_argument("--vs-points", type=int, default=201, help="V_s(n) samples (0 disables)")
            p.add_argument("--vs-n-max", type=float, help="largest photon number for V_s")

    sub.add_parser("presets", parents=[common], help="list parameter presets")
    return parser


class _Context:
    def __init__(self, out_dir, jobs, digest):
        self.out_dir, self.jobs, self.digest = out_dir, jobs, digest

    def csv(self, name, header, rows):
        return write_csv(os.path.join(self.out_dir, name), header, rows, self.digest)


def _resolve_source(args):
    if args.manifest:
        if args.preset or args.config:
            raise ParameterError("manifest", "--manifest cannot be combined with --preset/--config")
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        return params_from_mapping(manifest["params"]), manifest
    if args.preset and args.config:
        raise ParameterError("config", "give exactly one of --preset and --config")
    if args.config:
        return load_params(args.config), {"params_source": f"config:{os.path.basename(args.config)}",
                                          "input_hash": file_sha256(args.config)}
    name = args.preset or "paper-2015"
    return preset(name), {"params_source": f"preset:{name}", "input_hash": None}


def _options(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in RUNTIME_ONLY and k != "command"}


def execute(args):
    if args.command == "presets":
        listing = {name: {"params": preset(name).as_dict(), "notes": list(preset_notes(name))} for name in PRESETS}
        print(json.dumps(listing, indent=2, sort_keys=True))
        return EXIT_OK
    if args.jobs < 1:
        raise ParameterError("jobs", "must be >= 1")
    params, source = _resolve_source(args)
    if "command" in source:  # replay
        command, opts = source["command"], source["options"]
        params_source, input_hash = source.get("params_source"), source.get("input_hash")
        replay = True
    else:
        command, opts = args.command, _options(args)
        params_source, input_hash = source["params_source"], source["input_hash"]
        replay = False
    for key in ("tol", "quad_tol", "rtol", "atol", "dt", "sample", "t_end"):
        if key in opts and not (opts[key] > 0 and math.isfinite(opts[key])):
            raise ParameterError(key, "must be positive")
    os.makedirs(args.out_dir, exist_ok=True)
    if not os.access(args.out_dir, os.W_OK):
        raise ParameterError("out_dir", f"{args.out_dir} is not writable")

    # overrides are idempotent, so resolving against already-resolved params is safe on replay
    resolved = _resolve_for_manifest(command, params, opts)
    manifest = build_manifest(command, opts, resolved, input_hash, params_source)
    digest = manifest_hash(manifest)
    ctx = _Context(args.out_dir, args.jobs, digest)
    _, paths = COMMANDS[command](resolved if replay else params, opts, ctx)
    write_manifest(args.out_dir, manifest)
    for path in paths:
        log.info("wrote %s", path)
    return EXIT_OK


def _resolve_for_manifest(command, params, opts):
    if command == "dynamics":
        if opts.get("eta_over_kappa") is None:
            params = params.replace(eta=FIG5_ETA)
        if opts.get("delta_over_kappa") is None:
            params = params.replace(delta=FIG5_DELTA)
    return _ratio_overrides(params, opts)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return execute(args)
    except (ParameterError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"becbistab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"becbistab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
