"""Command-line front end.

Every subcommand reads a JSON config, validates it against a schema before any
computation, writes one CSV (or JSON) table atomically and prints a single JSON
run report on stderr.

Exit codes: 0 success, 1 numeric tolerance exceeded, 2 config/parse/IO error,
3 solver failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from .box import BoxSpec, box_energy
from .core import DriveSpec, PhysicalConstants
from .doublewell import (
    CLASSICAL_CUTOFF,
    doublet_gap_flux,
    grid_splitting_oracle,
    harmonic_params,
    overlap,
    tunneling_coefficient,
    tunneling_coefficient_exact,
    two_level_gap,
    two_level_hamiltonian,
    well_probability,
)
from .dynamics import evolve, first_crossing, integrate_trajectories
from .errors import (
    ConfigError,
    ConvergenceFailure,
    GridMismatch,
    NoRootInBracket,
    ParseError,
    QCInterpError,
    TrajectoryEscaped,
)
from .grid import Grid, build_hamiltonian, gaussian_packet, solve_eigenstates
from .ldl_hdl import equality_report, oscillation_series
from .output import Table, atomic_write, fmt
from .potentials import Box, Free, potential_from_dict
from .thermo import (
    compensation_residual,
    entropy_u,
    entropy_zero,
    free_energy_u,
    heat_capacity_u,
    molar_zpe_from_wavenumber,
    zero_point_energy,
)

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

SCHEMA_VERSION = 1

# --- schemas -------------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_LAMBDA = {"type": "number", "minimum": 0, "maximum": 1}

_CONSTANTS = {
    "type": "object",
    "properties": {"hbar": _POS, "mass": _POS, "k_B": _POS},
    "additionalProperties": False,
}
_GRID = {
    "type": "object",
    "properties": {"x_min": _NUM, "x_max": _NUM, "n_points": {"type": "integer", "minimum": 16}},
    "required": ["n_points"],
    "additionalProperties": False,
}
_POTENTIAL = {
    "oneOf": [
        {"type": "object", "properties": {"kind": {"const": "box"}, "L": _POS},
         "required": ["kind", "L"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "harmonic"}, "K": _POS, "omega": _POS},
         "required": ["kind"], "additionalProperties": False,
         "oneOf": [{"required": ["K"]}, {"required": ["omega"]}]},
        {"type": "object", "properties": {"kind": {"const": "doublewell"}, "V0": _POS, "a": _POS},
         "required": ["kind", "V0", "a"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "free"}},
         "required": ["kind"], "additionalProperties": False},
    ]
}
_WELL = {"type": "object", "properties": {"V0": _POS, "a": _POS},
         "required": ["V0", "a"], "additionalProperties": False}
_VARIANT = {"enum": ["zpe_only", "full"]}


def _schema(properties: dict, required: list) -> dict:
    props = {
        "schema_version": {"const": SCHEMA_VERSION},
        "constants": _CONSTANTS,
        "output": {"type": "string"},
        "format": {"enum": ["csv", "json"]},
        "tolerance": _POS,
    }
    props.update(properties)
    return {
        "type": "object",
        "properties": props,
        "required": ["schema_version", *required],
        "additionalProperties": False,
    }


SCHEMAS = {
    "spectrum": _schema(
        {
            "potential": {"oneOf": _POTENTIAL["oneOf"][:2]},
            "lambdas": {"type": "array", "items": _LAMBDA, "minItems": 1},
            "n_states": {"type": "integer", "minimum": 1},
            "grid": _GRID,
        },
        ["potential", "lambdas"],
    ),
    "doublewell": _schema(
        {
            "well": _WELL,
            "lambdas": {"type": "array", "items": _LAMBDA, "minItems": 1},
            "grid": _GRID,
            "times": {"type": "array", "items": {"type": "number", "minimum": 0}},
            "gap_tolerance": _POS,
        },
        ["well", "lambdas", "grid"],
    ),
    "thermo": _schema(
        {
            "lambdas": {"type": "array", "items": _LAMBDA, "minItems": 1},
            "u_min": _POS,
            "u_max": _POS,
            "u_step": _POS,
            "variant": _VARIANT,
            "include_heat_capacity": {"type": "boolean"},
        },
        ["lambdas", "u_min", "u_max", "u_step"],
    ),
    "evolve": _schema(
        {
            "grid": _GRID,
            "potential": _POTENTIAL,
            "lambda": _LAMBDA,
            "dt": _POS,
            "steps": {"type": "integer", "minimum": 0},
            "save_every": {"type": "integer", "minimum": 1},
            "branches": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "oneOf": [
                        {"type": "object",
                         "properties": {"kind": {"const": "gaussian"}, "x0": _NUM, "sigma": _POS, "p": _NUM,
                                        "seeds": {"type": "array", "items": _NUM}},
                         "required": ["kind", "x0", "sigma"], "additionalProperties": False},
                        {"type": "object",
                         "properties": {"kind": {"const": "eigenstate"}, "n": {"type": "integer", "minimum": 0},
                                        "seeds": {"type": "array", "items": _NUM}},
                         "required": ["kind"], "additionalProperties": False},
                    ]
                },
            },
        },
        ["grid", "potential", "dt", "steps", "branches"],
    ),
    "oscillate": _schema(
        {
            "drive": {
                "type": "object",
                "properties": {"omega_drive": _POS, "t_start": _NUM, "t_end": _NUM,
                               "n_samples": {"type": "integer", "minimum": 2}},
                "required": ["omega_drive", "t_start", "t_end", "n_samples"],
                "additionalProperties": False,
            },
            "u": _POS,
            "variant": _VARIANT,
            "equality_tolerance": _POS,
        },
        ["drive", "u"],
    ),
    "compensation": _schema(
        {
            "T_c": _POS,
            "zpe": _NUM,
            "omega": {"type": "number", "minimum": 0},
            "molar": {"type": "boolean"},
            "wavenumber_cm": _POS,
            "input": {"type": "string"},
        },
        ["T_c"],
    ),
}


# --- helpers -------------------------------------------------------------------

class RunContext:
    def __init__(self, command: str, config: dict, args):
        self.command = command
        self.config = config
        self.args = args
        self.warnings: list[str] = []
        self.events: list[str] = []
        self.outputs: list[str] = []
        self.exit_code = EXIT_OK

    @property
    def consts(self) -> PhysicalConstants:
        return PhysicalConstants(**self.config.get("constants", {}))

    @property
    def tolerance(self):
        if self.args.tolerance is not None:
            return self.args.tolerance
        return self.config.get("tolerance")

    def warn(self, msg: str):
        self.warnings.append(msg)


def thread_count() -> int:
    raw = os.environ.get("QCINTERP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"QCINTERP_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("QCINTERP_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def pmap(fn, items):
    """Ordered map over a thread pool sized by QCINTERP_THREADS."""
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _grid(cfg: dict, default_span=None) -> Grid:
    if "x_min" in cfg and "x_max" in cfg:
        return Grid(cfg["x_min"], cfg["x_max"], cfg["n_points"])
    if default_span is None:
        raise ConfigError("grid needs x_min and x_max")
    return Grid(default_span[0], default_span[1], cfg["n_points"])


def load_config(command: str, path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(config, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    return config


# --- commands ------------------------------------------------------------------

def cmd_spectrum(ctx: RunContext) -> Table:
    cfg = ctx.config
    consts = ctx.consts
    pot = potential_from_dict(cfg["potential"])
    n_states = cfg.get("n_states", 5)
    tol = ctx.tolerance if ctx.tolerance is not None else 1e-3
    if isinstance(pot, Box):
        box = BoxSpec(pot.L, n_states)
        grid = _grid(cfg.get("grid", {"n_points": 2001}), (-pot.L / 2, pot.L / 2))

        def analytic(n, lam):
            return box_energy(n, box, lam, consts)

        first = 1
    else:
        if "grid" not in cfg:
            raise ConfigError("harmonic spectrum needs an explicit grid")
        grid = _grid(cfg["grid"])
        omega = pot.frequency(consts)

        def analytic(n, lam):
            return (n + 0.5) * consts.hbar * omega * math.sqrt(1.0 - lam)

        first = 0

    def solve(lam):
        pairs = solve_eigenstates(build_hamiltonian(grid, pot, lam, consts), n_states)
        return [e for e, _ in pairs]

    lambdas = cfg["lambdas"]
    results = pmap(solve, lambdas)
    table = Table("spectrum", ["lambda", "n", "E_analytic", "E_grid", "rel_error"])
    worst = 0.0
    for lam, energies in zip(lambdas, results):
        for i, e_grid in enumerate(energies):
            n = first + i
            e_an = analytic(n, lam)
            err = abs(e_grid - e_an) / abs(e_an) if e_an != 0 else abs(e_grid - e_an)
            worst = max(worst, err)
            table.rows.append([lam, n, e_an, e_grid, err])
    table.add_meta("potential", pot.kind)
    table.add_meta("tolerance", tol)
    table.add_meta("max_rel_error", worst)
    if worst > tol:
        ctx.warn(f"max rel_error {fmt(worst)} exceeds tolerance {fmt(tol)}")
        ctx.exit_code = EXIT_TOLERANCE
    return table


def cmd_doublewell(ctx: RunContext) -> Table:
    cfg = ctx.config
    consts = ctx.consts
    well = potential_from_dict({"kind": "doublewell", **cfg["well"]})
    grid = _grid(cfg["grid"])
    times = cfg.get("times", [])
    gap_tol = cfg.get("gap_tolerance", 0.25)
    cols = ["lambda", "omega_lambda", "alpha_lambda", "overlap", "delta", "delta_quadrature",
            "two_level_gap", "grid_gap", "grid_gap_flux", "gap_rel_diff", "singular"]
    cols += [f"P_t={fmt(t)}" for t in times]

    def row(lam):
        if lam > CLASSICAL_CUTOFF:
            sys_ = two_level_hamiltonian(0.0, 0.0, 0.0, lam)
            p = [well_probability(t, sys_, consts) for t in times]
            return [lam, 0.0, math.inf, 0.0, math.nan, math.nan, 0.0, math.nan, math.nan, math.nan, 1, *p], None
        approx = harmonic_params(well, lam, consts)
        delta = tunneling_coefficient_exact(approx, well, consts)
        note = None
        try:
            delta_q = tunneling_coefficient(approx, well, grid, consts)
        except GridMismatch as exc:
            delta_q = math.nan
            note = f"lambda={fmt(lam)}: quadrature skipped ({exc})"
        gap2 = two_level_gap(well, lam, consts)
        grid_gap = grid_splitting_oracle(well, lam, grid, consts).gap
        try:
            flux_gap = doublet_gap_flux(well, lam, grid, consts)
        except GridMismatch:
            flux_gap = math.nan
        # the flux form survives deep wells where E1 - E0 is lost to rounding
        ref = grid_gap if math.isnan(flux_gap) else flux_gap
        rel = abs(gap2 - ref) / abs(ref) if ref != 0 else math.inf
        sys_ = two_level_hamiltonian(0.5 * consts.hbar * approx.omega_lambda, delta, 0.0, lam)
        p = [well_probability(t, sys_, consts) for t in times]
        return [lam, approx.omega_lambda, approx.alpha_lambda, overlap(approx, well), delta, delta_q,
                gap2, grid_gap, flux_gap, rel, 0, *p], note

    table = Table("doublewell", cols)
    for r, note in pmap(row, cfg["lambdas"]):
        table.rows.append(r)
        if note:
            ctx.warn(note)
        if not r[10] and r[9] > gap_tol:
            ctx.warn(f"lambda={fmt(r[0])}: two-level gap differs from grid gap by {fmt(r[9])} "
                     f"(> {fmt(gap_tol)})")
    table.add_meta("V0", well.V0)
    table.add_meta("a", well.a)
    table.add_meta("barrier_over_hbar_omega0", well.barrier / (consts.hbar * math.sqrt(well.K / consts.mass)))
    return table


def _u_grid(cfg) -> np.ndarray:
    lo, hi, step = cfg["u_min"], cfg["u_max"], cfg["u_step"]
    if hi < lo:
        raise ConfigError("u_max must be >= u_min")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def cmd_thermo(ctx: RunContext) -> Table:
    cfg = ctx.config
    variant = cfg.get("variant", "full")
    lambdas = cfg["lambdas"]
    u = _u_grid(cfg)
    with_cv = cfg.get("include_heat_capacity", False)
    cols = ["u"]
    series = []
    for lam in lambdas:
        tag = f"(lambda={fmt(lam)})"
        cols += [f"F/kT{tag}", f"S/k{tag}"]
        series += [free_energy_u(u, lam, variant), entropy_u(u, lam, variant)]
        if with_cv:
            cols.append(f"Cv/k{tag}")
            series.append(heat_capacity_u(u, lam, variant))
    table = Table("thermo", cols)
    for i, ui in enumerate(u):
        table.rows.append([ui, *(s[i] for s in series)])
    table.add_meta("variant", variant)
    for lam in lambdas:
        try:
            root = entropy_zero(lam, variant)
            table.add_meta(f"entropy_zero(lambda={fmt(lam)})", root)
        except NoRootInBracket:
            table.add_meta(f"entropy_zero(lambda={fmt(lam)})", "none in (1, 1000)")
        f1 = float(free_energy_u(1.0, lam, variant))
        table.add_meta(f"F/kT(u=1,lambda={fmt(lam)})", f1)
        if lam < 1.0 and abs(f1) > 1e-12:
            msg = (f"F/kT at u=1 is {fmt(f1)} for lambda={fmt(lam)}; "
                   f"F vanishes at u=1 only in the classical limit lambda=1")
            ctx.warn(msg)
            table.add_meta("warning", msg)
    if 1.0 in lambdas:
        table.add_meta("marker", f"S/k(lambda=1) = 0 at u* = e = {fmt(math.e)}")
    return table


def cmd_evolve(ctx: RunContext) -> Table:
    cfg = ctx.config
    consts = ctx.consts
    pot = potential_from_dict(cfg["potential"])
    grid = _grid(cfg["grid"])
    lam = cfg.get("lambda", 0.0)
    dt, steps = cfg["dt"], cfg["steps"]
    save_every = cfg.get("save_every", 1)
    tol = ctx.tolerance if ctx.tolerance is not None else 1e-8
    override = ctx.args.seed_positions

    initial = []
    seeds = []
    for b in cfg["branches"]:
        if b["kind"] == "gaussian":
            psi = gaussian_packet(grid, b["x0"], b["sigma"], b.get("p", 0.0), consts)
            default_seeds = [b["x0"]]
        else:
            pairs = solve_eigenstates(build_hamiltonian(grid, pot, lam, consts), b.get("n", 0) + 1)
            psi = pairs[-1][1]
            default_seeds = []
        initial.append(psi)
        seeds.append(override if override is not None else b.get("seeds", default_seeds))
    if len({len(s) for s in seeds}) > 1:
        raise ConfigError("every branch needs the same number of trajectory seeds")
    for s in seeds:
        if s and not grid.contains(s):
            raise ConfigError("trajectory seeds must lie inside the grid")
    n_seeds = len(seeds[0])

    def run(i):
        try:
            return evolve(initial[i], pot, lam, dt, steps, consts, save_every=save_every)
        except ConvergenceFailure as exc:
            exc.branch = i
            raise

    runs = pmap(run, range(len(initial)))
    trajs = [integrate_trajectories(ev, s, consts) if s else None for ev, s in zip(runs, seeds)]

    cols = ["branch", "step", "t", "norm", "norm_dev", "mean_x", "width", "free_width_analytic",
            "well_probability"] + [f"x_traj{j}" for j in range(n_seeds)]
    table = Table("evolve", cols)
    worst = 0.0
    free = isinstance(pot, Free)
    for i, (ev, b) in enumerate(zip(runs, cfg["branches"])):
        n0 = ev.states[0].norm()
        for k, (t, s) in enumerate(zip(ev.times, ev.states)):
            norm = s.norm()
            dev = abs(norm - n0)
            worst = max(worst, dev)
            if free and b["kind"] == "gaussian":
                sig = b["sigma"]
                fw = sig * math.sqrt(1 + (consts.hbar * t / (2 * consts.mass * sig**2)) ** 2)
            else:
                fw = math.nan
            rho = s.density
            left = np.trapezoid(np.where(grid.x < 0, rho, 0.0), dx=grid.dx)
            right = np.trapezoid(np.where(grid.x > 0, rho, 0.0), dx=grid.dx)
            step = min(k * save_every, steps)
            row = [i, step, t, norm, dev, s.mean_x(), s.width(), fw, (left - right) / norm**2]
            if trajs[i] is not None:
                row += list(trajs[i].positions[k])
            table.rows.append(row)

    for i in range(len(runs)):
        for j in range(i + 1, len(runs)):
            if trajs[i] is None or trajs[j] is None:
                continue
            for a in range(n_seeds):
                for c in range(n_seeds):
                    tc = first_crossing(trajs[i].times, trajs[i].path(a), trajs[j].path(c))
                    if tc is not None:
                        msg = (f"trajectory crossing: branch {i} seed {a} and branch {j} seed {c} "
                               f"at t={fmt(tc)}")
                        ctx.events.append(msg)
                        table.add_meta("event", msg)
    table.add_meta("lambda", lam)
    table.add_meta("max_norm_dev", worst)
    table.add_meta("max_picard_iterations", max(int(ev.picard_iterations.max(initial=0)) for ev in runs))
    if worst > tol:
        ctx.warn(f"norm deviation {fmt(worst)} exceeds tolerance {fmt(tol)}")
        ctx.exit_code = EXIT_TOLERANCE
    return table


def cmd_oscillate(ctx: RunContext) -> Table:
    cfg = ctx.config
    d = cfg["drive"]
    drive = DriveSpec(d["omega_drive"], d["t_start"], d["t_end"], d["n_samples"])
    variant = cfg.get("variant", "full")
    eq_tol = cfg.get("equality_tolerance", 1e-9)
    series = oscillation_series(drive, cfg["u"], variant)
    equal = series.equal_share(eq_tol)
    table = Table("oscillate", ["t", "lambda", "state", "F_over_kT", "S_over_k", "mean_energy_over_kT",
                                "zpe_share", "thermal_share", "equal_share"])
    for i in range(len(series.times)):
        table.rows.append([series.times[i], series.lambdas[i], series.state_label[i],
                           series.F_over_kT[i], series.S_over_k[i], series.mean_energy[i],
                           series.zpe_share[i], series.thermal_share[i], bool(equal[i])])
    rep = equality_report(cfg["u"])
    table.add_meta("u", series.u)
    table.add_meta("variant", variant)
    table.add_meta("drive_period", drive.period)
    table.add_meta("regime", rep.regime)
    table.add_meta("zpe_over_kT", rep.zpe_over_kT)
    return table


def _read_compensation_rows(path: str):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read input table {path!r}: {exc}") from exc
    with fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"delta_H", "delta_S"} <= set(reader.fieldnames):
        raise ParseError("input table needs a header with delta_H and delta_S columns", row=0)
    rows = []
    for i, rec in enumerate(reader, start=1):
        values = []
        for key in ("delta_H", "delta_S"):
            raw = (rec.get(key) or "").strip()
            if not raw:
                raise ParseError(f"row {i}: missing {key}", row=i)
            try:
                v = float(raw)
            except ValueError:
                raise ParseError(f"row {i}: {key}={raw!r} is not a number", row=i) from None
            if not math.isfinite(v):
                raise ParseError(f"row {i}: {key} is not finite", row=i)
            values.append(v)
        rows.append((i, (rec.get("label") or "").strip(), *values))
    if not rows:
        raise ParseError("input table has no data rows", row=0)
    return rows


def cmd_compensation(ctx: RunContext) -> Table:
    cfg = ctx.config
    consts = ctx.consts
    path = ctx.args.input or cfg.get("input")
    if not path:
        raise ConfigError("compensation needs an input table (--input or config 'input')")
    sources = [k for k in ("zpe", "omega", "wavenumber_cm") if k in cfg]
    if len(sources) != 1:
        raise ConfigError("give exactly one of zpe, omega, wavenumber_cm")
    if "zpe" in cfg:
        zpe = float(cfg["zpe"])
    elif "omega" in cfg:
        zpe = zero_point_energy(cfg["omega"], consts)
        if cfg.get("molar", False):
            from scipy.constants import Avogadro

            zpe *= Avogadro
    else:
        zpe = molar_zpe_from_wavenumber(cfg["wavenumber_cm"])
    T_c = cfg["T_c"]
    rows = _read_compensation_rows(path)
    table = Table("compensation", ["row", "label", "delta_H", "delta_S", "zpe", "predicted_H", "residual"])
    residuals = []
    for i, label, dH, dS in rows:
        rec = compensation_residual(dH, dS, T_c, zpe)
        residuals.append(rec.residual)
        table.rows.append([i, label, dH, dS, zpe, T_c * dS + zpe, rec.residual])
    res = np.array(residuals)
    table.add_meta("T_c", T_c)
    table.add_meta("zpe", zpe)
    table.add_meta("mean_residual", float(res.mean()))
    table.add_meta("max_abs_residual", float(np.abs(res).max()))
    return table


COMMANDS = {
    "spectrum": cmd_spectrum,
    "doublewell": cmd_doublewell,
    "thermo": cmd_thermo,
    "evolve": cmd_evolve,
    "oscillate": cmd_oscillate,
    "compensation": cmd_compensation,
}


def _seed_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcinterp",
        description="Quantum-classical interpolation: spectra, double-well tunneling, thermodynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output path (default: config 'output', else stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--tolerance", type=float, default=None)
        if name == "evolve":
            p.add_argument("--seed-positions", type=_seed_list, default=None,
                           help="comma-separated trajectory seeds applied to every branch")
        else:
            p.set_defaults(seed_positions=None)
        if name == "compensation":
            p.add_argument("--input", default=None, help="CSV with delta_H, delta_S columns")
        else:
            p.set_defaults(input=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    usage = io.StringIO()
    try:
        with contextlib.redirect_stderr(usage):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help exits 0 with no report; usage errors still get one
        if not exc.code:
            return 0
        report = {"command": None, "inputs": None, "outputs": [], "warnings": [], "events": [],
                  "error": usage.getvalue().strip(), "exit_code": EXIT_CONFIG, "wall_time_s": 0.0}
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
        return EXIT_CONFIG

    start = time.perf_counter()
    report = {"command": args.command, "inputs": None, "outputs": [], "warnings": [], "events": []}
    ctx = None
    try:
        config = load_config(args.command, args.config)
        report["inputs"] = config
        ctx = RunContext(args.command, config, args)
        thread_count()
        table = COMMANDS[args.command](ctx)
        fmt_name = args.format or config.get("format", "csv")
        text = table.to_json(config) if fmt_name == "json" else table.to_csv(config)
        out = args.out or config.get("output")
        if out:
            atomic_write(out, text)
            ctx.outputs.append(out)
        else:
            sys.stdout.write(text)
        code = ctx.exit_code
    except (ConfigError, ParseError) as exc:
        report["error"] = str(exc)
        if isinstance(exc, ParseError):
            report["error_row"] = exc.row
        code = EXIT_CONFIG
    except OSError as exc:
        report["error"] = f"I/O error: {exc}"
        code = EXIT_CONFIG
    except (ConvergenceFailure, TrajectoryEscaped) as exc:
        report["error"] = str(exc)
        if getattr(exc, "step", None) is not None:
            report["error_step"] = exc.step
        if getattr(exc, "branch", None) is not None:
            report["error_branch"] = exc.branch
        code = EXIT_SOLVER
    except QCInterpError as exc:
        # domain validation errors surfaced from constructors (bad ranges etc.)
        report["error"] = str(exc)
        code = EXIT_CONFIG
    if ctx is not None:
        report["outputs"] = ctx.outputs
        report["warnings"] = ctx.warnings
        report["events"] = ctx.events
    report["exit_code"] = code
    report["wall_time_s"] = round(time.perf_counter() - start, 6)
    sys.stderr.write(json.dumps(report, sort_keys=True, default=str) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
