"""Scenario presets, configuration, persistence and study drivers.

The only module with I/O.  Configs are TOML (human-readable key/value tree);
every run directory receives:

    monitors.csv    time, mass, energy_selfdual, energy_coulomb, variance, virial_flux
    modulation.csv  time, lambda, gamma_unwrapped, eps_adapted_norm, eps_l2_norm
    summary.json    resolved config echo, final norms, fitted constants,
                    drift statistics, stop reason, profile fingerprint
    snap_*.dat      optional field snapshots: header "n h m t", rows "r Re Im"

Output is bit-reproducible: fixed seeds, no timestamps, stable float
formatting.  Exit codes: 0 success, 2 config error, 3 numerical abort,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import tomllib
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import EvolutionConfig, NumericalAbort, evolve, virial_residuals
from .grid import (
    RadialField,
    RadialGrid,
    inner_real,
    norm,
    random_h1_field,
    random_smooth_field,
    tail_mass_fraction,
)
from .linearization import l_q, l_q_star, rho_profile
from .modulation import (
    DecompositionError,
    blowup_rate_fit,
    decompose,
    default_test_profiles,
    estimate_blowup_time,
    track,
)
from .nonlinearity import duality_residuals, nonlinearity_parts, nonlinear_potential
from .soliton import (
    SQRT8,
    SolitonParams,
    covariant_cr,
    energy,
    lambda_q,
    mass,
    modulated_soliton,
    q_profile,
    s_solution,
    scaling_generator,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

FLOAT_FMT = "%.17g"


class ConfigError(ValueError):
    """Unusable scenario configuration."""


SCENARIO_DEFAULTS = {
    "soliton_static": {
        "m": 1,
        "grid": {"h": 0.02, "r_max": 40.0},
        "evolution": {"dt": 1e-3, "t0": 0.0, "t_end": 10.0, "monitor_stride": 20},
        "initial": {"kind": "soliton", "lam": 1.0, "gamma": 0.0},
    },
    "pseudoconformal_blowup": {
        "m": 1,
        "grid": {"h": 0.015, "r_max": 45.0},
        "evolution": {
            "dt": 5e-4,
            "t0": -1.0,
            "t_end": -1e-3,
            "monitor_stride": 10,
            "stop_on_resolution_floor": True,
            "floor_cells": 20,
        },
        "initial": {"kind": "pseudoconformal_blowup", "t0": -1.0, "perturb_amplitude": 0.0},
    },
    "perturbed_soliton": {
        "m": 1,
        "grid": {"h": 0.02, "r_max": 40.0},
        "evolution": {"dt": 1e-3, "t0": 0.0, "t_end": 2.0, "monitor_stride": 20},
        "initial": {
            "kind": "perturbed_soliton",
            "lam": 1.0,
            "gamma": 0.0,
            "seed": 7,
            "amplitude": 1e-2,
            "profile": "random_smooth",
        },
    },
    "random_h1": {
        "m": -1,
        "grid": {"h": 0.02, "r_max": 40.0},
        "evolution": {"dt": 1e-3, "t0": 0.0, "t_end": 2.0, "monitor_stride": 20},
        "initial": {"kind": "random_h1", "seed": 11, "mass_target": 10.0},
    },
    "from_file": {
        "m": 1,
        "grid": {"h": 0.02, "r_max": 40.0},
        "evolution": {"dt": 1e-3, "t0": 0.0, "t_end": 1.0, "monitor_stride": 20},
        "initial": {"kind": "file", "path": ""},
    },
    "identity_suite": {
        "m": 1,
        "grid": {"h": 0.01, "r_max": 60.0},
        "evolution": {},
        "initial": {},
    },
}

COMMON_DEFAULTS = {
    "outputs": {"directory": "out", "snapshots": False, "snapshot_stride": 0},
    "track_modulation": None,  # None -> scenario decides
    "seed": 0,
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    return resolve_config(raw)


def resolve_config(raw: dict) -> dict:
    """Materialize all defaults into the user config (echoed for provenance)."""
    name = raw.get("scenario")
    if not name:
        raise ConfigError("config must set 'scenario'")
    if name not in SCENARIO_DEFAULTS:
        raise ConfigError(
            f"unknown scenario {name!r}; registry: {sorted(SCENARIO_DEFAULTS)}"
        )
    cfg = _deep_merge(COMMON_DEFAULTS, SCENARIO_DEFAULTS[name])
    cfg = _deep_merge(cfg, raw)
    cfg["scenario"] = name
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    g = cfg.get("grid", {})
    if cfg["scenario"] != "identity_suite" or g:
        for key in ("h", "r_max"):
            if key not in g or not isinstance(g[key], (int, float)) or g[key] <= 0:
                raise ConfigError(f"grid.{key} must be a positive number")
    ev = cfg.get("evolution", {})
    if ev:
        if ev.get("dt", 1) <= 0:
            raise ConfigError("evolution.dt must be positive")
        if ev.get("monitor_stride", 1) < 1:
            raise ConfigError("evolution.monitor_stride must be >= 1")
        if ev.get("floor_cells", 20) < 4:
            raise ConfigError("evolution.floor_cells must be >= 4")
    if not isinstance(cfg.get("m", 0), int):
        raise ConfigError("m must be an integer")


def build_grid(cfg: dict) -> RadialGrid:
    g = cfg["grid"]
    return RadialGrid.from_rmax(g["r_max"], g["h"])


def build_initial(cfg: dict, grid: RadialGrid) -> RadialField:
    m = cfg["m"]
    init = cfg["initial"]
    kind = init["kind"]
    if kind == "soliton":
        return modulated_soliton(m, grid, SolitonParams(init["lam"], init["gamma"]))
    if kind == "pseudoconformal_blowup":
        u = s_solution(m, init["t0"], grid)
        amp = init.get("perturb_amplitude", 0.0)
        if amp:
            rng = np.random.default_rng(int(cfg["seed"]) + 1)
            bump = random_smooth_field(grid, m, rng)
            bump = bump * (amp * norm(u, "L2") / max(norm(bump, "L2"), 1e-300))
            u = u + bump
        return u
    if kind == "perturbed_soliton":
        base = modulated_soliton(m, grid, SolitonParams(init["lam"], init["gamma"]))
        rng = np.random.default_rng(int(init.get("seed", cfg["seed"])))
        if init.get("profile", "random_smooth") != "random_smooth":
            raise ConfigError(f"unknown perturbation profile {init.get('profile')!r}")
        bump = random_smooth_field(grid, m, rng)
        bump = bump * (init["amplitude"] * norm(base, "L2") / max(norm(bump, "L2"), 1e-300))
        return base + bump
    if kind == "random_h1":
        return random_h1_field(grid, m, int(init.get("seed", cfg["seed"])), init["mass_target"])
    if kind == "file":
        return read_snapshot(init["path"], grid, m)
    raise ConfigError(f"unknown initial-data kind {kind!r}")


# -- persistence --------------------------------------------------------------


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_monitors_csv(path: Path, traj) -> None:
    cols = ["time", "mass", "energy_selfdual", "energy_coulomb", "variance", "virial_flux"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(traj.times):
            row = [t] + [traj.monitors[c][i] for c in cols[1:]]
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_modulation_csv(path: Path, series) -> None:
    cols = ["time", "lambda", "gamma_unwrapped", "eps_adapted_norm", "eps_l2_norm"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(series.times)):
            row = [
                series.times[i],
                series.lam[i],
                series.gamma_unwrapped[i],
                series.eps_adapted[i],
                series.eps_l2[i],
            ]
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_snapshot(path: Path, u: RadialField, t: float) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{u.grid.n} {_fmt(u.grid.h)} {u.m} {_fmt(t)}\n")
        v = u.values.astype(np.complex128)
        for r, re, im in zip(u.grid.r, v.real, v.imag):
            fh.write(f"{_fmt(r)} {_fmt(re)} {_fmt(im)}\n")


def read_snapshot(path: str | Path, grid: RadialGrid, m: int) -> RadialField:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            n_file, h_file, m_file = int(header[0]), float(header[1]), int(header[2])
            data = np.loadtxt(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read snapshot {path}: {exc}") from exc
    if n_file != grid.n or abs(h_file - grid.h) > 1e-12 * grid.h:
        raise ConfigError(
            f"snapshot grid (n={n_file}, h={h_file}) does not match config grid "
            f"(n={grid.n}, h={grid.h})"
        )
    if m_file != m:
        raise ConfigError(f"snapshot m={m_file} does not match config m={m}")
    return RadialField(grid, m, data[:, 1] + 1j * data[:, 2])


def _profile_fingerprint(profiles) -> dict:
    return {
        "det_transversality": profiles.det_transversality,
        "z1_l2": norm(profiles.z1, "L2"),
        "z2_l2": norm(profiles.z2, "L2"),
        "support_radius": 2.0,
    }


def write_summary(path: Path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


# -- scenario execution --------------------------------------------------------


def run_scenario(cfg: dict, out_dir: Path, quiet: bool = False) -> dict:
    if cfg["scenario"] == "identity_suite":
        rows = identity_checks(cfg)
        summary = {
            "config": cfg,
            "library_version": __version__,
            "checks": rows,
            "all_passed": all(r["passed"] for r in rows),
        }
        out_dir.mkdir(parents=True, exist_ok=True)
        write_summary(out_dir / "summary.json", summary)
        if not quiet:
            print(format_check_table(rows))
        return summary

    grid = build_grid(cfg)
    u0 = build_initial(cfg, grid)
    tail = tail_mass_fraction(u0)
    if tail > 1e-6:
        logger.warning(
            "initial data keeps %.3g of its mass in the outer 10%% of the domain "
            "(threshold 1e-6); enlarge r_max", tail,
        )

    ev = cfg["evolution"]
    econf = EvolutionConfig(
        dt=ev["dt"],
        t_end=ev["t_end"],
        t0=ev.get("t0", 0.0),
        monitor_stride=ev.get("monitor_stride", 10),
        stop_on_resolution_floor=ev.get("stop_on_resolution_floor", False),
        floor_cells=ev.get("floor_cells", 20),
    )
    traj = evolve(u0, econf)
    if traj.stop_reason == "nan_abort":
        raise NumericalAbort("evolution aborted on non-finite values")

    out_dir.mkdir(parents=True, exist_ok=True)
    write_monitors_csv(out_dir / "monitors.csv", traj)

    msum = traj.monitors["mass"]
    esum = traj.monitors["energy_selfdual"]
    e_scale = max(abs(esum[0]), 0.5 * norm(u0, "Hdot1_m") ** 2, 1e-300)
    summary = {
        "config": cfg,
        "library_version": __version__,
        "stop_reason": traj.stop_reason,
        "tail_mass_fraction": tail,
        "n_samples": len(traj.times),
        "t_final": float(traj.times[-1]),
        "mass_initial": float(msum[0]),
        "mass_drift": float(np.max(np.abs(msum - msum[0])) / msum[0]),
        "energy_initial": float(esum[0]),
        "energy_drift": float(np.max(np.abs(esum - esum[0])) / e_scale),
        "final_norms": {
            "L2": norm(traj.fields[-1], "L2"),
            "Hdot1_m": norm(traj.fields[-1], "Hdot1_m"),
        },
    }

    track_requested = cfg.get("track_modulation")
    if track_requested is None:
        track_requested = cfg["scenario"] in (
            "soliton_static", "pseudoconformal_blowup", "perturbed_soliton",
        )
    if track_requested and cfg["m"] >= 0:
        profiles = default_test_profiles(cfg["m"], grid)
        init = cfg["initial"]
        guess = (init.get("lam", abs(init.get("t0", 1.0))), init.get("gamma", 0.0))
        try:
            series = track(traj, profiles, guess=guess)
            write_modulation_csv(out_dir / "modulation.csv", series)
            summary["profiles"] = _profile_fingerprint(profiles)
            summary["lambda_final"] = float(series.lam[-1])
            summary["gamma_winding"] = float(
                series.gamma_unwrapped[-1] - series.gamma_unwrapped[0]
            )
            if cfg["scenario"] == "pseudoconformal_blowup":
                t_exact = 0.0  # S(t) collapses at t = 0
                t_hat, t_err = estimate_blowup_time(series)
                fit = blowup_rate_fit(series, T=t_exact)
                summary["blowup"] = {
                    "T_exact": t_exact,
                    "T_estimated": t_hat,
                    "T_stderr": t_err,
                    "C_linear": fit.c_linear,
                    "C_log": fit.c_log,
                    "window_sups": fit.window_sups,
                }
        except DecompositionError as exc:
            summary["modulation_error"] = str(exc)
            logger.warning("modulation tracking failed: %s", exc)

    if cfg["outputs"].get("snapshots"):
        stride = int(cfg["outputs"].get("snapshot_stride", 0)) or max(
            1, len(traj.fields) // 16
        )
        for k in range(0, len(traj.fields), stride):
            write_snapshot(out_dir / f"snap_{k:06d}.dat", traj.fields[k], traj.times[k])

    write_summary(out_dir / "summary.json", summary)
    if not quiet:
        print(
            f"[{cfg['scenario']}] stop={summary['stop_reason']} "
            f"mass_drift={summary['mass_drift']:.3e} "
            f"energy_drift={summary['energy_drift']:.3e}"
        )
    return summary


# -- identity suite -------------------------------------------------------------


def identity_checks(cfg: dict) -> list:
    """Residual/identity battery: Bogomol'nyi, mass/gauge constants, kernel
    relations, duality identities, energy-form equivalence."""
    rows = []

    def add(name, value, tol):
        rows.append({"name": name, "value": float(value), "tol": tol,
                     "passed": bool(abs(value) <= tol)})

    h = cfg["grid"]["h"]
    r_max = cfg["grid"]["r_max"]
    grid = RadialGrid.from_rmax(r_max, h)

    for m in (0, 1, 2):
        q = q_profile(m, grid)
        res = norm(covariant_cr(q, q), "L2") / norm(q, "Hdot1_m")
        add(f"bogomolnyi_residual_m{m}", res, 1e-4)
        add(f"mass_defect_m{m}", (mass(q) - 8 * np.pi * (m + 1)) / (8 * np.pi * (m + 1)), 1e-4)
        from .gauge import a_theta as _a_theta

        add(f"gauge_limit_m{m}", _a_theta(q).values[-1] + 2 * (m + 1), 1e-3)
        add(f"selfdual_energy_m{m}", energy(q).selfdual / norm(q, "Hdot1_m") ** 4, 1e-6)

    m = cfg["m"]
    q = q_profile(m, grid)
    lamq = lambda_q(m, grid)
    iq = RadialField(grid, m, 1j * q.values)
    r2q = RadialField(grid, m, 1j * grid.r**2 / 4.0 * q.values)
    irq = RadialField(grid, m, 1j * grid.r / 2.0 * q.values)
    rq = RadialField(grid, m, grid.r * q.values / (2.0 * (m + 1)))
    hnorm = norm(lamq, "Hdot1_m")
    add(f"kernel_LQ_lambdaQ_m{m}", norm(l_q(lamq), "L2") / hnorm, 1e-3)
    add(f"kernel_LQ_iQ_m{m}", norm(l_q(iq), "L2") / norm(q, "Hdot1_m"), 1e-3)
    add(f"kernel_LQ_ir2Q_m{m}", norm(l_q(r2q) - irq, "L2") / norm(irq, "L2"), 1e-3)
    add(f"kernel_LQstar_irQ_m{m}",
        norm(l_q_star(irq) + 1j * lamq, "L2") / norm(lamq, "L2"), 1e-3)
    add(f"kernel_LQstar_rQ_m{m}", norm(l_q_star(rq) - q, "L2") / norm(q, "L2"), 1e-3)
    rho = rho_profile(m, grid)
    add(f"kernel_LQ_rho_m{m}", norm(l_q(rho) - rq, "L2") / norm(rq, "L2"), 1e-4)

    rng = np.random.default_rng(int(cfg["seed"]) + 5)
    worst = 0.0
    for _ in range(10):
        psis = [random_smooth_field(grid, m, rng) for _ in range(6)]
        scale = max(np.prod([norm(p, "L2") for p in psis[:4]]), 1e-300)
        res = duality_residuals(*psis)
        worst = max(worst, max(res[:3]) / scale)
        scale6 = max(np.prod([norm(p, "L2") for p in psis]), 1e-300)
        worst = max(worst, max(res[3:]) / scale6)
    add(f"duality_worst_m{m}", worst, 1e-8)

    worst_e = 0.0
    for _ in range(5):
        f = random_smooth_field(grid, m, rng)
        ep = energy(f)
        scale = max(norm(f, "Hdot1_m") ** 2, norm(f, "L2") ** 4, 1e-300)
        worst_e = max(worst_e, abs(ep.coulomb - ep.selfdual) / scale)
    add(f"energy_form_equiv_m{m}", worst_e, 1e-3)

    worst_v = 0.0
    for _ in range(5):
        f = random_smooth_field(grid, m, rng)
        lhs = nonlinear_potential(f).values * f.values
        rhs_parts = nonlinearity_parts(f).total.values
        scale = max(np.max(np.abs(lhs)), 1e-300)
        worst_v = max(worst_v, np.max(np.abs(lhs - rhs_parts)) / scale)
    add(f"potential_vs_parts_m{m}", worst_v, 1e-10)

    return rows


def format_check_table(rows: list) -> str:
    width = max(len(r["name"]) for r in rows)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tol':>8}  status"]
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{r['name']:<{width}}  {r['value']:>12.3e}  {r['tol']:>8.0e}  {status}")
    return "\n".join(lines)


# -- convergence study ----------------------------------------------------------


def convergence_study(cfg: dict, levels: int, out_dir: Path, quiet: bool = False) -> dict:
    """Rerun the scenario with (h, dt) halved per level; report observed orders."""
    if levels < 2:
        raise ConfigError("study needs at least 2 levels")
    classes: dict = {}

    for lvl in range(levels):
        scale = 2**lvl
        sub = json.loads(json.dumps(cfg))  # deep copy
        sub["grid"]["h"] = cfg["grid"]["h"] / scale
        if sub["evolution"]:
            sub["evolution"]["dt"] = cfg["evolution"]["dt"] / scale
            sub["evolution"]["monitor_stride"] = cfg["evolution"].get(
                "monitor_stride", 10
            ) * scale
        grid = build_grid(sub)
        m = sub["m"]

        q = q_profile(max(m, 0), grid)
        classes.setdefault("bogomolnyi", []).append(
            norm(covariant_cr(q, q), "L2") / norm(q, "Hdot1_m")
        )

        rng = np.random.default_rng(int(cfg["seed"]) + 3)
        psis = [random_smooth_field(grid, max(m, 0), rng) for _ in range(6)]
        res = duality_residuals(*psis)
        scale6 = max(np.prod([norm(p, "L2") for p in psis]), 1e-300)
        classes.setdefault("duality", []).append(max(res) / scale6)

        if sub["scenario"] == "pseudoconformal_blowup" and sub["evolution"]:
            u0 = build_initial(sub, grid)
            ev = sub["evolution"]
            t_end = max(ev["t_end"], ev["t0"] + 0.25 * abs(ev["t0"]))
            econf = EvolutionConfig(
                dt=ev["dt"], t_end=t_end, t0=ev["t0"],
                monitor_stride=ev.get("monitor_stride", 10),
            )
            traj = evolve(u0, econf)
            exact = s_solution(m, traj.times[-1], grid)
            err = norm(traj.fields[-1] - exact, "L2") / norm(exact, "L2")
            classes.setdefault("s_tracking", []).append(err)
        elif sub["evolution"]:
            u0 = build_initial(sub, grid)
            ev = sub["evolution"]
            t_end = ev.get("t0", 0.0) + min(
                1.0, ev["t_end"] - ev.get("t0", 0.0)
            )
            econf = EvolutionConfig(
                dt=ev["dt"], t_end=t_end, t0=ev.get("t0", 0.0),
                monitor_stride=ev.get("monitor_stride", 10),
            )
            traj = evolve(u0, econf)
            r1, r2 = virial_residuals(traj)
            sc = max(abs(traj.monitors["energy_selfdual"][0]),
                     norm(u0, "Hdot1_m") ** 2, 1e-300)
            classes.setdefault("virial", []).append(
                max(np.max(np.abs(r1)), np.max(np.abs(r2))) / sc
            )

    report = {"config": cfg, "levels": levels, "library_version": __version__,
              "residuals": {}, "orders": {}}
    for name, vals in classes.items():
        report["residuals"][name] = vals
        if max(vals) < 1e-12:
            report["orders"][name] = "exact"
        else:
            report["orders"][name] = [
                float(np.log2(vals[i] / vals[i + 1])) for i in range(len(vals) - 1)
            ]
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary(out_dir / "study.json", report)
    if not quiet:
        for name in sorted(report["orders"]):
            print(f"{name}: residuals={report['residuals'][name]} "
                  f"orders={report['orders'][name]}")
    return report


# -- entry point -----------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cssim",
        description="Radial simulator and verification toolkit for the "
        "equivariant self-dual Chern-Simons-Schrodinger equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "study", "suite"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="TOML scenario config")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--quiet", action="store_true")
        if name == "study":
            p.add_argument("--level", type=int, default=3, help="refinement levels")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.config is not None:
            cfg = load_config(args.config)
        elif args.command == "suite":
            cfg = resolve_config({"scenario": "identity_suite"})
        else:
            raise ConfigError("--config PATH is required for this command")
        if args.seed is not None:
            cfg["seed"] = args.seed
        out_dir = args.out or Path(cfg["outputs"]["directory"])

        if args.command == "run":
            run_scenario(cfg, out_dir, quiet=args.quiet)
        elif args.command == "study":
            convergence_study(cfg, args.level, out_dir, quiet=args.quiet)
        elif args.command == "suite":
            cfg = _deep_merge(cfg, {"scenario": "identity_suite"})
            cfg["scenario"] = "identity_suite"
            summary = run_scenario(cfg, out_dir, quiet=args.quiet)
            if not summary["all_passed"]:
                return EXIT_NUMERICAL
        return EXIT_OK
    except ConfigError as exc:
        logger.error("config error: %s", exc)
        return EXIT_CONFIG
    except (NumericalAbort, DecompositionError, FloatingPointError) as exc:
        logger.error("numerical abort: %s", exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
