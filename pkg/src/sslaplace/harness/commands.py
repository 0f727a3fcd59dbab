"""Experiment drivers behind the CLI subcommands.

Each command returns an in-memory result and writes its files into
``out_dir``. Error statistics use a fixed-seed Halton sample of the shrunken
domain (points c + s r(phi) e(phi) with s <= radius_fraction, or |x| <=
radius_fraction on the sphere), filtered through the region classifier.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from .. import classical_bem as bem
from .. import singular_source as ss
from ..boundary_calculus import BoundaryField, zero_mean_check
from ..geometry import (
    FieldGrid,
    RegionLabel,
    classify_points,
    classify_points_sphere,
    make_sphere_quadrature,
    mesh_curve,
)
from ..kernels import KernelConvention
from ..oracles import disk_extension, disk_neumann_data
from .config import ProblemConfig, SCHEMA_VERSION, SOLVER_NAMES, ConfigError
from .output import write_csv, write_field, write_json

logger = logging.getLogger(__name__)

TAGS = {"singular_source": "ss", "classical_bem": "bem"}


@dataclass
class SolverRun:
    name: str
    values: np.ndarray
    summary: dict
    timings: dict
    evaluate: object = field(repr=False, default=None)
    solution: object = field(repr=False, default=None)


@dataclass
class RunReport:
    command: str
    n: int
    solvers: dict
    extra: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION, "command": self.command, "N": self.n, "solvers": self.solvers}
        out.update(self.extra)
        return out


def _clock(fn, *args, repeats: int = 1, **kwargs):
    best = np.inf
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return result, best


def build_mesh(cfg: ProblemConfig, n: int | None = None):
    if cfg.is_sphere:
        if n is None:
            return make_sphere_quadrature(*cfg.sphere_resolution)
        return make_sphere_quadrature(n, 2 * n)
    return mesh_curve(cfg.curve, cfg.n if n is None else n)


def sample_points(cfg: ProblemConfig) -> np.ndarray:
    """Fixed-seed low-discrepancy interior points of the shrunken domain."""
    spec = cfg.samples
    if cfg.is_sphere:
        u = qmc.Halton(d=3, scramble=True, seed=spec.seed).random(spec.count)
        rad = spec.radius_fraction * u[:, 0] ** (1.0 / 3.0)
        ct = 2.0 * u[:, 1] - 1.0
        st = np.sqrt(1.0 - ct * ct)
        phi = 2.0 * np.pi * u[:, 2]
        pts = rad[:, None] * np.column_stack([st * np.cos(phi), st * np.sin(phi), ct])
        labels = classify_points_sphere(pts, 1.0 - spec.radius_fraction)
    else:
        u = qmc.Halton(d=2, scramble=True, seed=spec.seed).random(spec.count)
        s = spec.radius_fraction * np.sqrt(u[:, 0])
        phi = 2.0 * np.pi * u[:, 1]
        r = cfg.curve.radial(phi)
        c = np.asarray(cfg.curve.center)
        pts = c + (s * r)[:, None] * np.column_stack([np.cos(phi), np.sin(phi)])
        labels = classify_points(cfg.curve, pts, 1e-12)
    keep = np.array([lab is RegionLabel.INSIDE for lab in labels])
    return pts[keep]


def exact_solution(cfg: ProblemConfig):
    """Closed-form harmonic extension when one exists (disk or sphere), else None."""
    if cfg.is_sphere:
        return cfg.boundary.harmonic_extension
    if cfg.curve.kind == "circle":
        return lambda pts: disk_extension(cfg.boundary, pts, cfg.curve.radius, cfg.curve.center)
    return None


def _error_stats(values, exact) -> dict:
    err = np.abs(values - exact)
    return {"max": float(err.max()), "rms": float(np.sqrt(np.mean(err**2)))}


def _convention(cfg: ProblemConfig) -> KernelConvention:
    return KernelConvention(3 if cfg.is_sphere else 2, cfg.kernel_sign)


def run_singular_source(cfg: ProblemConfig, mesh, points, repeats: int = 1) -> SolverRun:
    conv = _convention(cfg)
    boundary = cfg.boundary
    t0 = time.perf_counter()
    sol = ss.solve(mesh, boundary, cfg.calibration, cfg.pair, cfg.density_route, conv)
    t_solve = time.perf_counter() - t0
    values, t_eval = _clock(ss.evaluate, sol, points, repeats=repeats)
    rep = sol.calibration_report
    summary = {
        "C1": sol.C1,
        "C2": sol.C2,
        "calibration": {
            "method": rep.method,
            "rms_residual": rep.rms_residual,
            "relative_residual": rep.relative_residual,
            "points": rep.n_points,
        },
        "density_weighted_mean": zero_mean_check(sol.density),
        "convention": conv.tag,
    }
    if cfg.pair is not None:
        summary["calibration"]["pair"] = list(cfg.pair)
    timings = {"density_and_calibration": t_solve, "evaluation": t_eval}
    return SolverRun("singular_source", values, summary, timings, lambda p: ss.evaluate(sol, p), sol)


def run_classical_bem(cfg: ProblemConfig, mesh, points, repeats: int = 1) -> SolverRun:
    conv = _convention(cfg)
    f = BoundaryField(cfg.boundary(mesh.parameter_values), mesh)
    system, t_asm = _clock(bem.assemble, mesh, f, conv, cfg.bem_self_term)
    nd, t_solve = _clock(bem.solve_neumann, system)
    values, t_eval = _clock(bem.evaluate_interior, mesh, f, nd.q, points, conv, check=False, repeats=repeats)
    summary = {"neumann_flux": nd.flux, "self_term": cfg.bem_self_term, "convention": conv.tag}
    if cfg.curve.kind == "circle":
        q_exact = disk_neumann_data(cfg.boundary, mesh.parameter_values, cfg.curve.radius)
        summary["neumann_error_max"] = float(np.abs(nd.q.values - q_exact).max())
    timings = {"assembly": t_asm, "solve": t_solve, "evaluation": t_eval}

    def evaluate(p):
        return bem.evaluate_interior(mesh, f, nd.q, p, conv, check=False)

    return SolverRun("classical_bem", values, summary, timings, evaluate)


def _run_solvers(cfg: ProblemConfig, mesh, points, repeats: int = 1) -> dict[str, SolverRun]:
    runs = {}
    for name in cfg.solvers:
        runner = run_singular_source if name == "singular_source" else run_classical_bem
        try:
            runs[name] = runner(cfg, mesh, points, repeats)
        except ss.DegenerateCalibrationError as exc:
            raise SolverFailure(f"{name}: {exc}") from exc
        except bem.BemSolverError as exc:
            raise SolverFailure(f"{name}: {exc}") from exc
    return runs


class SolverFailure(RuntimeError):
    """A solver could not produce a result for a valid configuration."""


def _attach_errors(runs: dict[str, SolverRun], exact_values) -> None:
    for run in runs.values():
        run.summary["interior_error"] = None if exact_values is None else _error_stats(run.values, exact_values)


def _field_grid(cfg: ProblemConfig, mesh, runs: dict[str, SolverRun], exact) -> FieldGrid:
    spec = cfg.grid
    delta = cfg.grid_delta if cfg.grid_delta is not None else mesh.default_delta()
    if "singular_source" in runs:
        grid = ss.evaluate_grid(runs["singular_source"].solution, spec, delta)
    elif cfg.is_sphere:
        points = spec.points3d()
        grid = FieldGrid(spec, points, classify_points_sphere(points, delta), delta)
    else:
        points = spec.points2d()
        grid = FieldGrid(spec, points, classify_points(cfg.curve, points, delta), delta)
    points = grid.points
    inside = grid.inside_mask()
    if "classical_bem" in runs:
        vals = np.full(len(points), np.nan)
        if inside.any():
            vals[inside] = runs["classical_bem"].evaluate(points[inside])
        grid.values["bem"] = vals
    if exact is not None:
        ex = np.full(len(points), np.nan)
        if inside.any():
            ex[inside] = exact(points[inside])
        grid.exact = ex
    return grid


def _grid_summary(grid: FieldGrid) -> dict:
    counts = {lab.value: 0 for lab in RegionLabel}
    for lab in grid.labels:
        counts[lab.value] += 1
    out = {"points": len(grid), "delta": grid.delta, "counts": counts}
    if "ss" in grid.values:
        outside = np.array([lab is RegionLabel.OUTSIDE for lab in grid.labels])
        vals = grid.values["ss"]
        out["ss_exterior_finite"] = bool(np.all(np.isfinite(vals[outside])))
        out["ss_nonfinite_points"] = int(np.sum(~np.isfinite(vals)))
    return out


def _prepare(out_dir) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_solve(cfg: ProblemConfig, out_dir) -> RunReport:
    out = _prepare(out_dir)
    mesh, t_mesh = _clock(build_mesh, cfg)
    points = sample_points(cfg)
    exact = exact_solution(cfg)
    exact_values = None if exact is None else exact(points)
    runs = _run_solvers(cfg, mesh, points)
    _attach_errors(runs, exact_values)
    report = RunReport(
        "solve",
        mesh.n,
        {name: run.summary for name, run in runs.items()},
        extra={
            "geometry": cfg.geometry,
            "oracle": None if exact is None else ("sphere-harmonic" if cfg.is_sphere else "disk-harmonic"),
            "samples": {"count": int(len(points)), "seed": cfg.samples.seed, "radius_fraction": cfg.samples.radius_fraction},
        },
        timings={"mesh": t_mesh, **{name: run.timings for name, run in runs.items()}},
    )
    if cfg.grid is not None:
        grid = _field_grid(cfg, mesh, runs, exact)
        write_field(out / "field.csv", grid)
        report.extra["grid"] = _grid_summary(grid)
    write_json(out / "report.json", report.to_dict())
    write_json(out / "timings.json", {"schema": SCHEMA_VERSION, "N": mesh.n, "seconds": report.timings})
    return report


def cmd_compare(cfg: ProblemConfig, out_dir) -> RunReport:
    if set(cfg.solvers) != set(SOLVER_NAMES):
        raise ConfigError("solvers", "compare needs both singular_source and classical_bem")
    out = _prepare(out_dir)
    mesh = build_mesh(cfg)
    points = sample_points(cfg)
    exact = exact_solution(cfg)
    exact_values = None if exact is None else exact(points)
    runs = _run_solvers(cfg, mesh, points)
    _attach_errors(runs, exact_values)
    v_ss = runs["singular_source"].values
    v_bem = runs["classical_bem"].values
    deltas = {"singular_source_vs_classical_bem": _error_stats(v_ss, v_bem)}
    if exact_values is not None:
        deltas["singular_source_vs_oracle"] = _error_stats(v_ss, exact_values)
        deltas["classical_bem_vs_oracle"] = _error_stats(v_bem, exact_values)
    report = RunReport(
        "compare",
        mesh.n,
        {name: run.summary for name, run in runs.items()},
        extra={
            "geometry": cfg.geometry,
            "oracle": None if exact is None else "disk-harmonic",
            "samples": {"count": int(len(points)), "seed": cfg.samples.seed, "radius_fraction": cfg.samples.radius_fraction},
            "deltas": deltas,
        },
        timings={name: run.timings for name, run in runs.items()},
    )
    write_json(out / "report.json", report.to_dict())
    write_json(out / "timings.json", {"schema": SCHEMA_VERSION, "N": mesh.n, "seconds": report.timings})
    return report


def cmd_calibration_scan(cfg: ProblemConfig, out_dir) -> list[ss.ScanRow]:
    if cfg.is_sphere or cfg.curve.kind != "circle":
        raise ConfigError("geometry.kind", "calibration-scan needs a circle (the 2R/k prediction is defined there)")
    if not cfg.modes:
        raise ConfigError("modes", "calibration-scan needs a non-empty mode list")
    out = _prepare(out_dir)
    rows = ss.calibration_scan(cfg.curve, cfg.modes, cfg.n, cfg.calibration, _convention(cfg))
    write_csv(
        out / "scan.csv",
        ["k", "C1", "C2", "rms_residual", "predicted_C1"],
        [(r.k, r.C1, r.C2, r.rms_residual, r.predicted_C1) for r in rows],
    )
    return rows


def cmd_convergence(cfg: ProblemConfig, out_dir) -> list[dict]:
    sweep = list(cfg.n_sweep)
    if len(sweep) < 3:
        raise ConfigError("N_sweep", f"needs at least 3 entries, got {len(sweep)}")
    if any(b <= a for a, b in zip(sweep, sweep[1:])):
        raise ConfigError("N_sweep", "must be strictly ascending")
    exact = exact_solution(cfg)
    if exact is None:
        raise ConfigError("geometry", "convergence study needs an oracle (circle or sphere geometry)")
    out = _prepare(out_dir)
    points = sample_points(cfg)
    exact_values = exact(points)
    table = []
    for n in sweep:
        mesh = build_mesh(cfg, n)
        runs = _run_solvers(cfg, mesh, points, repeats=cfg.timing_repeats)
        row = {"N": n}
        for name, run in runs.items():
            tag = TAGS[name]
            stats = _error_stats(run.values, exact_values)
            row[f"max_err_{tag}"] = stats["max"]
            row[f"rms_err_{tag}"] = stats["rms"]
            for phase, secs in run.timings.items():
                row[f"t_{phase}_{tag}"] = secs
        logger.info("N=%d %s", n, {k: v for k, v in row.items() if k.startswith("max_err")})
        table.append(row)
    header = list(table[0].keys())
    write_csv(out / "convergence.csv", header, [[row[h] for h in header] for row in table])
    return table
