"""Experiment orchestration and report writing.

Runs the chaos-expansion and/or Monte Carlo estimators for a parsed
configuration, assembles the comparison report, and writes plot-ready CSV
files plus a structured JSON report.
"""
from __future__ import annotations

import json
import os
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig, config_to_dict
from .models import FieldState, get_model, initial_profile
from .moments import (
    MomentField,
    averaged_energy,
    discrete_energy,
    energy_reference,
    relative_error_frobenius,
    validate_coefficient_energy,
    wce_moment_field,
)
from .montecarlo import MCResult, mc_run
from .propagator import (
    CoefficientTrajectory,
    SolverFailure,
    WceSolution,
    solve_propagator,
    stability_advisory,
)

PRIMARY_COMPONENTS = {"1d": ("E1", "H1"), "2d": ("E3",), "3d": ("E1",)}

_MOMENT_NAMES = ("mean", "second", "third", "fourth")


class HarnessError(RuntimeError):
    """Solver failure wrapped with the phase it occurred in."""

    def __init__(self, phase: str, cause: Exception):
        super().__init__(f"phase {phase!r} failed: {cause}")
        self.phase = phase
        self.cause = cause


@dataclass
class RunReport:
    config: dict
    timings: dict
    energy: dict
    advisories: list[str]
    errors: dict | None = None
    coefficient_energy_residuals: dict | None = None
    mc_final_energy_std_error: float | None = None
    sigma_scan: dict | None = None
    # Large arrays for CSV output; not serialized into report.json.
    wce_moments: MomentField | None = None
    mc_moments: MomentField | None = None
    solution: WceSolution | None = None
    grid: object | None = None

    def to_json_dict(self) -> dict:
        payload = {
            "config": self.config,
            "timings": self.timings,
            "energy": self.energy,
            "advisories": self.advisories,
        }
        if self.errors is not None:
            payload["errors"] = self.errors
        if self.coefficient_energy_residuals is not None:
            payload["coefficient_energy_residuals"] = self.coefficient_energy_residuals
        if self.mc_final_energy_std_error is not None:
            payload["mc_final_energy_std_error"] = self.mc_final_energy_std_error
        if self.sigma_scan is not None:
            payload["sigma_scan"] = self.sigma_scan
        return payload


def _mc_moment_field(result: MCResult) -> MomentField:
    return MomentField(
        components=result.model.components,
        mean=result.moments[0],
        second=result.moments[1],
        third=result.moments[2],
        fourth=result.moments[3],
    )


def _reference_series(config: ExperimentConfig, sigma: float | None = None) -> np.ndarray:
    model = config.model_variant()
    grid = config.grid()
    phi0 = discrete_energy(FieldState(model, grid, initial_profile(model, grid)))
    sigmas = config.sigmas(sigma)
    times = config.time_grid().times()
    return np.array(
        [energy_reference(t, model, sigmas, grid.volume, phi0) for t in times]
    )


def _run_wce(config: ExperimentConfig, sigma: float | None = None) -> WceSolution:
    return solve_propagator(
        model=config.model_variant(),
        grid=config.grid(),
        time=config.time_grid(),
        sigmas=config.sigmas(sigma),
        truncation=config.truncation(),
        short_circuit=config.wce_short_circuit,
        workers=config.workers,
    )


def _run_mc(config: ExperimentConfig, sigma: float | None = None,
            seed: int | None = None) -> MCResult:
    return mc_run(
        model=config.model_variant(),
        grid=config.grid(),
        time=config.time_grid(),
        sigmas=config.sigmas(sigma),
        samples=config.mc_samples,
        master_seed=config.mc_seed if seed is None else seed,
        workers=config.workers,
    )


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Execute the configured estimators and assemble the comparison report."""
    model = config.model_variant()
    grid = config.grid()
    time_grid = config.time_grid()
    advisories: list[str] = []
    advisory = stability_advisory(grid, time_grid)
    if advisory:
        advisories.append(advisory)

    timings: dict = {}
    times = time_grid.times()
    energy: dict = {"times": times.tolist(), "wce": None, "mc": None,
                    "reference": _reference_series(config).tolist()}

    if config.sigma_scan is not None:
        scan = {}
        for sigma in config.sigma_scan:
            entry: dict = {"times": times.tolist(),
                           "reference": _reference_series(config, sigma).tolist()}
            if config.mode in ("wce", "both"):
                try:
                    start = _time.perf_counter()
                    solution = _run_wce(config, sigma)
                    timings[f"wce_seconds_sigma_{sigma:g}"] = _time.perf_counter() - start
                except SolverFailure as exc:
                    raise HarnessError("wce", exc)
                entry["wce"] = averaged_energy(solution).values.tolist()
            if config.mode in ("mc", "both"):
                try:
                    start = _time.perf_counter()
                    mc = _run_mc(config, sigma)
                    timings[f"mc_seconds_sigma_{sigma:g}"] = _time.perf_counter() - start
                except RuntimeError as exc:
                    raise HarnessError("mc", exc)
                entry["mc"] = mc.energy_mean.tolist()
            scan[f"{sigma:g}"] = entry
        return RunReport(
            config=config_to_dict(config),
            timings=timings,
            energy=energy,
            advisories=advisories,
            sigma_scan=scan,
            grid=grid,
        )

    solution = None
    wce_moments = None
    residuals = None
    if config.mode in ("wce", "both"):
        try:
            start = _time.perf_counter()
            solution = _run_wce(config)
            wce_moments = wce_moment_field(solution)
            timings["wce_seconds"] = _time.perf_counter() - start
        except SolverFailure as exc:
            raise HarnessError("wce", exc)
        energy["wce"] = averaged_energy(solution).values.tolist()
        residuals = {}
        for position, alpha, state in solution.stored_items():
            traj = CoefficientTrajectory(
                alpha=alpha,
                final_state=state,
                energy=solution.energy_series[position],
                component_integrals=solution.component_integrals[position],
            )
            residuals[str(alpha)] = validate_coefficient_energy(
                traj, model, time_grid, solution.sigmas, solution.basis
            )

    mc_result = None
    mc_moments = None
    if config.mode in ("mc", "both"):
        try:
            start = _time.perf_counter()
            mc_result = _run_mc(config)
            timings["mc_seconds"] = _time.perf_counter() - start
        except RuntimeError as exc:
            raise HarnessError("mc", exc)
        energy["mc"] = mc_result.energy_mean.tolist()
        mc_moments = _mc_moment_field(mc_result)

    errors = None
    if config.mode == "both":
        errors = {}
        for name in PRIMARY_COMPONENTS[config.model]:
            comp = model.component_index(name)
            entry = {}
            for order, label in enumerate(_MOMENT_NAMES, start=1):
                entry[label] = relative_error_frobenius(
                    wce_moments.moment(order, comp), mc_moments.moment(order, comp)
                )
                if entry[label] == float("inf"):
                    advisories.append(
                        f"zero reference norm for {name} moment {label}"
                    )
            errors[name] = entry
        if "wce_seconds" in timings and "mc_seconds" in timings and timings["wce_seconds"] > 0:
            timings["ratio_mc_over_wce"] = timings["mc_seconds"] / timings["wce_seconds"]

    return RunReport(
        config=config_to_dict(config),
        timings=timings,
        energy=energy,
        advisories=advisories,
        errors=errors,
        coefficient_energy_residuals=residuals,
        mc_final_energy_std_error=(
            mc_result.final_energy_std_error if mc_result is not None else None
        ),
        sigma_scan=None,
        wce_moments=wce_moments,
        mc_moments=mc_moments,
        solution=solution,
        grid=grid,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    return format(float(value), ".17g")


def _json_ready(obj):
    """Round floats through the 17-significant-digit serialization used for CSV."""
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _write_energy_csv(path: str, energy: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,wce_energy,mc_energy,reference\n")
        times = energy["times"]
        wce = energy.get("wce") or [None] * len(times)
        mc = energy.get("mc") or [None] * len(times)
        ref = energy["reference"]
        for row in zip(times, wce, mc, ref):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _grid_coordinate_columns(grid) -> tuple[list[str], np.ndarray]:
    names = ["x", "y", "z"][: grid.dim]
    mesh = grid.meshgrid()
    coords = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return names, coords


def _write_moments_csv(path: str, grid, comp_index: int,
                       wce: MomentField | None, mc: MomentField | None) -> None:
    names, coords = _grid_coordinate_columns(grid)
    header = list(names)
    blocks = []
    for label, mf in (("wce", wce), ("mc", mc)):
        if mf is None:
            continue
        header += [f"{label}_{m}" for m in _MOMENT_NAMES]
        blocks.append(
            np.stack(
                [mf.moment(order, comp_index).reshape(-1) for order in (1, 2, 3, 4)],
                axis=1,
            )
        )
    table = np.concatenate([coords] + blocks, axis=1)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in table:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_slice_csvs(outdir: str, grid, name: str, comp_index: int,
                      wce: MomentField | None, mc: MomentField | None,
                      manifest: list[str]) -> None:
    """Planes through coordinate 1 on each axis (wrapped onto the periodic grid)."""
    axis_names = ["x", "y", "z"][: grid.dim]
    for axis in range(grid.dim):
        # Coordinate 1 wraps onto index round(1/dx) modulo the cell count.
        index = round(1.0 / grid.spacing[axis]) % grid.cells[axis]
        path = os.path.join(outdir, f"moments_{name}_slice_{axis_names[axis]}1.csv")
        keep = [slice(None)] * grid.dim
        keep[axis] = index
        keep = tuple(keep)
        names = [n for i, n in enumerate(axis_names) if i != axis]
        mesh = [m[keep].reshape(-1) for i, m in enumerate(grid.meshgrid()) if i != axis]
        header = list(names)
        columns = list(mesh)
        for label, mf in (("wce", wce), ("mc", mc)):
            if mf is None:
                continue
            header += [f"{label}_{m}" for m in _MOMENT_NAMES]
            for order in (1, 2, 3, 4):
                columns.append(mf.moment(order, comp_index)[keep].reshape(-1))
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*columns):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        manifest.append(path)


def write_outputs(report: RunReport, outdir: str, slices: bool = False) -> list[str]:
    """Write energy.csv, per-component moment CSVs, and report.json.

    Returns the list of written paths; on failure all partial outputs are
    removed before the exception propagates.
    """
    os.makedirs(outdir, exist_ok=True)
    manifest: list[str] = []
    try:
        if report.sigma_scan is not None:
            for sigma_key, entry in report.sigma_scan.items():
                path = os.path.join(outdir, f"energy_sigma_{sigma_key}.csv")
                _write_energy_csv(path, entry)
                manifest.append(path)
        else:
            path = os.path.join(outdir, "energy.csv")
            _write_energy_csv(path, report.energy)
            manifest.append(path)

        if report.wce_moments is not None or report.mc_moments is not None:
            model_kind = report.config["model"]
            grid = report.grid
            model = get_model(model_kind)
            for name in PRIMARY_COMPONENTS[model_kind]:
                comp = model.component_index(name)
                path = os.path.join(outdir, f"moments_{name}.csv")
                _write_moments_csv(path, grid, comp, report.wce_moments, report.mc_moments)
                manifest.append(path)
                if slices and grid.dim == 3:
                    _write_slice_csvs(outdir, grid, name, comp,
                                      report.wce_moments, report.mc_moments, manifest)

        path = os.path.join(outdir, "report.json")
        with open(path, "w", newline="\n") as fh:
            json.dump(_json_ready(report.to_json_dict()), fh, indent=2)
            fh.write("\n")
        manifest.append(path)
    except Exception:
        for path in manifest:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise
    return manifest
