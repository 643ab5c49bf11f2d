"""Deterministic coefficient system: assembly and explicit time integration.

Every multi-index in the truncation set owns an unforced or first-order-forced
copy of the curl dynamics; integration is forward Euler in time with central
differences in space on periodic grids.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import BasisSpec, MultiIndex, TruncationSet, basis_m
from .models import (
    FieldState,
    GridSpec,
    ModelVariant,
    TimeGrid,
    curl_apply,
    initial_profile,
)


class SolverFailure(RuntimeError):
    """Non-finite values during a coefficient solve."""


def stability_advisory(grid: GridSpec, time: TimeGrid) -> str | None:
    """Non-fatal warning when the explicit step is large relative to the mesh."""
    ratio = time.dt / min(grid.spacing)
    if ratio > 0.5:
        return (
            f"explicit time step ratio dt/min(spacing) = {ratio:.4g} exceeds 0.5; "
            "the forward-Euler/central-difference update may be unstable"
        )
    return None


def initial_condition(model: ModelVariant, grid: GridSpec, alpha: MultiIndex) -> FieldState:
    """Experiment initial data for the zero index, the zero field otherwise."""
    if alpha.order == 0:
        return FieldState(model, grid, initial_profile(model, grid))
    return FieldState.zeros(model, grid)


def forcing_terms(
    alpha: MultiIndex, model: ModelVariant, sigmas: tuple[float, ...]
) -> list[tuple[int, float, int]]:
    """(component index, signed amplitude, basis index p) triples driving alpha.

    Nonempty only for first-order indices: alpha = e_{k,p} forces every
    component wired to channel k with amplitude sign * sigma_k.
    """
    if len(sigmas) != model.num_channels:
        raise ValueError(
            f"model {model.kind} needs {model.num_channels} noise amplitudes, got {len(sigmas)}"
        )
    if alpha.order != 1:
        return []
    ((k, p), _) = alpha.entries[0]
    if k > model.num_channels:
        return []
    return [
        (term.component, term.sign * sigmas[k - 1], p)
        for term in model.noise_terms
        if term.channel == k
    ]


def spatial_rhs(state: FieldState) -> FieldState:
    """Curl-stencil image of a field state."""
    return FieldState(state.model, state.grid, curl_apply(state.data, state.model, state.grid))


def step_explicit(
    state: FieldState,
    t_n: float,
    time: TimeGrid,
    forcing: list[tuple[int, float, int]],
    basis: BasisSpec,
) -> FieldState:
    """One forward-Euler step with forcing sampled at the left endpoint."""
    new = state.data + time.dt * curl_apply(state.data, state.model, state.grid)
    for comp, amplitude, p in forcing:
        new[comp] += time.dt * amplitude * basis_m(p, t_n, basis)
    return FieldState(state.model, state.grid, new)


@dataclass
class CoefficientTrajectory:
    """Final state plus per-step diagnostics of one coefficient solve."""

    alpha: MultiIndex
    final_state: FieldState
    energy: np.ndarray  # (steps + 1,)
    component_integrals: np.ndarray  # (steps + 1, num_components)


def _energy_and_integrals(data: np.ndarray, cell_volume: float):
    space_axes = tuple(range(1, data.ndim))
    integrals = data.sum(axis=space_axes) * cell_volume
    energy = float((data * data).sum()) * cell_volume
    return energy, integrals


def solve_coefficient(
    alpha: MultiIndex,
    model: ModelVariant,
    grid: GridSpec,
    time: TimeGrid,
    sigmas: tuple[float, ...],
    basis: BasisSpec | None = None,
) -> CoefficientTrajectory:
    """Integrate one coefficient from its initial datum through all steps."""
    basis = basis or BasisSpec(time.horizon)
    state = initial_condition(model, grid, alpha)
    forcing = forcing_terms(alpha, model, sigmas)
    steps = time.steps
    energy = np.empty(steps + 1)
    integrals = np.empty((steps + 1, model.num_components))
    energy[0], integrals[0] = _energy_and_integrals(state.data, grid.cell_volume)
    for n in range(steps):
        state = step_explicit(state, n * time.dt, time, forcing, basis)
        e, ints = _energy_and_integrals(state.data, grid.cell_volume)
        if not np.isfinite(e):
            raise SolverFailure(
                f"non-finite values in coefficient {alpha} at step {n + 1}"
            )
        energy[n + 1] = e
        integrals[n + 1] = ints
    return CoefficientTrajectory(alpha, state, energy, integrals)


@dataclass
class WceSolution:
    """Coefficient fields at the horizon plus per-coefficient energy series.

    Identically-zero coefficients (every |alpha| >= 2 index under additive
    noise) are stored implicitly; accessors materialize zero fields on demand.
    """

    model: ModelVariant
    grid: GridSpec
    time: TimeGrid
    sigmas: tuple[float, ...]
    truncation: TruncationSet
    basis: BasisSpec
    coefficients: dict[int, FieldState]
    energy_series: dict[int, np.ndarray]
    component_integrals: dict[int, np.ndarray]

    def coefficient(self, position: int) -> FieldState:
        if position < 0 or position >= len(self.truncation):
            raise IndexError(position)
        if position in self.coefficients:
            return self.coefficients[position]
        return FieldState.zeros(self.model, self.grid)

    def coefficient_for(self, alpha: MultiIndex) -> FieldState:
        return self.coefficient(self.truncation.position(alpha))

    def is_stored(self, position: int) -> bool:
        return position in self.coefficients

    def stored_items(self):
        """(position, alpha, state) for explicitly solved coefficients, by position."""
        for position in sorted(self.coefficients):
            yield position, self.truncation.members[position], self.coefficients[position]

    def energy_for(self, position: int) -> np.ndarray:
        if position in self.energy_series:
            return self.energy_series[position]
        return np.zeros(self.time.steps + 1)


def _solve_task(args):
    position, alpha, model, grid, time, sigmas, basis = args
    traj = solve_coefficient(alpha, model, grid, time, sigmas, basis)
    return position, traj


def solve_propagator(
    model: ModelVariant,
    grid: GridSpec,
    time: TimeGrid,
    sigmas: tuple[float, ...],
    truncation: TruncationSet,
    short_circuit: bool = True,
    workers: int = 1,
) -> WceSolution:
    """Solve the coefficient system for every truncation-set member.

    With ``short_circuit`` enabled (the default), indices of order >= 2 are
    recognized as identically-zero trajectories and skipped; the stored
    payload is identical either way.  Results are assembled by truncation
    position, so any worker count yields the same solution.
    """
    basis = BasisSpec(time.horizon)
    tasks = []
    for position, alpha in enumerate(truncation.members):
        if short_circuit and alpha.order >= 2:
            continue
        tasks.append((position, alpha, model, grid, time, sigmas, basis))

    results: dict[int, CoefficientTrajectory] = {}
    failures = []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for position, traj in pool.map(_solve_task, tasks):
                results[position] = traj
    else:
        for task in tasks:
            try:
                position, traj = _solve_task(task)
                results[position] = traj
            except SolverFailure as exc:
                failures.append(str(exc))
    if failures:
        raise SolverFailure("; ".join(failures))

    coefficients: dict[int, FieldState] = {}
    energy_series: dict[int, np.ndarray] = {}
    component_integrals: dict[int, np.ndarray] = {}
    for position in sorted(results):
        traj = results[position]
        coefficients[position] = traj.final_state
        # Drop all-zero payloads so the container is the same with and
        # without the short circuit.
        if traj.energy[0] == 0.0 and not traj.energy.any() and not traj.final_state.data.any():
            if not traj.component_integrals.any():
                del coefficients[position]
                continue
        energy_series[position] = traj.energy
        component_integrals[position] = traj.component_integrals
    return WceSolution(
        model=model,
        grid=grid,
        time=time,
        sigmas=sigmas,
        truncation=truncation,
        basis=basis,
        coefficients=coefficients,
        energy_series=energy_series,
        component_integrals=component_integrals,
    )
