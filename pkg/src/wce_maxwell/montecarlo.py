"""Monte Carlo reference estimator.

Euler-Maruyama sample paths of the stochastic systems on the same central
difference stencils as the coefficient solver, with counter-based random
number generation keyed per sample and a fixed pairwise reduction so results
are bitwise independent of the worker count.
"""
from __future__ import annotations

import math
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import BasisSpec, basis_m_antiderivative
from .models import GridSpec, ModelVariant, TimeGrid, initial_profile

# Samples per vectorized integration block.  Fixed (not worker dependent) so
# partial sums and therefore final outputs are bitwise reproducible.
BLOCK_SIZE = 512


def _pairwise_axis0_sum(values: np.ndarray) -> np.ndarray:
    """Sum over the leading axis by pairwise folding.

    The fixed fold order makes block sums reproducible, and sums of identical
    values stay exact (each level doubles), so degenerate-noise moments match
    the deterministic powers bitwise for power-of-two counts.
    """
    while values.shape[0] > 1:
        m = values.shape[0] // 2
        paired = values[0 : 2 * m : 2] + values[1 : 2 * m : 2]
        if values.shape[0] % 2:
            paired = np.concatenate([paired, values[-1:]], axis=0)
        values = paired
    return values[0]


def _sample_generator(master_seed: int, sample_id: int) -> np.random.Generator:
    # Philox is counter based: the (seed, sample) pair keys a stream that is
    # independent of call order and worker placement.
    key = (int(master_seed) << 64) + int(sample_id)
    return np.random.Generator(np.random.Philox(key=key))


def wiener_increments(
    master_seed: int, sample_id: int, time: TimeGrid, K: int
) -> np.ndarray:
    """Gaussian increments with variance dt, shape (steps, K)."""
    rng = _sample_generator(master_seed, sample_id)
    return rng.standard_normal((time.steps, K)) * math.sqrt(time.dt)


def wiener_from_spectral(
    xi: np.ndarray, t: float, spec: BasisSpec
) -> np.ndarray:
    """Partial-sum Wiener value per channel from spectral draws.

    ``xi`` has shape (K, I): draw for basis index p of channel k at [k-1, p-1].
    """
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 2:
        raise ValueError("xi must have shape (channels, basis indices)")
    weights = np.array(
        [basis_m_antiderivative(p, t, spec) for p in range(1, xi.shape[1] + 1)]
    )
    return xi @ weights


@dataclass
class SampleAccumulator:
    """Running raw-power sums and energy sums over samples."""

    moment_sums: np.ndarray  # (4, num_components, *cells)
    energy_sum: np.ndarray  # (steps + 1,)
    final_energy_sq_sum: float
    count: int

    def merge(self, other: "SampleAccumulator") -> "SampleAccumulator":
        return SampleAccumulator(
            moment_sums=self.moment_sums + other.moment_sums,
            energy_sum=self.energy_sum + other.energy_sum,
            final_energy_sq_sum=self.final_energy_sq_sum + other.final_energy_sq_sum,
            count=self.count + other.count,
        )


@dataclass
class MCResult:
    model: ModelVariant
    grid: GridSpec
    time: TimeGrid
    samples: int
    master_seed: int
    moments: np.ndarray  # (4, num_components, *cells) raw moments at the horizon
    energy_mean: np.ndarray  # (steps + 1,)
    final_energy_std_error: float
    duration: float

    def moment(self, order: int, component: int) -> np.ndarray:
        if order not in (1, 2, 3, 4):
            raise ValueError("moment order must be 1..4")
        return self.moments[order - 1, component]


def _integrate_block(
    model: ModelVariant,
    grid: GridSpec,
    time: TimeGrid,
    sigmas: tuple[float, ...],
    master_seed: int,
    first_sample: int,
    block: int,
) -> SampleAccumulator:
    """Euler-Maruyama integration of ``block`` samples, vectorized over the batch."""
    from ._kernels import em_step

    steps = time.steps
    dt = time.dt
    K = model.num_channels
    cell_volume = grid.cell_volume

    increments = np.empty((block, steps, K))
    for j in range(block):
        increments[j] = wiener_increments(master_seed, first_sample + j, time, K)

    # Channel-to-component amplitude matrix: noise added per step is dW @ amps.
    amps = np.zeros((K, model.num_components))
    for term in model.noise_terms:
        amps[term.channel - 1, term.component] = term.sign * sigmas[term.channel - 1]

    state = np.broadcast_to(
        initial_profile(model, grid), (block, model.num_components) + grid.cells
    ).copy()
    scratch = np.empty_like(state)
    per_sample_energy = np.empty(block)

    energy_sum = np.empty(steps + 1)
    sq_axes = tuple(range(1, state.ndim))
    energy_sum[0] = float((state * state).sum(axis=sq_axes).sum()) * cell_volume

    for n in range(steps):
        noise = increments[:, n, :] @ amps
        em_step(model.kind, state, scratch, dt, grid.spacing, noise, per_sample_energy)
        state, scratch = scratch, state
        if not np.isfinite(per_sample_energy).all():
            bad = int(np.argmin(np.isfinite(per_sample_energy)))
            raise RuntimeError(
                f"non-finite sample values in sample {first_sample + bad} at step {n + 1}"
            )
        energy_sum[n + 1] = per_sample_energy.sum() * cell_volume
    per_sample_energy = per_sample_energy * cell_volume

    moment_sums = np.empty((4,) + state.shape[1:])
    power = state.copy()
    moment_sums[0] = _pairwise_axis0_sum(power)
    for order in range(1, 4):
        power *= state
        moment_sums[order] = _pairwise_axis0_sum(power)
    return SampleAccumulator(
        moment_sums=moment_sums,
        energy_sum=energy_sum,
        final_energy_sq_sum=float((per_sample_energy * per_sample_energy).sum()),
        count=block,
    )


def _block_task(args):
    index, model, grid, time, sigmas, master_seed, first_sample, block = args
    return index, _integrate_block(model, grid, time, sigmas, master_seed, first_sample, block)


def _tree_reduce(parts: list[SampleAccumulator]) -> SampleAccumulator:
    """Fixed-shape pairwise reduction by block index."""
    while len(parts) > 1:
        merged = []
        for i in range(0, len(parts) - 1, 2):
            merged.append(parts[i].merge(parts[i + 1]))
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def mc_run(
    model: ModelVariant,
    grid: GridSpec,
    time: TimeGrid,
    sigmas: tuple[float, ...],
    samples: int,
    master_seed: int,
    workers: int = 1,
) -> MCResult:
    """Sample-moment estimation with reproducible parallel path generation."""
    if samples < 1:
        raise ValueError("need at least one sample")
    start = _time.perf_counter()
    tasks = []
    first = 0
    index = 0
    while first < samples:
        block = min(BLOCK_SIZE, samples - first)
        tasks.append((index, model, grid, time, sigmas, master_seed, first, block))
        first += block
        index += 1

    parts: dict[int, SampleAccumulator] = {}
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for idx, acc in pool.map(_block_task, tasks):
                parts[idx] = acc
    else:
        for task in tasks:
            idx, acc = _block_task(task)
            parts[idx] = acc
    total = _tree_reduce([parts[i] for i in sorted(parts)])

    moments = total.moment_sums / total.count
    energy_mean = total.energy_sum / total.count
    final_mean = energy_mean[-1]
    if total.count > 1:
        var = (total.final_energy_sq_sum / total.count - final_mean * final_mean) * (
            total.count / (total.count - 1)
        )
        std_error = math.sqrt(max(var, 0.0) / total.count)
    else:
        std_error = float("inf")
    duration = _time.perf_counter() - start
    return MCResult(
        model=model,
        grid=grid,
        time=time,
        samples=samples,
        master_seed=master_seed,
        moments=moments,
        energy_mean=energy_mean,
        final_energy_std_error=std_error,
        duration=duration,
    )
