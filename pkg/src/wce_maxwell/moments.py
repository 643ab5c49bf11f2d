"""Statistical moments, averaged energy, and comparison metrics.

Moments of orders one and two come straight from the coefficient fields;
orders three and four evaluate the Wick product triple sums.  The Gaussian
closed-form oracle provides an independent check of the same quantities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chaos import BasisSpec, MultiIndex, basis_m, wick_G
from .models import FieldState, GridSpec, ModelVariant, TimeGrid
from .propagator import CoefficientTrajectory, WceSolution, forcing_terms


@dataclass
class MomentField:
    """Raw moments of orders 1..4 per component per grid point."""

    components: tuple[str, ...]
    mean: np.ndarray
    second: np.ndarray
    third: np.ndarray
    fourth: np.ndarray

    def moment(self, order: int, component: int) -> np.ndarray:
        if order == 1:
            return self.mean[component]
        if order == 2:
            return self.second[component]
        if order == 3:
            return self.third[component]
        if order == 4:
            return self.fourth[component]
        raise ValueError("moment order must be 1..4")

    def check_consistency(self, slack: float = 1e-9) -> None:
        """Cauchy-Schwarz inequalities up to roundoff, pointwise."""
        eps = slack * (1.0 + np.abs(self.fourth))
        if not (self.second >= self.mean**2 - eps).all():
            raise ValueError("second moment violates mean**2 lower bound")
        if not (self.fourth >= self.second**2 - eps).all():
            raise ValueError("fourth moment violates second**2 lower bound")


@dataclass
class EnergySeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")


def mean_field(solution: WceSolution) -> FieldState:
    """The zero-index coefficient, verbatim."""
    return solution.coefficient(0)


def second_moment(solution: WceSolution) -> np.ndarray:
    """Pointwise sum of squared coefficients, shape (num_components, *cells)."""
    out = np.zeros((solution.model.num_components,) + solution.grid.cells)
    for _, _, state in solution.stored_items():
        out += state.data * state.data
    return out


def _nonzero_coefficients(solution: WceSolution):
    items = []
    for position, alpha, state in solution.stored_items():
        if state.data.any():
            items.append((alpha, state.data))
    return items


def _product_brackets(solution: WceSolution) -> dict[MultiIndex, np.ndarray]:
    """Chaos coefficients of the squared field via the pruned triple sum.

    For each admissible (alpha, beta, rho) triple the contribution
    G(alpha, beta, rho) * u_{alpha-beta+rho} * u_{beta+rho} is accumulated at
    alpha.  Triples are enumerated through the pair of looked-up coefficient
    indices (gamma1, gamma2) = (alpha-beta+rho, beta+rho), which restricts the
    scan to coefficients that are not zero fields; out-of-truncation alpha or
    rho are excluded, matching the truncated-expansion semantics.
    """
    truncation = solution.truncation
    nonzero = _nonzero_coefficients(solution)
    brackets: dict[MultiIndex, np.ndarray] = {}
    for gamma1, data1 in nonzero:
        for gamma2, data2 in nonzero:
            for rho in truncation.members:
                if not (rho.leq(gamma1) and rho.leq(gamma2)):
                    continue
                beta = gamma2 - rho
                alpha = (gamma1 + gamma2) - rho.scaled(2)
                if alpha not in truncation:
                    continue
                weight = wick_G(alpha, beta, rho)
                if weight == 0.0:
                    continue
                acc = brackets.get(alpha)
                if acc is None:
                    acc = np.zeros_like(data1)
                    brackets[alpha] = acc
                acc += weight * (data1 * data2)
    return brackets


def higher_moments(solution: WceSolution, order: int) -> np.ndarray:
    """Third or fourth raw moment per component via the Wick triple sums."""
    if order not in (3, 4):
        raise ValueError("order must be 3 or 4")
    brackets = _product_brackets(solution)
    out = np.zeros((solution.model.num_components,) + solution.grid.cells)
    if order == 3:
        for alpha, bracket in brackets.items():
            coeff = solution.coefficient_for(alpha)
            out += bracket * coeff.data
    else:
        for bracket in brackets.values():
            out += bracket * bracket
    return out


def gaussian_moment_oracle(solution: WceSolution, tolerance: float = 1e-12) -> MomentField:
    """Closed-form raw moments exploiting the Gaussian structure of the solution.

    Valid only when every coefficient of order >= 2 vanishes; checked and
    enforced loudly.
    """
    for position, alpha, state in solution.stored_items():
        if alpha.order >= 2 and np.abs(state.data).max() > tolerance:
            raise ValueError(
                f"coefficient {alpha} of order {alpha.order} is non-negligible; "
                "the Gaussian closed form does not apply"
            )
    m = solution.coefficient(0).data
    s2 = np.zeros_like(m)
    for _, alpha, state in solution.stored_items():
        if alpha.order == 1:
            s2 += state.data * state.data
    return MomentField(
        components=solution.model.components,
        mean=m.copy(),
        second=m**2 + s2,
        third=m**3 + 3.0 * m * s2,
        fourth=m**4 + 6.0 * m**2 * s2 + 3.0 * s2**2,
    )


def wce_moment_field(solution: WceSolution) -> MomentField:
    """Raw moments 1..4 assembled from the chaos coefficients."""
    mean = mean_field(solution).data
    return MomentField(
        components=solution.model.components,
        mean=mean,
        second=second_moment(solution),
        third=higher_moments(solution, 3),
        fourth=higher_moments(solution, 4),
    )


def discrete_energy(state: FieldState) -> float:
    """Cell-volume weighted sum of squared components."""
    return float((state.data * state.data).sum()) * state.grid.cell_volume


def averaged_energy(solution: WceSolution) -> EnergySeries:
    """Sum of per-coefficient discrete energies, per time step."""
    values = np.zeros(solution.time.steps + 1)
    for series in solution.energy_series.values():
        values = values + series
    return EnergySeries(times=solution.time.times(), values=values)


def energy_growth_rate(model: ModelVariant, sigmas: tuple[float, ...], volume: float) -> float:
    """Linear growth rate of the averaged energy: one sigma_k^2 * volume per forced component."""
    if len(sigmas) != model.num_channels:
        raise ValueError(
            f"model {model.kind} needs {model.num_channels} noise amplitudes, got {len(sigmas)}"
        )
    return sum(sigmas[term.channel - 1] ** 2 for term in model.noise_terms) * volume


def energy_reference(
    t: float,
    model: ModelVariant,
    sigmas: tuple[float, ...],
    volume: float,
    phi0: float,
) -> float:
    """Averaged energy linear growth law evaluated at time t."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    return phi0 + energy_growth_rate(model, sigmas, volume) * t


def validate_coefficient_energy(
    trajectory: CoefficientTrajectory,
    model: ModelVariant,
    time: TimeGrid,
    sigmas: tuple[float, ...],
    basis: BasisSpec | None = None,
) -> float:
    """Residual of the per-coefficient energy balance at the horizon.

    The forcing work integral is computed by trapezoid quadrature over the
    step grid from the recorded spatial component integrals.
    """
    basis = basis or BasisSpec(time.horizon)
    alpha = trajectory.alpha
    forcing = forcing_terms(alpha, model, sigmas)
    times = time.times()
    gamma = 0.0
    for comp, amplitude, p in forcing:
        weights = np.array([basis_m(p, min(t, basis.horizon), basis) for t in times])
        integrand = weights * trajectory.component_integrals[:, comp]
        gamma += 2.0 * amplitude * np.trapezoid(integrand, times)
    indicator = 1.0 if alpha.order == 0 else 0.0
    final = trajectory.energy[-1]
    return abs(final - indicator * trajectory.energy[0] - gamma) / (1.0 + final)


def relative_error_frobenius(candidate: np.ndarray, reference: np.ndarray) -> float:
    """Frobenius norm of the difference over the Frobenius norm of the reference.

    A zero reference norm yields inf as a distinct failure value rather than
    a quotient.
    """
    candidate = np.asarray(candidate, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if candidate.shape != reference.shape:
        raise ValueError(f"shape mismatch: {candidate.shape} vs {reference.shape}")
    ref_norm = float(np.linalg.norm(reference))
    if ref_norm == 0.0:
        return math.inf
    return float(np.linalg.norm(candidate - reference)) / ref_norm
