"""Model variants, periodic structured grids, and field containers.

Each model variant fixes the scalar field components, the curl stencil that
couples them, and the noise channel wiring of the corresponding stochastic
system (1D transverse, 2D TM, full 3D).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np


class CurlTerm(NamedTuple):
    """One signed central-difference contribution: d(target)/dt += sign * d(source)/d(axis)."""

    target: int
    source: int
    axis: int
    sign: float


class NoiseTerm(NamedTuple):
    """Component ``component`` is driven by Wiener channel ``channel`` with amplitude sign."""

    component: int
    channel: int
    sign: float


@dataclass(frozen=True)
class ModelVariant:
    kind: str
    dim: int
    components: tuple[str, ...]
    curl_terms: tuple[CurlTerm, ...]
    noise_terms: tuple[NoiseTerm, ...]
    num_channels: int
    default_extent: tuple[float, ...]

    @property
    def num_components(self) -> int:
        return len(self.components)

    def component_index(self, name: str) -> int:
        return self.components.index(name)


TWO_PI = 2.0 * math.pi

MAXWELL_1D = ModelVariant(
    kind="1d",
    dim=1,
    components=("E1", "H1"),
    # dE1/dt = -dH1/dx, dH1/dt = -dE1/dx
    curl_terms=(
        CurlTerm(target=0, source=1, axis=0, sign=-1.0),
        CurlTerm(target=1, source=0, axis=0, sign=-1.0),
    ),
    noise_terms=(
        NoiseTerm(component=0, channel=1, sign=-1.0),
        NoiseTerm(component=1, channel=1, sign=+1.0),
    ),
    num_channels=1,
    default_extent=(TWO_PI,),
)

MAXWELL_2D_TM = ModelVariant(
    kind="2d",
    dim=2,
    components=("E3", "H1", "H2"),
    # dE3/dt = dH2/dx - dH1/dy, dH1/dt = -dE3/dy, dH2/dt = dE3/dx
    curl_terms=(
        CurlTerm(target=0, source=2, axis=0, sign=+1.0),
        CurlTerm(target=0, source=1, axis=1, sign=-1.0),
        CurlTerm(target=1, source=0, axis=1, sign=-1.0),
        CurlTerm(target=2, source=0, axis=0, sign=+1.0),
    ),
    noise_terms=(
        NoiseTerm(component=0, channel=1, sign=+1.0),
        NoiseTerm(component=1, channel=1, sign=+1.0),
        NoiseTerm(component=2, channel=1, sign=+1.0),
    ),
    num_channels=1,
    default_extent=(TWO_PI, TWO_PI),
)

MAXWELL_3D = ModelVariant(
    kind="3d",
    dim=3,
    components=("E1", "E2", "E3", "H1", "H2", "H3"),
    # dE/dt = curl H, dH/dt = -curl E
    curl_terms=(
        CurlTerm(target=0, source=5, axis=1, sign=+1.0),
        CurlTerm(target=0, source=4, axis=2, sign=-1.0),
        CurlTerm(target=1, source=3, axis=2, sign=+1.0),
        CurlTerm(target=1, source=5, axis=0, sign=-1.0),
        CurlTerm(target=2, source=4, axis=0, sign=+1.0),
        CurlTerm(target=2, source=3, axis=1, sign=-1.0),
        CurlTerm(target=3, source=1, axis=2, sign=+1.0),
        CurlTerm(target=3, source=2, axis=1, sign=-1.0),
        CurlTerm(target=4, source=2, axis=0, sign=+1.0),
        CurlTerm(target=4, source=0, axis=2, sign=-1.0),
        CurlTerm(target=5, source=0, axis=1, sign=+1.0),
        CurlTerm(target=5, source=1, axis=0, sign=-1.0),
    ),
    noise_terms=(
        NoiseTerm(component=0, channel=1, sign=+1.0),
        NoiseTerm(component=1, channel=1, sign=+1.0),
        NoiseTerm(component=2, channel=1, sign=+1.0),
        NoiseTerm(component=3, channel=2, sign=+1.0),
        NoiseTerm(component=4, channel=2, sign=+1.0),
        NoiseTerm(component=5, channel=2, sign=+1.0),
    ),
    num_channels=2,
    default_extent=(1.0, 1.0, 1.0),
)

MODELS = {m.kind: m for m in (MAXWELL_1D, MAXWELL_2D_TM, MAXWELL_3D)}


def get_model(kind: str) -> ModelVariant:
    try:
        return MODELS[kind]
    except KeyError:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(MODELS)}")


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic structured grid."""

    extent: tuple[float, ...]
    cells: tuple[int, ...]

    def __post_init__(self):
        if len(self.extent) != len(self.cells):
            raise ValueError("extent and cells must have the same length")
        if any(n < 4 for n in self.cells):
            raise ValueError("need at least 4 cells per axis")
        if any(not L > 0 for L in self.extent):
            raise ValueError("extents must be positive")

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.extent, self.cells))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def volume(self) -> float:
        return math.prod(self.extent)

    @property
    def num_points(self) -> int:
        return math.prod(self.cells)

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            np.arange(n) * d for n, d in zip(self.cells, self.spacing)
        )

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))


@dataclass
class FieldState:
    """One scalar array per component of a model variant on a grid."""

    model: ModelVariant
    grid: GridSpec
    data: np.ndarray  # shape (num_components, *cells)

    def __post_init__(self):
        expected = (self.model.num_components,) + self.grid.cells
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != expected {expected}")

    @classmethod
    def zeros(cls, model: ModelVariant, grid: GridSpec) -> "FieldState":
        return cls(model, grid, np.zeros((model.num_components,) + grid.cells))

    def copy(self) -> "FieldState":
        return FieldState(self.model, self.grid, self.data.copy())

    def component(self, name: str) -> np.ndarray:
        return self.data[self.model.component_index(name)]


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("need at least one time step")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt


def initial_profile(model: ModelVariant, grid: GridSpec) -> np.ndarray:
    """Deterministic initial field data of the model's experiment, sampled on the grid."""
    if grid.dim != model.dim:
        raise ValueError(f"grid dimension {grid.dim} != model dimension {model.dim}")
    if model.kind == "1d":
        (x,) = grid.axes()
        return np.stack([np.sin(x) + np.cos(x), np.sin(x) - np.cos(x)])
    if model.kind == "2d":
        X, Y = grid.meshgrid()
        return np.stack([np.sin(X) - np.cos(Y), np.cos(Y), np.sin(X)])
    if model.kind == "3d":
        X, Y, Z = grid.meshgrid()
        sx, cx = np.sin(np.pi * X), np.cos(np.pi * X)
        sy, cy = np.sin(2 * np.pi * Y), np.cos(2 * np.pi * Y)
        sz, cz = np.sin(-3 * np.pi * Z), np.cos(-3 * np.pi * Z)
        r14 = math.sqrt(14.0)
        return np.stack(
            [
                (5.0 / r14) * cx * sy * sz,
                (-4.0 / r14) * sx * cy * sz,
                (-1.0 / r14) * sx * sy * sz,
                sx * cy * cz,
                cx * sy * cz,
                cx * cy * sz,
            ]
        )
    raise ValueError(f"unknown model kind {model.kind!r}")


def curl_apply(data: np.ndarray, model: ModelVariant, grid: GridSpec) -> np.ndarray:
    """Apply the periodic central-difference curl stencil.

    ``data`` has shape (..., num_components, *cells); leading batch axes are
    carried through unchanged.
    """
    out = np.zeros_like(data)
    spacing = grid.spacing
    dim = grid.dim
    space_slices = (slice(None),) * dim
    for term in model.curl_terms:
        src = data[(Ellipsis, term.source) + space_slices]
        axis = src.ndim - dim + term.axis
        diff = np.roll(src, -1, axis=axis) - np.roll(src, 1, axis=axis)
        out[(Ellipsis, term.target) + space_slices] += (
            term.sign / (2.0 * spacing[term.axis])
        ) * diff
    return out
