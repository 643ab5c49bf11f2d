"""Shared fixtures and oracles for the test suite."""
import numpy as np
import pytest

from wce_maxwell.chaos import MultiIndex
from wce_maxwell.config import parse_config


def characteristics_solution(grid, t):
    """Exact solution of the deterministic 1D transverse system.

    The system dE1/dt = -dH1/dx, dH1/dt = -dE1/dx with the experiment's
    trigonometric data decouples along characteristics into
    E1 = sin(x - t) + cos(x + t), H1 = sin(x - t) - cos(x + t).
    """
    (x,) = grid.axes()
    return np.stack([np.sin(x - t) + np.cos(x + t), np.sin(x - t) - np.cos(x + t)])


def make_config(doc: str):
    return parse_config(doc)


@pytest.fixture(scope="session")
def config_1d():
    """The 1D experiment configuration (200 cells, 1000 steps, J_{20,2})."""
    return parse_config("model = 1d")


@pytest.fixture(scope="session")
def small_1d_solution():
    """A cheap 1D chaos solve with N=2, I=2 on a 64-cell grid."""
    from wce_maxwell.propagator import solve_propagator

    cfg = parse_config("model = 1d\ncells = 64\nsteps = 200\nwce_order = 2")
    return solve_propagator(
        model=cfg.model_variant(),
        grid=cfg.grid(),
        time=cfg.time_grid(),
        sigmas=cfg.sigmas(),
        truncation=cfg.truncation(),
    )


ZERO = MultiIndex()
