"""Fused Euler-Maruyama step kernels for the Monte Carlo sampler.

Each kernel advances a batch of sample fields by one step of the shared
curl stencil, adds the (spatially constant) per-component noise, and
accumulates the per-sample discrete energy of the new state.  The floating
point operation order mirrors ``models.curl_apply`` followed by the explicit
update, so a noise-free kernel step is bitwise identical to the numpy path.
"""
from __future__ import annotations

import numba as nb
import numpy as np


@nb.njit(cache=True)
def step_1d(s, new, dt, cH, noise, energy):
    """1D transverse system; components (E1, H1); cH = -1/(2*dx)."""
    B, _, nx = s.shape
    for b in range(B):
        acc = 0.0
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i >= 1 else nx - 1
            t0 = cH * (s[b, 1, ip] - s[b, 1, im])
            t1 = cH * (s[b, 0, ip] - s[b, 0, im])
            v0 = s[b, 0, i] + dt * t0 + noise[b, 0]
            v1 = s[b, 1, i] + dt * t1 + noise[b, 1]
            new[b, 0, i] = v0
            new[b, 1, i] = v1
            acc += v0 * v0 + v1 * v1
        energy[b] = acc


@nb.njit(cache=True)
def step_2d(s, new, dt, cx, cy, noise, energy):
    """2D TM system; components (E3, H1, H2); cx = 1/(2*dx), cy = 1/(2*dy)."""
    B, _, nx, ny = s.shape
    for b in range(B):
        acc = 0.0
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i >= 1 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j >= 1 else ny - 1
                tE = cx * (s[b, 2, ip, j] - s[b, 2, im, j])
                tE += (-cy) * (s[b, 1, i, jp] - s[b, 1, i, jm])
                tH1 = (-cy) * (s[b, 0, i, jp] - s[b, 0, i, jm])
                tH2 = cx * (s[b, 0, ip, j] - s[b, 0, im, j])
                v0 = s[b, 0, i, j] + dt * tE + noise[b, 0]
                v1 = s[b, 1, i, j] + dt * tH1 + noise[b, 1]
                v2 = s[b, 2, i, j] + dt * tH2 + noise[b, 2]
                new[b, 0, i, j] = v0
                new[b, 1, i, j] = v1
                new[b, 2, i, j] = v2
                acc += v0 * v0 + v1 * v1 + v2 * v2
        energy[b] = acc


@nb.njit(cache=True)
def step_3d(s, new, dt, cx, cy, cz, noise, energy):
    """Full 3D system; components (E1, E2, E3, H1, H2, H3)."""
    B, _, nx, ny, nz = s.shape
    for b in range(B):
        acc = 0.0
        for i in range(nx):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i >= 1 else nx - 1
            for j in range(ny):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j >= 1 else ny - 1
                for k in range(nz):
                    kp = k + 1 if k + 1 < nz else 0
                    km = k - 1 if k >= 1 else nz - 1
                    tE1 = cy * (s[b, 5, i, jp, k] - s[b, 5, i, jm, k])
                    tE1 += (-cz) * (s[b, 4, i, j, kp] - s[b, 4, i, j, km])
                    tE2 = cz * (s[b, 3, i, j, kp] - s[b, 3, i, j, km])
                    tE2 += (-cx) * (s[b, 5, ip, j, k] - s[b, 5, im, j, k])
                    tE3 = cx * (s[b, 4, ip, j, k] - s[b, 4, im, j, k])
                    tE3 += (-cy) * (s[b, 3, i, jp, k] - s[b, 3, i, jm, k])
                    tH1 = cz * (s[b, 1, i, j, kp] - s[b, 1, i, j, km])
                    tH1 += (-cy) * (s[b, 2, i, jp, k] - s[b, 2, i, jm, k])
                    tH2 = cx * (s[b, 2, ip, j, k] - s[b, 2, im, j, k])
                    tH2 += (-cz) * (s[b, 0, i, j, kp] - s[b, 0, i, j, km])
                    tH3 = cy * (s[b, 0, i, jp, k] - s[b, 0, i, jm, k])
                    tH3 += (-cx) * (s[b, 1, ip, j, k] - s[b, 1, im, j, k])
                    v0 = s[b, 0, i, j, k] + dt * tE1 + noise[b, 0]
                    v1 = s[b, 1, i, j, k] + dt * tE2 + noise[b, 1]
                    v2 = s[b, 2, i, j, k] + dt * tE3 + noise[b, 2]
                    v3 = s[b, 3, i, j, k] + dt * tH1 + noise[b, 3]
                    v4 = s[b, 4, i, j, k] + dt * tH2 + noise[b, 4]
                    v5 = s[b, 5, i, j, k] + dt * tH3 + noise[b, 5]
                    new[b, 0, i, j, k] = v0
                    new[b, 1, i, j, k] = v1
                    new[b, 2, i, j, k] = v2
                    new[b, 3, i, j, k] = v3
                    new[b, 4, i, j, k] = v4
                    new[b, 5, i, j, k] = v5
                    acc += v0 * v0 + v1 * v1 + v2 * v2
                    acc += v3 * v3 + v4 * v4 + v5 * v5
        energy[b] = acc


def em_step(model_kind: str, state: np.ndarray, new: np.ndarray, dt: float,
            spacing: tuple[float, ...], noise: np.ndarray, energy: np.ndarray) -> None:
    """Dispatch one fused batch step for the given model kind."""
    if model_kind == "1d":
        step_1d(state, new, dt, -1.0 / (2.0 * spacing[0]), noise, energy)
    elif model_kind == "2d":
        step_2d(state, new, dt, 1.0 / (2.0 * spacing[0]), 1.0 / (2.0 * spacing[1]),
                noise, energy)
    elif model_kind == "3d":
        step_3d(state, new, dt, 1.0 / (2.0 * spacing[0]), 1.0 / (2.0 * spacing[1]),
                1.0 / (2.0 * spacing[2]), noise, energy)
    else:
        raise ValueError(f"no step kernel for model kind {model_kind!r}")
