"""Shared state builders for the test suite."""

import numpy as np
import pytest

from choquard.grid import GridSpec, SpectralField, field_from_values, to_physical
from choquard.model import CouplingParams, SystemState


def gaussian_values(grid, center=None, width=1.0, velocity=None, amplitude=1.0):
    coords = grid.coords()
    center = center or [0.0] * grid.dim
    velocity = velocity or [0.0] * grid.dim
    r2 = sum((c - c0) ** 2 for c, c0 in zip(coords, center))
    phase = sum(v * c for v, c in zip(velocity, coords))
    return amplitude * np.exp(-r2 / (2.0 * width**2)) * np.exp(1j * phase)


def gaussian_field(grid, **kw):
    return field_from_values(grid, gaussian_values(grid, **kw))


def band_limited_field(grid, seed=0, band=4, scale=1.0):
    rng = np.random.default_rng(seed)
    spec = np.zeros(grid.shape, dtype=np.complex128)
    n = grid.points_per_axis
    idx = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis] = n
        mask &= np.abs(idx).reshape(shape) <= band
    count = int(mask.sum())
    spec[mask] = scale * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
    return to_physical(SpectralField(grid, spec, "spectral"))


def single_choquard_params(p=3.0, gamma1=0.5, lam=1.0):
    return CouplingParams(1, p, gamma1, np.array([[lam]]))


def make_state(grid, params, fields, time=0.0):
    return SystemState(params, tuple(fields), time)


@pytest.fixture
def grid_1d():
    return GridSpec(1, 64, 8.0)
