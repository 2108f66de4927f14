"""Discretized Riesz potentials and Morawetz weight kernels with FFT convolution.

Kernels are sampled on the grid from their closed forms at the torus minimal
image radius. The cell at the origin, where the Riesz potential is singular,
is replaced by the average of the closed form over the ball whose volume
equals one grid cell: radius ``r_eq = h * Gamma(d/2+1)^(1/d) / sqrt(pi)``
(``h/2`` in one dimension). This preserves the cell integral, which is what
the convolution quadrature consumes. Odd (gradient-type) kernels get zero at
the origin and on the ``x_a = -L`` plane of their axis so the samples are
exactly odd under torus negation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import PHYSICAL, SPECTRAL, GridSpec, SpectralField, in_physical

RIESZ = "riesz"
RIESZ_GRADIENT = "riesz_gradient"
ABS_WEIGHT = "abs_weight"
ABS_GRADIENT = "abs_gradient"
ABS_LAPLACIAN = "abs_laplacian"
ABS_BILAPLACIAN = "abs_bilaplacian"

KINDS = (RIESZ, RIESZ_GRADIENT, ABS_WEIGHT, ABS_GRADIENT, ABS_LAPLACIAN, ABS_BILAPLACIAN)

DIRECT_SUM_LIMIT = 4096


class UnsupportedKernelError(ValueError):
    """Requested kernel kind does not exist for the given dimension."""


class CostGuardError(RuntimeError):
    """Direct-summation oracle refused: the grid is too large."""


def equal_volume_radius(grid: GridSpec) -> float:
    """Radius of the d-ball whose volume equals one grid cell ``h^d``."""
    d = grid.dim
    return grid.spacing * math.gamma(d / 2 + 1) ** (1.0 / d) / math.sqrt(math.pi)


def riesz_singular_value(grid: GridSpec, gamma: float) -> float:
    """Equal-volume-ball average of ``|x|^(gamma-d)``: ``(d/gamma) r_eq^(gamma-d)``."""
    r_eq = equal_volume_radius(grid)
    return (grid.dim / gamma) * r_eq ** (gamma - grid.dim)


def abs_laplacian_profile(r, d: int):
    """Closed form of ``Lap|x|`` away from the origin: ``(d-1)/|x|`` for d >= 2.

    In one dimension the profile vanishes away from 0; the second derivative
    of ``|x|`` is the point mass ``2 delta_0``, handled at sampling time.
    """
    return (d - 1) / r


def abs_bilaplacian_profile(r, d: int):
    """Closed form of ``Lap^2|x|`` away from the origin: ``-(d-1)(d-3)/|x|^3``.

    Identically zero for d = 3 apart from a point mass, negative for d >= 4.
    """
    return -(d - 1) * (d - 3) / r**3


def kernel_spectrum(samples: np.ndarray) -> np.ndarray:
    """Raw DFT of the samples rotated so the origin cell comes first.

    Samples live in grid layout (coordinate ``-L`` at index 0, the origin at
    index ``n/2``); the convolution theorem wants displacement layout, hence
    the ``ifftshift``.
    """
    return np.fft.fftn(np.fft.ifftshift(samples))


@dataclass(frozen=True)
class KernelTable:
    """Sampled kernel plus its cached (raw, non-normalized) DFT."""

    grid: GridSpec
    kind: str
    samples: np.ndarray
    gamma: float | None = None
    axis: int | None = None
    spectrum: np.ndarray = field(init=False)

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        spectrum = kernel_spectrum(samples)
        spectrum.setflags(write=False)
        object.__setattr__(self, "spectrum", spectrum)


def _radius_and_coords(grid: GridSpec):
    coords = grid.coords()
    r2 = np.zeros(grid.shape)
    for c in coords:
        r2 += c * c
    return np.sqrt(r2), coords


def _origin_index(grid: GridSpec):
    n = grid.points_per_axis
    return tuple([n // 2] * grid.dim)  # coordinate 0 sits at index n/2


def _zero_negL_plane(samples: np.ndarray, axis: int):
    index = [slice(None)] * samples.ndim
    index[axis] = 0  # coordinate -L sits at index 0
    samples[tuple(index)] = 0.0


def build_kernel(
    grid: GridSpec, kind: str, gamma: float | None = None, axis: int | None = None
) -> KernelTable:
    """Sample one kernel kind over the grid and cache its spectrum."""
    if kind not in KINDS:
        raise UnsupportedKernelError(f"unknown kernel kind {kind!r}")
    d = grid.dim
    if kind in (RIESZ, RIESZ_GRADIENT):
        if gamma is None or not 0 < gamma < d:
            raise ValueError(f"riesz kernels need 0 < gamma < d, got gamma={gamma}, d={d}")
    if kind in (RIESZ_GRADIENT, ABS_GRADIENT):
        if axis is None or not 0 <= axis < d:
            raise ValueError(f"gradient kernels need an axis in [0, {d}), got {axis}")
    if kind == ABS_BILAPLACIAN and d < 4:
        raise UnsupportedKernelError(
            "abs_bilaplacian needs d >= 4; it vanishes at d = 3 up to a point mass"
        )

    r, coords = _radius_and_coords(grid)
    origin = _origin_index(grid)
    r_safe = r.copy()
    r_safe[origin] = 1.0  # placeholder, overwritten below

    if kind == RIESZ:
        samples = r_safe ** (gamma - d)
        samples[origin] = riesz_singular_value(grid, gamma)
    elif kind == RIESZ_GRADIENT:
        samples = -(d - gamma) * coords[axis] * r_safe ** (gamma - d - 2)
        samples[origin] = 0.0
        _zero_negL_plane(samples, axis)
    elif kind == ABS_WEIGHT:
        samples = r.copy()
    elif kind == ABS_GRADIENT:
        samples = coords[axis] / r_safe
        samples[origin] = 0.0
        _zero_negL_plane(samples, axis)
    elif kind == ABS_LAPLACIAN:
        if d == 1:
            # Lap|x| = 2 delta_0; one on-diagonal cell of weight 2/h keeps
            # the quadrature pairing h * sum(samples * f) = 2 f(0).
            samples = np.zeros(grid.shape)
            samples[origin] = 2.0 / grid.spacing
        else:
            samples = abs_laplacian_profile(r_safe, d)
            # same cell-average rule as riesz with gamma = d-1, prefactor d-1
            samples[origin] = d / equal_volume_radius(grid)
    else:  # ABS_BILAPLACIAN, d >= 4 only (unreachable for valid grids)
        samples = abs_bilaplacian_profile(r_safe, d)
        samples[origin] = 0.0

    return KernelTable(grid, kind, samples, gamma=gamma, axis=axis)


def abs_hessian_samples(grid: GridSpec) -> list[list[np.ndarray]]:
    """Entries of ``D^2|x| = I/|x| - (x (x)T x)/|x|^3`` sampled on the grid.

    The singular cell gets the equal-volume-ball average ``delta_ab / r_eq``
    (whose trace reproduces the abs_laplacian cell value). In one dimension
    the single entry is the ``2 delta_0`` point mass, sampled as ``2/h``.
    """
    d = grid.dim
    if d == 1:
        h = np.zeros(grid.shape)
        h[_origin_index(grid)] = 2.0 / grid.spacing
        return [[h]]
    r, coords = _radius_and_coords(grid)
    origin = _origin_index(grid)
    r_safe = r.copy()
    r_safe[origin] = 1.0
    r_eq = equal_volume_radius(grid)
    out = []
    for a in range(d):
        row = []
        for b in range(d):
            entry = -coords[a] * coords[b] / r_safe**3
            if a == b:
                entry = entry + 1.0 / r_safe
                entry[origin] = 1.0 / r_eq
            else:
                entry[origin] = 0.0
            row.append(entry)
        out.append(row)
    return out


def _raw_spectrum(f: SpectralField) -> np.ndarray:
    """Non-normalized DFT of the physical values."""
    if f.representation == SPECTRAL:
        return f.values * math.sqrt(f.grid.size)
    return np.fft.fftn(f.values)


def convolve_spectrum(grid: GridSpec, kernel_spectrum: np.ndarray, f: SpectralField) -> SpectralField:
    """Periodic convolution ``h^d * sum_y k(x-y) f(y)`` from a raw kernel spectrum."""
    out = np.fft.ifftn(kernel_spectrum * _raw_spectrum(f)) * grid.cell_volume
    return SpectralField(grid, out, PHYSICAL)


def convolve(k: KernelTable, f: SpectralField) -> SpectralField:
    """FFT path of the periodic convolution; returns a physical field."""
    if k.grid != f.grid:
        raise ValueError("kernel and field live on different grids")
    return convolve_spectrum(k.grid, k.spectrum, f)


def convolve_direct(k: KernelTable, f: SpectralField) -> SpectralField:
    """Direct double-sum convolution: the ground truth for ``convolve``.

    Accumulates over displacements in a fixed order, so the result commutes
    with grid shifts of the input bit-exactly. Cost is O(n^(2d)); refused
    above ``DIRECT_SUM_LIMIT`` grid points.
    """
    if k.grid != f.grid:
        raise ValueError("kernel and field live on different grids")
    grid = k.grid
    if grid.size > DIRECT_SUM_LIMIT:
        raise CostGuardError(
            f"direct convolution limited to {DIRECT_SUM_LIMIT} points, grid has {grid.size}"
        )
    half = grid.points_per_axis // 2
    axes = tuple(range(grid.dim))
    fvals = in_physical(f).values
    out = np.zeros(grid.shape, dtype=np.complex128)
    for index in np.ndindex(grid.shape):
        shift = tuple(i - half for i in index)  # displacement of this sample cell
        out += k.samples[index] * np.roll(fvals, shift, axis=axes)
    return SpectralField(grid, out * grid.cell_volume, PHYSICAL)
