"""System parameters, regime validation, the nonlocal nonlinearity and the
conserved functionals of the coupled Schrodinger-Choquard / Hartree-Fock
system.

The evolved system is, for components j = 1..N,

    i dt psi_j + Lap psi_j - sum_k G(psi_j, psi_k) = 0,

with

    G(psi_j, psi_k) = lambda_jk [W_g1 * |psi_k|^p] |psi_j|^(p-2) psi_j
                      + beta ([W_g2 * |psi_k|^2] psi_j
                              - [W_g2 * (conj(psi_k) psi_j)] psi_k),

where ``W_g = |x|^(-(d-g))`` is the Riesz potential. Defocusing throughout:
``lambda_jk >= 0``, ``beta >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import (
    GridSpec,
    SpectralField,
    gradient,
    in_physical,
    norm_lr,
)
from .kernels import RIESZ, KernelTable, build_kernel, convolve

INTERCRITICAL = "mass-energy-intercritical-scattering"
HARTREE_P2 = "hartree-p2"
OUTSIDE = "outside-theorem-hypotheses"


class ParameterError(ValueError):
    """Raised with the full list of violated parameter constraints."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(violations))


class PropagationError(RuntimeError):
    """A component field stopped being finite."""


@dataclass(frozen=True)
class CouplingParams:
    """Coupling constants of the system.

    ``lam`` is the N x N matrix of Choquard couplings, ``beta`` the exchange
    coupling (only meaningful at p = 2), ``gamma1``/``gamma2`` the Riesz
    exponents of the two convolution kernels.
    """

    n_components: int
    p: float
    gamma1: float
    lam: np.ndarray
    beta: float = 0.0
    gamma2: float | None = None

    def __post_init__(self):
        lam = np.ascontiguousarray(self.lam, dtype=np.float64)
        if lam.shape != (self.n_components, self.n_components):
            raise ValueError(
                f"lambda matrix must be {self.n_components}x{self.n_components}, got {lam.shape}"
            )
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def lam_active(self) -> bool:
        return bool(np.any(self.lam != 0.0))

    @property
    def lam_symmetric(self) -> bool:
        return bool(np.array_equal(self.lam, self.lam.T))


@dataclass(frozen=True)
class RegimeReport:
    """Exponent thresholds and where the parameters sit relative to them."""

    p_star_lower: float  # mass-supercritical threshold (d + gamma1 + 2)/d
    p_star_upper: float  # energy-critical threshold (d + gamma1)/(d - 2), inf for d <= 2
    classification: str
    scattering_theorem_applies: bool


def exponent_thresholds(d: int, gamma1: float) -> tuple[float, float]:
    lower = (d + gamma1 + 2) / d
    upper = math.inf if d <= 2 else (d + gamma1) / (d - 2)
    return lower, upper


def validate(params: CouplingParams, grid: GridSpec) -> RegimeReport:
    """Check every parameter constraint; collect all violations before raising."""
    d = grid.dim
    v: list[str] = []
    if params.n_components < 1:
        v.append(f"n_components must be >= 1, got {params.n_components}")
    if params.p < 2:
        v.append(f"p must be >= 2, got {params.p}")
    if not 0 < params.gamma1 < d:
        v.append(f"gamma1 must lie in (0, d) = (0, {d}), got {params.gamma1}")
    lower, upper = exponent_thresholds(d, params.gamma1)
    if params.p >= upper:
        v.append(
            f"p must stay below the energy-critical exponent (d+gamma1)/(d-2) = {upper}, got {params.p}"
        )
    if np.any(params.lam < 0):
        v.append("lambda entries must be nonnegative (defocusing)")
    if params.lam_active and np.any(np.diag(params.lam) == 0.0):
        v.append("active lambda coupling requires every diagonal entry lambda_jj to be nonzero")
    if params.beta < 0:
        v.append(f"beta must be nonnegative (defocusing), got {params.beta}")
    if params.beta != 0:
        if params.p > 2:
            v.append("exchange coupling requires p = 2: beta must be 0 when p > 2")
        if params.gamma2 is None:
            v.append("beta != 0 requires gamma2")
        elif not max(0, d - 4) < params.gamma2 < d:
            v.append(
                f"gamma2 must lie in (max(0, d-4), d) = ({max(0, d - 4)}, {d}), got {params.gamma2}"
            )
    if v:
        raise ParameterError(v)

    gammas = [params.gamma1] + ([params.gamma2] if params.beta != 0 else [])
    if params.p > 2 and 0 < params.gamma1 < d and lower < params.p < upper:
        classification = INTERCRITICAL
        scattering = True
    elif params.p == 2 and d >= 3 and all(max(0, d - 4) < g < d for g in gammas):
        classification = HARTREE_P2
        # the scattering statement for p = 2 additionally needs gamma < d - 2
        scattering = all(g < d - 2 for g in gammas)
    else:
        classification = OUTSIDE
        scattering = False
    return RegimeReport(lower, upper, classification, scattering)


@dataclass(frozen=True)
class SystemState:
    """N component fields on one grid at one time."""

    params: CouplingParams
    fields: tuple[SpectralField, ...]
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if len(self.fields) != self.params.n_components:
            raise ValueError(
                f"expected {self.params.n_components} fields, got {len(self.fields)}"
            )
        grid = self.fields[0].grid
        for j, f in enumerate(self.fields):
            if f.grid != grid:
                raise ValueError("all component fields must share one grid")
            if not np.all(np.isfinite(f.values)):
                raise PropagationError(f"component {j} contains non-finite values")

    @property
    def grid(self) -> GridSpec:
        return self.fields[0].grid

    def physical(self) -> "SystemState":
        return SystemState(self.params, tuple(in_physical(f) for f in self.fields), self.time)


def riesz_kernel(grid: GridSpec, gamma: float) -> KernelTable:
    return build_kernel(grid, RIESZ, gamma=gamma)


def mass_density(f: SpectralField) -> np.ndarray:
    vals = in_physical(f).values
    return (vals.real**2 + vals.imag**2)


def momentum_density(f: SpectralField) -> list[np.ndarray]:
    """Per-axis ``Im(conj(f) df)``, real arrays on the grid."""
    g = in_physical(f)
    return [np.imag(np.conj(g.values) * df.values) for df in gradient(g)]


def power_density(f: SpectralField, p: float) -> np.ndarray:
    """``|f|^p`` with ``|0|^(p-2) 0 := 0`` conventions built in (p >= 2)."""
    m = mass_density(f)
    if p == 2:
        return m
    return m ** (p / 2)


def _choquard_potentials(state: SystemState, w1: KernelTable) -> list[np.ndarray]:
    """``V_j = sum_k lambda_jk (W_g1 * |psi_k|^p)`` as real arrays."""
    params = state.params
    u = [convolve(w1, SpectralField(state.grid, power_density(f, params.p))).values.real
         for f in state.fields]
    out = []
    for j in range(params.n_components):
        vj = np.zeros(state.grid.shape)
        for k in range(params.n_components):
            if params.lam[j, k] != 0.0:
                vj += params.lam[j, k] * u[k]
        out.append(vj)
    return out


def _exchange_fields(state: SystemState, w2: KernelTable):
    """Direct potential ``D = W_g2 * sum_k |psi_k|^2`` and the exchange
    convolutions ``E[k][j] = W_g2 * (conj(psi_k) psi_j)``."""
    grid = state.grid
    total = np.zeros(grid.shape)
    for f in state.fields:
        total += mass_density(f)
    direct = convolve(w2, SpectralField(grid, total)).values.real
    n = state.params.n_components
    exch = [[None] * n for _ in range(n)]
    for k in range(n):
        fk = in_physical(state.fields[k]).values
        for j in range(k, n):
            fj = in_physical(state.fields[j]).values
            e = convolve(w2, SpectralField(grid, np.conj(fk) * fj)).values
            exch[k][j] = e
            if j != k:
                exch[j][k] = np.conj(e)  # W real and even
    return direct, exch


class NonlinearityEvaluator:
    """Caches the Riesz kernel tables for repeated G evaluations on one grid."""

    def __init__(self, grid: GridSpec, params: CouplingParams):
        self.grid = grid
        self.params = params
        self.w1 = riesz_kernel(grid, params.gamma1) if params.lam_active else None
        self.w2 = riesz_kernel(grid, params.gamma2) if params.beta != 0 else None

    def potentials(self, state: SystemState) -> list[np.ndarray]:
        if self.w1 is None:
            return [np.zeros(self.grid.shape) for _ in state.fields]
        return _choquard_potentials(state, self.w1)

    def __call__(self, state: SystemState) -> list[SpectralField]:
        return self.evaluate(state)

    def evaluate(self, state: SystemState) -> list[SpectralField]:
        params = self.params
        grid = self.grid
        for j, f in enumerate(state.fields):
            if not np.all(np.isfinite(f.values)):
                raise PropagationError(f"component {j} contains non-finite values")
        fields = [in_physical(f).values for f in state.fields]
        out = [np.zeros(grid.shape, dtype=np.complex128) for _ in fields]
        if self.w1 is not None:
            vs = self.potentials(state)
            for j, fj in enumerate(fields):
                if params.p == 2:
                    out[j] += vs[j] * fj
                else:
                    out[j] += vs[j] * np.abs(fj) ** (params.p - 2) * fj
        if self.w2 is not None and params.beta != 0:
            direct, exch = _exchange_fields(state, self.w2)
            for j, fj in enumerate(fields):
                acc = direct * fj
                for k, fk in enumerate(fields):
                    acc -= exch[k][j] * fk
                out[j] += params.beta * acc
        return [SpectralField(grid, g) for g in out]


def nonlinearity(state: SystemState) -> list[SpectralField]:
    """One-shot evaluation of the N nonlinearity fields ``G_j``."""
    return NonlinearityEvaluator(state.grid, state.params).evaluate(state)


def mass(state: SystemState, j: int) -> float:
    return norm_lr(state.fields[j], 2) ** 2


@dataclass(frozen=True)
class EnergyReport:
    """The two energy conventions.

    ``hamiltonian`` is the functional actually conserved by the flow
    (Choquard prefactor 1/p, exchange prefactor beta/2); it is what drift
    tests monitor. ``half_choquard`` halves the Choquard term (prefactor
    1/(2p)), a normalization that appears in parts of the literature; it is
    reported for cross-checks only and is not conserved. ``hamiltonian`` is
    None when the lambda matrix is asymmetric, because the flow then has no
    variational structure to conserve.
    """

    hamiltonian: float | None
    half_choquard: float
    kinetic: float
    choquard_pair: float
    exchange_pair: float
    refusal: str | None = None


def energy(state: SystemState) -> EnergyReport:
    params = state.params
    grid = state.grid
    kinetic = 0.0
    for f in state.fields:
        for df in gradient(in_physical(f)):
            kinetic += norm_lr(df, 2) ** 2

    choquard_pair = 0.0  # sum_jk lambda_jk int (W1 * |psi_k|^p) |psi_j|^p
    if params.lam_active:
        w1 = riesz_kernel(grid, params.gamma1)
        powers = [power_density(f, params.p) for f in state.fields]
        convs = [convolve(w1, SpectralField(grid, q)).values.real for q in powers]
        for j in range(params.n_components):
            for k in range(params.n_components):
                if params.lam[j, k] != 0.0:
                    choquard_pair += params.lam[j, k] * float(
                        grid.integrate(convs[k] * powers[j]).real
                    )

    exchange_pair = 0.0  # sum_jk int [(W2*|psi_k|^2)|psi_j|^2 - (W2*(conj_k psi_j)) psi_k conj_j]
    if params.beta != 0:
        w2 = riesz_kernel(grid, params.gamma2)
        fields = [in_physical(f).values for f in state.fields]
        masses = [mass_density(f) for f in state.fields]
        conv_m = [convolve(w2, SpectralField(grid, m)).values.real for m in masses]
        for j in range(params.n_components):
            for k in range(params.n_components):
                exchange_pair += float(grid.integrate(conv_m[k] * masses[j]).real)
                cross = convolve(
                    w2, SpectralField(grid, np.conj(fields[k]) * fields[j])
                ).values
                exchange_pair -= float(
                    grid.integrate(cross * fields[k] * np.conj(fields[j])).real
                )

    half = kinetic + choquard_pair / (2 * params.p) + params.beta / 2 * exchange_pair
    if params.lam_active and not params.lam_symmetric:
        return EnergyReport(
            None, half, kinetic, choquard_pair, exchange_pair,
            refusal="asymmetric lambda has no conserved hamiltonian",
        )
    hamiltonian = kinetic + choquard_pair / params.p + params.beta / 2 * exchange_pair
    return EnergyReport(hamiltonian, half, kinetic, choquard_pair, exchange_pair)
