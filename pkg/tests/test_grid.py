"""Grid, transform, propagator and norm tests."""

import math

import numpy as np
import pytest

from choquard.grid import (
    GridSpec,
    RepresentationError,
    SpectralField,
    field_from_values,
    free_propagate,
    gradient,
    in_physical,
    inner_l2,
    laplacian,
    norm_h1,
    norm_lr,
    to_physical,
    to_spectral,
)


def rel_max_err(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return np.max(np.abs(a - b)) / scale


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return field_from_values(grid, vals)


def smooth_random_field(grid, seed=0, band=4):
    """Band-limited random field: only modes with every |m_a| <= band."""
    rng = np.random.default_rng(seed)
    spec = np.zeros(grid.shape, dtype=np.complex128)
    n = grid.points_per_axis
    idx = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.dim):
        shape = [1] * grid.dim
        shape[axis] = n
        mask &= np.abs(idx).reshape(shape) <= band
    spec[mask] = rng.standard_normal(int(mask.sum())) + 1j * rng.standard_normal(int(mask.sum()))
    return to_physical(SpectralField(grid, spec, "spectral"))


class TestGridSpec:
    def test_spacing_and_volume_identities(self):
        g = GridSpec(2, 32, 5.0)
        assert g.spacing == 2 * 5.0 / 32
        assert g.cell_volume * g.size == pytest.approx((2 * 5.0) ** 2, rel=1e-14)

    @pytest.mark.parametrize("bad", [(0, 16, 1.0), (4, 16, 1.0), (1, 12, 1.0), (1, 4, 1.0), (1, 16, -1.0)])
    def test_invalid_specs_rejected(self, bad):
        with pytest.raises(ValueError):
            GridSpec(*bad)

    def test_wave_vectors_contain_zero_and_single_nyquist(self):
        g = GridSpec(1, 16, 2.0)
        k = g.axis_freqs()
        assert k[0] == 0.0
        # Nyquist mode pi*(n/2)/L appears exactly once, as the negative frequency.
        nyq = math.pi * 8 / 2.0
        assert np.sum(np.isclose(np.abs(k), nyq)) == 1
        assert g.axis_freqs_odd()[8] == 0.0


class TestTransforms:
    def test_constant_field_is_pure_dc(self):
        g = GridSpec(1, 16, 3.0)
        f = to_spectral(field_from_values(g, np.ones(16)))
        assert abs(f.values[0]) > 0
        assert np.max(np.abs(f.values[1:])) < 1e-14

    def test_plane_wave_single_coefficient(self):
        g = GridSpec(1, 32, 4.0)
        x = g.axis_coords()
        k1 = g.axis_freqs()[3]
        f = to_spectral(field_from_values(g, np.exp(1j * k1 * x)))
        mags = np.abs(f.values)
        assert mags[3] == pytest.approx(math.sqrt(32), rel=1e-12)
        mags_rest = mags.copy()
        mags_rest[3] = 0.0
        assert np.max(mags_rest) < 1e-12

    @pytest.mark.parametrize("dim,n", [(1, 16), (2, 8), (1, 8)])
    def test_round_trip_matches_slow_dft_oracle(self, dim, n):
        g = GridSpec(dim, n, 1.5)
        f = random_field(g, seed=dim * 10 + n)
        back = to_physical(to_spectral(f))
        assert rel_max_err(back.values, f.values) < 1e-12

        # Independent oracle: direct O(n^2) DFT per axis, unitary normalization.
        vals = f.values
        for axis in range(dim):
            m = np.arange(n)
            w = np.exp(-2j * math.pi * np.outer(m, m) / n) / math.sqrt(n)
            vals = np.moveaxis(np.tensordot(w, np.moveaxis(vals, axis, 0), axes=1), 0, axis)
        assert rel_max_err(to_spectral(f).values, vals) < 1e-12

    def test_wrong_representation_rejected(self):
        g = GridSpec(1, 16, 1.0)
        f = to_spectral(random_field(g))
        with pytest.raises(RepresentationError):
            to_spectral(f)
        with pytest.raises(RepresentationError):
            to_physical(to_physical(f))

    def test_parseval(self):
        g = GridSpec(2, 16, 2.5)
        f = random_field(g, seed=5)
        assert norm_lr(f, 2) == pytest.approx(norm_lr(to_spectral(f), 2), rel=1e-12)


class TestFreePropagate:
    def test_plane_wave_eigenfunction(self):
        g = GridSpec(1, 32, 4.0)
        x = g.axis_coords()
        k1 = g.axis_freqs()[5]
        f = field_from_values(g, np.exp(1j * k1 * x))
        t = 0.37
        out = free_propagate(f, t)
        expected = np.exp(-1j * k1 * k1 * t) * f.values
        assert rel_max_err(out.values, expected) < 1e-12

    def test_zero_time_is_identity(self):
        g = GridSpec(1, 16, 2.0)
        f = random_field(g, seed=2)
        assert rel_max_err(free_propagate(f, 0.0).values, f.values) < 1e-15

    def test_inverse_and_norm_conservation(self):
        g = GridSpec(2, 16, 3.0)
        f = random_field(g, seed=3)
        t = 1.234
        back = free_propagate(free_propagate(f, t), -t)
        assert rel_max_err(back.values, f.values) < 1e-12
        assert norm_lr(free_propagate(f, t), 2) == pytest.approx(norm_lr(f, 2), rel=1e-12)
        assert norm_h1(free_propagate(f, t)) == pytest.approx(norm_h1(f), rel=1e-12)

    def test_group_law(self):
        g = GridSpec(1, 32, 2.0)
        f = random_field(g, seed=4)
        one = free_propagate(f, 0.7 + 0.9)
        two = free_propagate(free_propagate(f, 0.7), 0.9)
        assert rel_max_err(one.values, two.values) < 1e-11

    def test_gaussian_dispersion_matches_closed_form(self):
        # exp(i t Lap) exp(-x^2/(4s)) = (s/(s+it))^(1/2) exp(-x^2/(4(s+it)))
        g = GridSpec(1, 512, 40.0)
        x = g.axis_coords()
        s = 0.25
        f = field_from_values(g, np.exp(-(x**2) / (4 * s)))
        t = 1.0
        out = free_propagate(f, t)
        z = s + 1j * t
        expected = np.sqrt(s / z) * np.exp(-(x**2) / (4 * z))
        interior = np.abs(x) < 0.75 * g.half_length
        assert np.max(np.abs(out.values - expected)[interior]) < 1e-6


class TestDerivatives:
    def test_gradient_of_constant_is_zero(self):
        g = GridSpec(2, 16, 1.0)
        f = field_from_values(g, np.full(g.shape, 2.3))
        for df in gradient(f):
            assert np.max(np.abs(df.values)) < 1e-13

    def test_plane_wave_derivative(self):
        g = GridSpec(1, 32, 5.0)
        x = g.axis_coords()
        k1 = g.axis_freqs()[4]
        f = field_from_values(g, np.exp(1j * k1 * x))
        (df,) = gradient(f)
        assert rel_max_err(df.values, 1j * k1 * f.values) < 1e-12
        lap = laplacian(f)
        assert rel_max_err(lap.values, -(k1**2) * f.values) < 1e-12

    def test_gradient_matches_finite_differences_at_order_two(self):
        # Centered-difference oracle on the same sampled field; observed order >= 1.9.
        errs = []
        for n in (64, 128, 256):
            g = GridSpec(1, n, 3.0)
            f = smooth_random_field(g, seed=11, band=4)
            (df,) = gradient(f)
            vals = f.values
            fd = (np.roll(vals, -1) - np.roll(vals, 1)) / (2 * g.spacing)
            errs.append(np.max(np.abs(df.values - fd)))
        order01 = math.log2(errs[0] / errs[1])
        order12 = math.log2(errs[1] / errs[2])
        assert order01 > 1.9
        assert order12 > 1.9


class TestNorms:
    def test_zero_field(self):
        g = GridSpec(1, 16, 1.0)
        f = field_from_values(g, np.zeros(16))
        for r in (1, 2, 4, math.inf):
            assert norm_lr(f, r) == 0.0
        assert norm_h1(f) == 0.0

    @pytest.mark.parametrize("dim", [1, 2])
    def test_constant_field_analytic(self, dim):
        g = GridSpec(dim, 16, 2.0)
        c = 1.7
        f = field_from_values(g, np.full(g.shape, c))
        for r in (1.0, 2.0, 3.5):
            assert norm_lr(f, r) == pytest.approx(c * (2 * g.half_length) ** (dim / r), rel=1e-12)
        assert norm_lr(f, math.inf) == pytest.approx(c, rel=1e-14)

    def test_gaussian_l2_against_analytic_integral(self):
        # int exp(-2x^2) dx = sqrt(pi/2)
        g = GridSpec(1, 512, 20.0)
        f = field_from_values(g, np.exp(-g.axis_coords() ** 2))
        assert norm_lr(f, 2) ** 2 == pytest.approx(math.sqrt(math.pi / 2), abs=1e-8)

    def test_r_below_one_rejected(self):
        g = GridSpec(1, 16, 1.0)
        with pytest.raises(ValueError):
            norm_lr(field_from_values(g, np.ones(16)), 0.5)

    def test_h1_decomposition(self):
        g = GridSpec(2, 16, 2.0)
        f = smooth_random_field(g, seed=7, band=3)
        expected = norm_lr(f, 2) ** 2 + sum(norm_lr(df, 2) ** 2 for df in gradient(f))
        assert norm_h1(f) ** 2 == pytest.approx(expected, rel=1e-12)

    def test_inner_product_conventions(self):
        g = GridSpec(1, 16, 1.0)
        f = random_field(g, seed=8)
        h = random_field(g, seed=9)
        direct = g.cell_volume * np.sum(f.values * np.conj(h.values))
        assert inner_l2(f, h) == pytest.approx(direct)
        assert inner_l2(f, f).real == pytest.approx(norm_lr(f, 2) ** 2, rel=1e-12)
        # Mixed representations agree with the matched-representation value.
        assert inner_l2(f, to_spectral(h)) == pytest.approx(direct, rel=1e-12)

    def test_fields_are_immutable(self):
        g = GridSpec(1, 16, 1.0)
        f = random_field(g)
        with pytest.raises(ValueError):
            f.values[0] = 1.0
        assert in_physical(f) is f
