"""Grid geometry, fields, inner products, spectral derivatives, mask."""

import math

import numpy as np
import pytest

from incoupler import (
    ComplexField,
    ConfigurationError,
    SpatialGrid,
    absorbing_mask,
    inner_product,
)
from incoupler.grid import spectral_first_derivative, spectral_second_derivative


@pytest.fixture
def grid():
    return SpatialGrid(-1.0e-3, 1.0e-3, 256)


class TestSpatialGrid:
    def test_sample_positions(self, grid):
        x = grid.x
        assert x[0] == grid.x_min
        assert np.allclose(np.diff(x), grid.dx)
        # right endpoint excluded (periodic convention)
        assert x[-1] == pytest.approx(grid.x_max - grid.dx)

    def test_wavenumbers_match_fft_convention(self, grid):
        k = grid.k
        assert np.array_equal(k, 2.0 * np.pi * np.fft.fftfreq(256, d=grid.dx))
        assert k[0] == 0.0

    def test_index_of_roundtrip(self, grid):
        for j in (0, 1, 100, 255):
            assert grid.index_of(grid.x[j]) == j

    def test_index_of_outside_raises(self, grid):
        with pytest.raises(ConfigurationError):
            grid.index_of(grid.x_max)
        with pytest.raises(ConfigurationError):
            grid.index_of(grid.x_min - grid.dx)

    def test_invalid_construction(self):
        with pytest.raises(ConfigurationError):
            SpatialGrid(1.0, -1.0, 64)
        with pytest.raises(ConfigurationError):
            SpatialGrid(0.0, 1.0, 63)  # odd
        with pytest.raises(ConfigurationError):
            SpatialGrid(0.0, 1.0, 0)

    def test_compatibility(self, grid):
        assert grid.compatible_with(SpatialGrid(-1.0e-3, 1.0e-3, 256))
        assert not grid.compatible_with(SpatialGrid(-1.0e-3, 1.0e-3, 128))
        assert not grid.compatible_with(SpatialGrid(-2.0e-3, 1.0e-3, 256))


class TestComplexField:
    def test_norm_squared_of_gaussian(self, grid):
        sigma = 1.0e-4
        values = np.exp(-(grid.x**2) / (2 * sigma**2)).astype(complex)
        f = ComplexField(grid, values)
        # integral of exp(-x^2/sigma^2) = sigma * sqrt(pi)
        assert f.norm_squared() == pytest.approx(
            sigma * math.sqrt(math.pi), rel=1e-10
        )

    def test_length_mismatch_raises(self, grid):
        with pytest.raises(ConfigurationError):
            ComplexField(grid, np.zeros(100))

    def test_zeros_and_copy_independence(self, grid):
        f = ComplexField.zeros(grid)
        g = f.copy()
        g.values[0] = 1.0
        assert f.values[0] == 0.0
        assert f.norm_squared() == 0.0


class TestInnerProduct:
    def test_matches_manual_sum(self, grid, rng):
        a = ComplexField(grid, rng.normal(size=256) + 1j * rng.normal(size=256))
        b = ComplexField(grid, rng.normal(size=256) + 1j * rng.normal(size=256))
        manual = np.sum(np.conj(a.values) * b.values) * grid.dx
        assert inner_product(a, b) == pytest.approx(manual, rel=1e-14)

    def test_left_argument_conjugated(self, grid):
        a = ComplexField(grid, np.full(256, 1.0 + 0.0j))
        ia = ComplexField(grid, 1j * a.values)
        b = ComplexField(grid, np.full(256, 2.0 + 0.0j))
        assert inner_product(ia, b) == pytest.approx(-1j * inner_product(a, b))

    def test_incompatible_grids_raise(self, grid):
        other = SpatialGrid(-1.0e-3, 1.0e-3, 128)
        with pytest.raises(ConfigurationError):
            inner_product(ComplexField.zeros(grid), ComplexField.zeros(other))


class TestSpectralDerivatives:
    def test_plane_wave_first_derivative(self, grid):
        # use a wavenumber the periodic grid represents exactly
        k1 = grid.k[7]
        f = ComplexField(grid, np.exp(1j * k1 * grid.x))
        df = spectral_first_derivative(f)
        assert np.allclose(df.values, 1j * k1 * f.values, atol=1e-8 * abs(k1))

    def test_gaussian_second_derivative(self, grid):
        sigma = 1.5e-4
        g = np.exp(-(grid.x**2) / (2 * sigma**2))
        f = ComplexField(grid, g.astype(complex))
        d2 = spectral_second_derivative(f)
        expected = g * (grid.x**2 / sigma**4 - 1.0 / sigma**2)
        assert np.allclose(d2.values.real, expected, atol=1e-4 * np.max(np.abs(expected)))


class TestAbsorbingMask:
    def test_shape_and_limits(self, grid):
        m = absorbing_mask(grid, 0.05)
        n_edge = max(2, round(0.05 * 256))
        assert m[0] == 0.0
        assert np.all(m[n_edge:-n_edge] == 1.0)
        assert np.all((0.0 <= m) & (m <= 1.0))

    def test_symmetric(self, grid):
        m = absorbing_mask(grid, 0.1)
        assert np.array_equal(m, m[::-1])

    def test_fraction_bounds(self, grid):
        with pytest.raises(ConfigurationError):
            absorbing_mask(grid, 0.0)
        with pytest.raises(ConfigurationError):
            absorbing_mask(grid, 0.5)
