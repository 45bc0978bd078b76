"""Uniform periodic 1D grid and spectral helpers.

All fields in the simulator live on a uniform grid of ``n_points`` samples
spanning ``[x_min, x_max)`` with periodic boundary conditions (the right
endpoint is excluded, as required for FFT-based spectral derivatives).
Wavenumbers follow the standard FFT ordering so fields can be pushed back
and forth with ``np.fft.fft``/``ifft`` without reshuffling.

Conventions
-----------
* densities are per metre, so ``sum(|u|^2) * dx`` is a particle number,
* ``inner_product(a, b) = sum(conj(a) * b) * dx`` (left argument conjugated),
* spectral derivatives assume the field is periodic and well resolved;
  the absorbing mask (`absorbing_mask`) is available to keep outgoing
  radiation from wrapping around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SpatialGrid",
    "ComplexField",
    "inner_product",
    "spectral_first_derivative",
    "spectral_second_derivative",
    "absorbing_mask",
]


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on ``[x_min, x_max)``.

    Parameters
    ----------
    x_min, x_max:
        Domain edges in metres, ``x_min < x_max``.
    n_points:
        Number of samples; must be a positive even number (a power of two
        keeps the FFTs fast, but any even count is accepted).
    """

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ConfigurationError(
                f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]"
            )
        if self.n_points < 2 or self.n_points % 2 != 0:
            raise ConfigurationError(
                f"n_points must be even and >= 2, got {self.n_points}"
            )

    @property
    def length(self) -> float:
        """Domain length ``x_max - x_min`` in metres."""
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        """Grid spacing in metres (periodic: length / n_points)."""
        return self.length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        """Sample positions, ``x[j] = x_min + j*dx`` (right edge excluded)."""
        return self.x_min + self.dx * np.arange(self.n_points)

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order (rad/m)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    def index_of(self, x0: float) -> int:
        """Index of the grid point nearest to ``x0`` (must lie inside)."""
        if not (self.x_min <= x0 < self.x_max):
            raise ConfigurationError(
                f"position {x0} outside grid [{self.x_min}, {self.x_max})"
            )
        return int(round((x0 - self.x_min) / self.dx)) % self.n_points

    def compatible_with(self, other: "SpatialGrid") -> bool:
        """True when both grids share geometry (same points, same span)."""
        return (
            self.n_points == other.n_points
            and self.x_min == other.x_min
            and self.x_max == other.x_max
        )


@dataclass
class ComplexField:
    """A complex field sampled on a :class:`SpatialGrid`.

    ``values`` is always stored as a contiguous complex128 array of length
    ``grid.n_points``; constructing with a mismatched length raises.
    """

    grid: SpatialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"field has {v.shape} values for a grid of "
                f"{self.grid.n_points} points"
            )
        self.values = v

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> "ComplexField":
        return cls(grid, np.zeros(grid.n_points, dtype=np.complex128))

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy())

    def density(self) -> np.ndarray:
        """Pointwise ``|u|^2`` (per metre when ``u`` is an amplitude)."""
        return np.abs(self.values) ** 2

    def norm_squared(self) -> float:
        """``integral |u|^2 dx`` — a (dimensionless) occupation weight."""
        return float(np.sum(self.density()) * self.grid.dx)


def _check_same_grid(a: ComplexField, b: ComplexField) -> None:
    if not a.grid.compatible_with(b.grid):
        raise ConfigurationError(
            "fields live on incompatible grids: "
            f"{a.grid.n_points} pts on [{a.grid.x_min}, {a.grid.x_max}] vs "
            f"{b.grid.n_points} pts on [{b.grid.x_min}, {b.grid.x_max}]"
        )


def inner_product(a: ComplexField, b: ComplexField) -> complex:
    """Discrete L2 inner product ``integral conj(a) b dx``.

    The left argument is conjugated. Raises ``ConfigurationError`` when the
    two fields are sampled on different grids.
    """
    _check_same_grid(a, b)
    return complex(np.vdot(a.values, b.values) * a.grid.dx)


def spectral_first_derivative(f: ComplexField) -> ComplexField:
    """Periodic spectral d/dx via FFT."""
    g = f.grid
    dv = np.fft.ifft(1j * g.k * np.fft.fft(f.values))
    return ComplexField(g, dv)


def spectral_second_derivative(f: ComplexField) -> ComplexField:
    """Periodic spectral d^2/dx^2 via FFT."""
    g = f.grid
    dv = np.fft.ifft(-(g.k**2) * np.fft.fft(f.values))
    return ComplexField(g, dv)


def absorbing_mask(grid: SpatialGrid, edge_fraction: float = 0.05) -> np.ndarray:
    """Real cos^2 absorbing mask: 1 in the bulk, rolling to 0 at both edges.

    The ramp occupies ``edge_fraction`` of the domain at each edge. Applying
    the mask once per step removes outgoing radiation before it can wrap
    around the periodic boundary; the propagator ledgers whatever norm the
    mask removes so conservation checks remain exact.
    """
    if not 0.0 < edge_fraction < 0.5:
        raise ConfigurationError(
            f"edge_fraction must lie in (0, 0.5), got {edge_fraction}"
        )
    n_edge = max(2, int(round(edge_fraction * grid.n_points)))
    mask = np.ones(grid.n_points, dtype=np.float64)
    ramp = np.sin(0.5 * np.pi * np.arange(n_edge) / n_edge) ** 2
    mask[:n_edge] = ramp
    mask[-n_edge:] = ramp[::-1]
    return mask
