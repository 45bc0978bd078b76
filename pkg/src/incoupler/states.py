"""Input-mode statistics and initial field configurations.

The simulator evolves *mode functions*, not operators: the annihilation
operator of each field is expanded over the two occupied input modes,

    nu(x, t) = f_nu(x, t) * a0  +  h_nu(x, t) * b0,

where ``a0`` is the atomic input mode (the beam) and ``b0`` the probe input
mode. Both pairs (f_psi, f_E) and (h_psi, h_E) obey the same linear coupled
equations and differ only in their initial conditions; all quantum statistics
enter through the c-number moments of ``a0`` and ``b0`` collected in
:class:`InputMoments`.

Moments carried per mode: the mean ``<a>``, occupation ``<a† a>``, anomalous
second moment ``<a a>``, and the normally-ordered fourth moment
``<a† a† a a>`` (needed for intensity correlations). For Gaussian inputs
(displaced squeezed, thermal) the fourth moment follows from the lower ones
and is filled in by the constructors.

At most one of the two modes may carry a nonzero mean: the correlation
formulas used downstream drop cross terms that only vanish when the
second mode has zero mean *and* zero anomalous moment, so configurations
violating that are rejected here rather than silently producing wrong
statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .grid import ComplexField, SpatialGrid
from .params import DerivedQuantities, ModelParams, derive

__all__ = [
    "InputMoments",
    "ModeFunction",
    "FieldState",
    "squeezing_db_to_r",
    "make_squeezed_input_moments",
    "condensate_ground_state",
    "make_pulsed_initial_state",
    "make_continuous_initial_state",
]

_PHYSICALITY_TOL = 1.0e-9


def squeezing_db_to_r(db: float) -> float:
    """Squeezing parameter r from a decibel figure: ``V+ = 10^(-db/10) = e^(-2r)``."""
    return 0.5 * math.log(10.0) * db / 10.0


def _gaussian_fourth_moment(mean: complex, n_s: float, m_s: complex) -> float:
    """``<a†a†aa>`` for a displaced Gaussian state.

    ``mean`` is the displacement, ``n_s``/``m_s`` the occupation and anomalous
    moment of the fluctuation part (Wick's theorem for the rest).
    """
    am2 = abs(mean) ** 2
    return float(
        am2**2
        + 4.0 * am2 * n_s
        + 2.0 * (np.conj(mean) ** 2 * m_s).real
        + 2.0 * n_s**2
        + abs(m_s) ** 2
    )


@dataclass(frozen=True)
class InputMoments:
    """Moments of the two input modes (a: beam, b: probe)."""

    mean_a: complex = 0.0
    n_a: float = 0.0
    sq_a: complex = 0.0
    g4_a: float = 0.0
    mean_b: complex = 0.0
    n_b: float = 0.0
    sq_b: complex = 0.0
    g4_b: float = 0.0

    def __post_init__(self) -> None:
        for label in ("a", "b"):
            mean = complex(getattr(self, f"mean_{label}"))
            n = float(getattr(self, f"n_{label}"))
            sq = complex(getattr(self, f"sq_{label}"))
            g4 = float(getattr(self, f"g4_{label}"))
            if n < -_PHYSICALITY_TOL:
                raise ConfigurationError(f"n_{label} must be >= 0, got {n}")
            if g4 < -_PHYSICALITY_TOL:
                raise ConfigurationError(f"g4_{label} must be >= 0, got {g4}")
            dn = n - abs(mean) ** 2
            dsq = sq - mean**2
            if dn < -_PHYSICALITY_TOL:
                raise ConfigurationError(
                    f"mode {label}: occupation {n} below |mean|^2 = {abs(mean)**2}"
                )
            v_min = 1.0 + 2.0 * dn - 2.0 * abs(dsq)
            v_max = 1.0 + 2.0 * dn + 2.0 * abs(dsq)
            if v_min < -_PHYSICALITY_TOL:
                raise ConfigurationError(
                    f"mode {label}: negative quadrature variance ({v_min})"
                )
            if v_min * v_max < 1.0 - 1.0e-6:
                raise ConfigurationError(
                    f"mode {label}: uncertainty product {v_min * v_max} < 1 "
                    "(moments do not describe a physical state)"
                )
        if abs(self.mean_a) > 0 and abs(self.mean_b) > 0:
            raise ConfigurationError(
                "at most one of the two input modes may carry a nonzero mean "
                "(bright beam with bright probe is not supported)"
            )
        if abs(self.mean_b) > 0 and abs(self.sq_a - self.mean_a**2) > 0:
            raise ConfigurationError(
                "a bright probe requires the beam mode to have no anomalous "
                "fluctuations (unsupported combination)"
            )

    # -- constructors -----------------------------------------------------

    @classmethod
    def vacuum(cls) -> "InputMoments":
        return cls()

    def with_thermal_probe(self, n_b: float) -> "InputMoments":
        """Return a copy whose probe mode is zero-mean thermal."""
        if n_b < 0:
            raise ConfigurationError(f"thermal occupation must be >= 0, got {n_b}")
        return replace(
            self, mean_b=0.0, n_b=float(n_b), sq_b=0.0, g4_b=2.0 * float(n_b) ** 2
        )


def make_squeezed_input_moments(
    n0: float,
    r: Optional[float] = None,
    squeezing_db: Optional[float] = None,
    theta: float = 0.0,
    probe_n: float = 0.0,
) -> InputMoments:
    """Displaced-squeezed beam mode with total occupation ``n0``.

    Exactly one of ``r`` (squeezing parameter) or ``squeezing_db`` must be
    given; ``theta`` orients the squeezing ellipse (the quadrature
    ``X(theta/2)`` carries the reduced variance ``e^(-2r)``) and the
    displacement is aligned with the squeezed axis, i.e. the beam is
    amplitude-squeezed for ``theta = 0``. The probe mode is vacuum, or
    zero-mean thermal when ``probe_n > 0``.
    """
    if (r is None) == (squeezing_db is None):
        raise ConfigurationError("give exactly one of r / squeezing_db")
    if r is None:
        r = squeezing_db_to_r(float(squeezing_db))
    if n0 < 0:
        raise ConfigurationError(f"beam occupation must be >= 0, got {n0}")
    n_s = math.sinh(r) ** 2
    m_s = -np.exp(1j * theta) * math.sinh(r) * math.cosh(r)
    coherent = n0 - n_s
    if coherent < 0:
        raise ConfigurationError(
            f"beam occupation {n0} below the squeezed-fluctuation floor "
            f"sinh^2(r) = {n_s}"
        )
    mean = math.sqrt(coherent) * np.exp(0.5j * theta)
    moments = InputMoments(
        mean_a=complex(mean),
        n_a=float(n0),
        sq_a=complex(mean**2 + m_s),
        g4_a=_gaussian_fourth_moment(complex(mean), n_s, complex(m_s)),
    )
    if probe_n > 0:
        moments = moments.with_thermal_probe(probe_n)
    return moments


# ---------------------------------------------------------------------------
# Mode functions and field states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeFunction:
    """A unit-norm readout mode on the grid (``integral |L|^2 dx = 1``)."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise ConfigurationError("mode function length does not match grid")
        norm_sq = float(np.sum(np.abs(v) ** 2) * self.grid.dx)
        if abs(norm_sq - 1.0) > 1.0e-8:
            raise ConfigurationError(
                f"mode function norm^2 = {norm_sq}, expected 1 (use from_field)"
            )
        object.__setattr__(self, "values", v)

    @classmethod
    def from_field(cls, field: ComplexField) -> "ModeFunction":
        """Normalize a field into a readout mode (zero field rejected)."""
        norm_sq = field.norm_squared()
        if norm_sq <= 0.0:
            raise ConfigurationError("cannot normalize a zero field into a mode")
        return cls(field.grid, field.values / math.sqrt(norm_sq))


@dataclass
class FieldState:
    """The five mode-function fields at one instant.

    ``f_*`` carry the beam input mode, ``h_*`` the probe input mode;
    ``psi`` components are atomic (beam) amplitudes, ``e`` components probe
    amplitudes, and ``phi`` is the classical condensate amplitude
    (``integral |phi|^2 dx`` = condensate atom number).
    """

    f_psi: ComplexField
    f_e: ComplexField
    h_psi: ComplexField
    h_e: ComplexField
    phi: ComplexField
    t: float = 0.0

    def __post_init__(self) -> None:
        g = self.f_psi.grid
        for name in ("f_e", "h_psi", "h_e", "phi"):
            if not getattr(self, name).grid.compatible_with(g):
                raise ConfigurationError(f"field {name} lives on a different grid")

    @property
    def grid(self) -> SpatialGrid:
        return self.f_psi.grid

    def copy(self) -> "FieldState":
        return FieldState(
            self.f_psi.copy(),
            self.f_e.copy(),
            self.h_psi.copy(),
            self.h_e.copy(),
            self.phi.copy(),
            self.t,
        )

    def pair_norms(self) -> dict:
        """Combined atom+light norm of each mode-function pair."""
        return {
            "f": self.f_psi.norm_squared() + self.f_e.norm_squared(),
            "h": self.h_psi.norm_squared() + self.h_e.norm_squared(),
        }

    def condensate_number(self) -> float:
        return self.phi.norm_squared()


# ---------------------------------------------------------------------------
# Initial-state builders
# ---------------------------------------------------------------------------


def condensate_ground_state(
    grid: SpatialGrid,
    params: ModelParams,
    derived: Optional[DerivedQuantities] = None,
) -> ComplexField:
    """Harmonic-trap ground state holding ``n_condensate`` atoms.

    ``phi(x) = phi_peak * exp(-x^2 / (2 a_ho^2))`` with
    ``phi_peak = sqrt(N0 / (sqrt(pi) a_ho))``; the Gaussian integrates to
    ``N0`` exactly in the continuum and to rounding on any grid that
    resolves ``a_ho``.
    """
    d = derived if derived is not None else derive(params)
    values = d.phi_peak * np.exp(-(grid.x**2) / (2.0 * d.a_ho**2))
    return ComplexField(grid, values.astype(np.complex128))


def _uniform_probe(grid: SpatialGrid) -> ComplexField:
    """Unit-norm uniform probe input mode ``h_E = 1/sqrt(L)``."""
    amp = 1.0 / math.sqrt(grid.length)
    return ComplexField(grid, np.full(grid.n_points, amp, dtype=np.complex128))


def make_pulsed_initial_state(
    grid: SpatialGrid,
    params: ModelParams,
    derived: Optional[DerivedQuantities] = None,
    center: float = -6.0e-4,
    sigma: float = 1.0e-4,
) -> FieldState:
    """Gaussian beam pulse upstream of the condensate, uniform probe mode.

    The pulse must clear both the domain edge and the condensate by at least
    five standard deviations so that neither truncation nor premature overlap
    corrupts the run; violations raise ``ConfigurationError``.
    """
    d = derived if derived is not None else derive(params)
    if sigma <= 0:
        raise ConfigurationError("pulse sigma must be positive")
    if center - grid.x_min < 5.0 * sigma or grid.x_max - center < 5.0 * sigma:
        raise ConfigurationError(
            f"pulse at {center} closer than 5 sigma to a domain edge"
        )
    condensate_edge = -5.0 * d.a_ho
    if condensate_edge - center < 5.0 * sigma:
        raise ConfigurationError(
            f"pulse at {center} closer than 5 sigma to the condensate edge "
            f"({condensate_edge})"
        )
    envelope = np.exp(-((grid.x - center) ** 2) / (2.0 * sigma**2))
    envelope /= math.sqrt(np.sum(np.abs(envelope) ** 2) * grid.dx)
    return FieldState(
        f_psi=ComplexField(grid, envelope.astype(np.complex128)),
        f_e=ComplexField.zeros(grid),
        h_psi=ComplexField.zeros(grid),
        h_e=_uniform_probe(grid),
        phi=condensate_ground_state(grid, params, d),
        t=0.0,
    )


def make_continuous_initial_state(
    grid: SpatialGrid,
    params: ModelParams,
    derived: Optional[DerivedQuantities] = None,
    tail: float = -1.30e-3,
    front: float = -1.0e-4,
    ramp: float = 5.0e-5,
) -> FieldState:
    """Flat-top beam segment with cos^2 ends, uniform probe mode.

    The segment spans ``[tail, front]`` with smooth ramps of width ``ramp``
    at both ends (sharp edges would alias on the spectral grid). The front
    must stop short of the condensate and the tail must clear the domain
    edge.
    """
    d = derived if derived is not None else derive(params)
    if ramp <= 0 or front - tail < 2.0 * ramp:
        raise ConfigurationError("beam segment too short for its ramps")
    if tail - grid.x_min < ramp:
        raise ConfigurationError("beam tail closer than one ramp to the domain edge")
    if front > -5.0 * d.a_ho:
        raise ConfigurationError(
            f"beam front {front} overlaps the condensate (must be <= {-5.0 * d.a_ho})"
        )
    x = grid.x
    envelope = np.zeros(grid.n_points)
    rising = (x >= tail) & (x < tail + ramp)
    envelope[rising] = np.sin(0.5 * np.pi * (x[rising] - tail) / ramp) ** 2
    flat = (x >= tail + ramp) & (x <= front - ramp)
    envelope[flat] = 1.0
    falling = (x > front - ramp) & (x <= front)
    envelope[falling] = np.sin(0.5 * np.pi * (front - x[falling]) / ramp) ** 2
    norm_sq = float(np.sum(envelope**2) * grid.dx)
    envelope /= math.sqrt(norm_sq)
    return FieldState(
        f_psi=ComplexField(grid, envelope.astype(np.complex128)),
        f_e=ComplexField.zeros(grid),
        h_psi=ComplexField.zeros(grid),
        h_e=_uniform_probe(grid),
        phi=condensate_ground_state(grid, params, d),
        t=0.0,
    )
