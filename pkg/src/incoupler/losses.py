"""Spontaneous-scattering loss estimates and their effect on squeezing.

Adiabatic elimination leaves each beam atom with a small excited-state
admixture ``(omega23/delta)^2`` while it sits in the control light, so it
scatters photons at rate ``gamma_sp * (omega23/delta)^2``. Two estimates of
the per-atom scattering probability are provided:

* ``bound`` — rate times the condensate crossing time ``t_rabi/4 = a_ho/v``:
  the worst case of an atom ballistically crossing the fully illuminated
  region without being converted.
* ``integral`` — rate times the actual illumination dwell accumulated by the
  surviving beam density over a completed run. Atoms that convert into the
  condensate/probe stop scattering, so the integral form is strictly below
  the bound whenever incoupling happens.

The illumination window is the normalized condensate intensity profile
``chi(x) = exp(-x^2/a_ho^2)/sqrt(pi)`` whose ballistic line integral is
exactly ``a_ho/v``.

A scattering event replaces the atom with an uncorrelated vacuum draw, so a
loss fraction ``eta`` degrades any quadrature variance through the
beam-splitter map ``V -> (1 - eta) V + eta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .grid import SpatialGrid
from .params import DerivedQuantities, ModelParams, derive

__all__ = [
    "LossEstimate",
    "illumination_window",
    "scattering_rate",
    "spontaneous_loss",
    "apply_beam_splitter_loss",
]


@dataclass(frozen=True)
class LossEstimate:
    """Spontaneous-loss summary for one run."""

    gamma_sp: float
    rate: float
    dwell: float
    eta_integral: float
    eta_bound: float

    def __post_init__(self) -> None:
        if self.eta_integral > self.eta_bound * (1.0 + 1.0e-9) + 1.0e-12:
            raise ConfigurationError(
                f"integral loss {self.eta_integral} exceeds its bound "
                f"{self.eta_bound}; the run bookkeeping is inconsistent"
            )


def illumination_window(grid: SpatialGrid, derived: DerivedQuantities) -> np.ndarray:
    """Control-illumination window ``chi(x) = exp(-x^2/a_ho^2)/sqrt(pi)``."""
    return np.exp(-(grid.x**2) / derived.a_ho**2) / np.sqrt(np.pi)


def scattering_rate(
    params: ModelParams, derived: Optional[DerivedQuantities] = None
) -> float:
    """Peak spontaneous-scattering rate ``gamma_sp (omega23/delta)^2``."""
    d = derived if derived is not None else derive(params)
    if d.gamma_sp is None:
        raise ConfigurationError("scattering rate needs d13 (no dipole moment given)")
    return d.gamma_sp * (d.omega23 / params.delta) ** 2


def spontaneous_loss(
    times: Sequence[float],
    weighted_density: Sequence[float],
    params: ModelParams,
    derived: Optional[DerivedQuantities] = None,
) -> LossEstimate:
    """Loss estimate from a completed run.

    ``weighted_density[j]`` must be the beam's illumination overlap at
    ``times[j]``: ``integral rho_beam(x, t) chi(x) dx / N_beam(0)`` (a
    dimensionless fraction of the initial beam sitting in the light). The
    dwell is its time integral; the bound form uses ``t_rabi/4`` instead.
    """
    d = derived if derived is not None else derive(params)
    if d.gamma_sp is None or d.eta_bound is None:
        raise ConfigurationError("loss estimate needs d13 (no dipole moment given)")
    t = np.asarray(times, dtype=float)
    w = np.asarray(weighted_density, dtype=float)
    if t.shape != w.shape or t.ndim != 1 or t.size < 2:
        raise ConfigurationError("need matching 1D time/weight series (>= 2 points)")
    dwell = float(np.trapezoid(w, t))
    rate = scattering_rate(params, d)
    return LossEstimate(
        gamma_sp=d.gamma_sp,
        rate=rate,
        dwell=dwell,
        eta_integral=rate * dwell,
        eta_bound=float(d.eta_bound),
    )


def apply_beam_splitter_loss(variance: float, eta: float) -> float:
    """Mix a quadrature variance with vacuum: ``(1 - eta) V + eta``.

    ``eta`` is the loss fraction; ``eta = 0`` returns the variance
    unchanged, ``eta = 1`` returns vacuum.
    """
    if not 0.0 <= eta <= 1.0:
        raise ConfigurationError(f"loss fraction must lie in [0, 1], got {eta}")
    if variance < 0.0:
        raise ConfigurationError(f"variance must be >= 0, got {variance}")
    return (1.0 - eta) * variance + eta
