"""Quantum-statistics readout from evolved mode functions.

Every observable here follows from one fact: each field operator is a fixed
linear combination of the two input-mode operators plus vacuum,

    A = c_a * a0 + c_b * b0 + (vacuum modes),

so second-order statistics need only the complex coefficients ``(c_a, c_b)``
and the input-mode moments. The coefficients come either from projecting the
instantaneous mode functions onto a spatial readout mode
(:func:`mode_coefficients`) or from filtering the outgoing probe stream at a
detector point with a temporally matched mode (:class:`StreamReadout` —
the filtered flux operator is bosonic, and ``|c_a|^2`` is the number of
beam-mode photons that passed the detector).

Quadrature variances are normalized so vacuum = 1:

    V(theta) = 1 + 2 * sum_m [ |c_m|^2 (n_m - |mean_m|^2)
                               + Re(e^{-2 i theta} c_m^2 (sq_m - mean_m^2)) ].

Intensity correlations use the normally-ordered two-mode expansion (exact
for independent inputs when the zero-mean mode has no anomalous moment):

    g2 = [ |f|^4 g4_a + |h|^4 g4_b + 4 |f|^2 |h|^2 n_a n_b ]
         / ( |f|^2 n_a + |h|^2 n_b )^2 .
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigurationError
from .grid import ComplexField, inner_product
from .states import FieldState, InputMoments, ModeFunction

__all__ = [
    "QuadratureResult",
    "NumberTallies",
    "mode_coefficients",
    "quadrature_variance",
    "aligned_quadrature",
    "g2_correlation",
    "g2_profile",
    "number_tallies",
    "StreamReadout",
]

_COEFF_BOUND_TOL = 1.0e-8


@dataclass(frozen=True)
class QuadratureResult:
    """Aligned quadrature pair of one readout mode.

    ``theta`` is the analysis angle of the reduced-variance quadrature
    (``v_plus``); ``v_minus`` is measured at ``theta + pi/2``. For modes that
    captured nothing (``c_a = c_b = 0``) both variances are exactly 1.
    """

    theta: float
    v_plus: float
    v_minus: float
    c_a: complex
    c_b: complex

    @property
    def uncertainty_product(self) -> float:
        return self.v_plus * self.v_minus


@dataclass(frozen=True)
class NumberTallies:
    """Physical particle numbers carried by the current mode functions."""

    beam_atoms: float
    probe_photons: float
    condensate_atoms: float


def mode_coefficients(
    f_field: ComplexField, h_field: ComplexField, mode: ModeFunction
) -> tuple[complex, complex]:
    """Project the two mode functions of one field onto a readout mode.

    Returns ``(c_a, c_b) = (<L|f>, <L|h>)``. Unitarity of the pair evolution
    bounds ``|c_a|^2 + |c_b|^2 <= 1``; a violation beyond rounding means the
    readout mode or the fields are inconsistent and raises.
    """
    mode_field = ComplexField(mode.grid, mode.values)
    c_a = inner_product(mode_field, f_field)
    c_b = inner_product(mode_field, h_field)
    total = abs(c_a) ** 2 + abs(c_b) ** 2
    if total > 1.0 + _COEFF_BOUND_TOL:
        raise ConfigurationError(
            f"readout mode captures |c_a|^2+|c_b|^2 = {total} > 1; "
            "fields and mode are inconsistent"
        )
    return c_a, c_b


def _fluctuation_moments(moments: InputMoments) -> tuple:
    dn_a = moments.n_a - abs(moments.mean_a) ** 2
    dsq_a = moments.sq_a - moments.mean_a**2
    dn_b = moments.n_b - abs(moments.mean_b) ** 2
    dsq_b = moments.sq_b - moments.mean_b**2
    return dn_a, dsq_a, dn_b, dsq_b


def quadrature_variance(
    c_a: complex, c_b: complex, moments: InputMoments, theta: float = 0.0
) -> float:
    """Variance of ``X(theta) = A e^{-i theta} + A† e^{i theta}`` (vacuum = 1)."""
    dn_a, dsq_a, dn_b, dsq_b = _fluctuation_moments(moments)
    occ = abs(c_a) ** 2 * dn_a + abs(c_b) ** 2 * dn_b
    anom = c_a**2 * dsq_a + c_b**2 * dsq_b
    return float(1.0 + 2.0 * occ + 2.0 * (np.exp(-2j * theta) * anom).real)


def aligned_quadrature(
    c_a: complex, c_b: complex, moments: InputMoments
) -> QuadratureResult:
    """Quadrature pair aligned with the captured squeezing ellipse.

    The analysis angle minimizes the variance (for squeezed inputs this is
    the squeezed axis rotated by whatever propagation phase the mode
    accumulated); ``v_minus`` is the conjugate quadrature.
    """
    dn_a, dsq_a, dn_b, dsq_b = _fluctuation_moments(moments)
    occ = abs(c_a) ** 2 * dn_a + abs(c_b) ** 2 * dn_b
    anom = complex(c_a**2 * dsq_a + c_b**2 * dsq_b)
    if abs(anom) > 0.0:
        theta = 0.5 * (np.angle(anom) - math.pi)
    else:
        theta = 0.0
    v_plus = 1.0 + 2.0 * occ - 2.0 * abs(anom)
    v_minus = 1.0 + 2.0 * occ + 2.0 * abs(anom)
    return QuadratureResult(
        theta=float(theta),
        v_plus=float(v_plus),
        v_minus=float(v_minus),
        c_a=complex(c_a),
        c_b=complex(c_b),
    )


ArrayLike = Union[float, complex, np.ndarray]


def g2_correlation(
    moments: InputMoments, f_weight: ArrayLike, h_weight: ArrayLike
) -> Union[float, np.ndarray]:
    """Normalized intensity correlation of ``A = f*a0 + h*b0 (+ vacuum)``.

    Works pointwise on arrays (local g2 profiles) or on scalars (projected
    readout modes). Where the mean intensity vanishes the correlation is
    undefined and NaN is returned. The value is invariant under a common
    rescaling of ``f`` and ``h``.
    """
    f2 = np.abs(np.asarray(f_weight)) ** 2
    h2 = np.abs(np.asarray(h_weight)) ** 2
    num = (
        f2**2 * moments.g4_a
        + h2**2 * moments.g4_b
        + 4.0 * f2 * h2 * moments.n_a * moments.n_b
    )
    den = (f2 * moments.n_a + h2 * moments.n_b) ** 2
    scalar = np.isscalar(f_weight) or (
        isinstance(f_weight, complex) or isinstance(f_weight, float)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.nan)
    if scalar or out.ndim == 0:
        return float(out)
    return out


def g2_profile(
    state: FieldState, moments: InputMoments, which: str = "psi"
) -> np.ndarray:
    """Local ``g2(x)`` of the beam (``which='psi'``) or probe (``'e'``)."""
    if which == "psi":
        return g2_correlation(moments, state.f_psi.values, state.h_psi.values)
    if which == "e":
        return g2_correlation(moments, state.f_e.values, state.h_e.values)
    raise ConfigurationError(f"unknown field selector {which!r}")


def number_tallies(state: FieldState, moments: InputMoments) -> NumberTallies:
    """Total beam atoms, on-grid probe photons, and condensate atoms."""
    dx = state.grid.dx
    cross = complex(np.conj(moments.mean_a) * moments.mean_b)

    def total(f: ComplexField, h: ComplexField) -> float:
        value = moments.n_a * f.norm_squared() + moments.n_b * h.norm_squared()
        if cross != 0:
            overlap = np.sum(np.conj(f.values) * h.values) * dx
            value += float(2.0 * (cross * overlap).real)
        return float(value)

    return NumberTallies(
        beam_atoms=total(state.f_psi, state.h_psi),
        probe_photons=total(state.f_e, state.h_e),
        condensate_atoms=state.condensate_number(),
    )


class StreamReadout:
    """Temporally matched filter on the outgoing probe stream.

    Samples ``(t, f_E(x_d, t), h_E(x_d, t))`` accumulate during a run; the
    filter mode is the normalized beam-mode stream itself,
    ``L(t) = f_E(x_d, t) / ||f_E||_t``, so

        c_a = sqrt(c_sim) * integral conj(L) f_E dt = ||f_E||_t * sqrt(c_sim)

    equals the square root of the photon number that passed the detector,
    and ``c_b`` is the probe-input admixture through the same filter. The
    flux commutator makes the filtered operator bosonic, so the coefficients
    feed the standard quadrature/correlation formulas.
    """

    def __init__(self, c_sim: float) -> None:
        if c_sim <= 0:
            raise ConfigurationError("c_sim must be positive")
        self.c_sim = float(c_sim)
        self._t: list[float] = []
        self._f: list[complex] = []
        self._h: list[complex] = []

    def add_sample(self, t: float, f_value: complex, h_value: complex) -> None:
        if self._t and t <= self._t[-1]:
            raise ConfigurationError("stream samples must be strictly increasing in t")
        self._t.append(float(t))
        self._f.append(complex(f_value))
        self._h.append(complex(h_value))

    def __len__(self) -> int:
        return len(self._t)

    def _cumulative(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Cumulative trapezoid integrals of |f|^2 and conj(f) h."""
        t = np.asarray(self._t)
        f = np.asarray(self._f)
        h = np.asarray(self._h)
        if t.size < 2:
            z = np.zeros(max(t.size, 1))
            return t, z, z.astype(np.complex128)
        dt = np.diff(t)
        ff = np.abs(f) ** 2
        fh = np.conj(f) * h
        cum_ff = np.concatenate(([0.0], np.cumsum(0.5 * dt * (ff[1:] + ff[:-1]))))
        cum_fh = np.concatenate(
            ([0.0 + 0.0j], np.cumsum(0.5 * dt * (fh[1:] + fh[:-1])))
        )
        return t, cum_ff, cum_fh

    def coefficients(self) -> tuple[complex, complex]:
        """Filter coefficients ``(c_a, c_b)`` using the full stream so far."""
        _, cum_ff, cum_fh = self._cumulative()
        return self._coeffs_at(cum_ff[-1] if len(cum_ff) else 0.0,
                               cum_fh[-1] if len(cum_fh) else 0.0)

    def _coeffs_at(self, ff: float, fh: complex) -> tuple[complex, complex]:
        photons = self.c_sim * ff
        if photons <= 0.0:
            return 0.0 + 0.0j, 0.0 + 0.0j
        c_a = complex(math.sqrt(photons))
        c_b = complex(self.c_sim * fh / math.sqrt(photons))
        return c_a, c_b

    def photons_captured(self) -> float:
        c_a, _ = self.coefficients()
        return abs(c_a) ** 2

    def quadratures(self, moments: InputMoments) -> QuadratureResult:
        c_a, c_b = self.coefficients()
        return aligned_quadrature(c_a, c_b, moments)

    def g2(self, moments: InputMoments) -> float:
        c_a, c_b = self.coefficients()
        return g2_correlation(moments, c_a, c_b)

    def running(self, moments: InputMoments) -> list:
        """Per-sample running readout (quadratures and g2 vs time).

        Returns a list of ``(t, QuadratureResult, g2)`` tuples where the
        filter uses only the stream up to each sample time — the running
        values plateau once the wavetrain has fully passed the detector.
        """
        t, cum_ff, cum_fh = self._cumulative()
        out = []
        for j in range(len(self._t)):
            c_a, c_b = self._coeffs_at(float(cum_ff[j]), complex(cum_fh[j]))
            quad = aligned_quadrature(c_a, c_b, moments)
            g2 = g2_correlation(moments, c_a, c_b)
            out.append((float(t[j]), quad, g2))
        return out
