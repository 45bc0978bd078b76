"""Spontaneous-scattering loss model: rates, dwell integrals, and the
beam-splitter degradation of squeezing."""

import dataclasses
import math

import numpy as np
import pytest

from incoupler import ConfigurationError, ModelParams, SpatialGrid, derive
from incoupler.losses import (
    LossEstimate,
    apply_beam_splitter_loss,
    illumination_window,
    scattering_rate,
    spontaneous_loss,
)

GAMMA_SP = 74565853.995511
OMEGA23 = 342112648.6130622


class TestScatteringRate:
    def test_matches_hand_formula(self, default_params, default_derived):
        d = default_derived
        expected = d.gamma_sp * (d.omega23 / default_params.delta) ** 2
        assert scattering_rate(default_params, d) == pytest.approx(
            expected, rel=1e-14
        )
        # and against frozen constants
        frozen = GAMMA_SP * (OMEGA23 / default_params.delta) ** 2
        assert scattering_rate(default_params) == pytest.approx(frozen, rel=1e-10)

    def test_requires_dipole_moment(self, default_params):
        params = dataclasses.replace(default_params, d13=None)
        with pytest.raises(ConfigurationError):
            scattering_rate(params)

    def test_rate_times_crossing_time_is_target(self, default_params, default_derived):
        # the calibration chain fixes omega23 so that the ballistic bound
        # R * t_rabi / 4 lands exactly on eta_target
        rate = scattering_rate(default_params, default_derived)
        eta = rate * default_derived.t_rabi / 4.0
        assert eta == pytest.approx(default_params.eta_target, rel=1e-12)


class TestIlluminationWindow:
    def test_peak_and_line_integral(self, default_derived):
        grid = SpatialGrid(-1.5e-3, 1.5e-3, 8192)
        chi = illumination_window(grid, default_derived)
        assert chi.max() == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-6)
        # integral chi dx = a_ho exactly (Gaussian normalization)
        assert np.trapezoid(chi, grid.x) == pytest.approx(
            default_derived.a_ho, rel=1e-10
        )

    def test_ballistic_dwell_identity(self, default_derived):
        # an atom crossing at v_atom sees dwell = a_ho / v_atom = t_rabi / 4
        dwell = default_derived.a_ho / default_derived.v_atom
        assert dwell == pytest.approx(default_derived.t_rabi / 4.0, rel=1e-14)


class TestSpontaneousLoss:
    def test_constant_illumination_recovers_rate_times_time(
        self, default_params, default_derived
    ):
        t = np.linspace(0.0, 2.0e-4, 51)
        w = np.ones_like(t)
        est = spontaneous_loss(t, w, default_params, default_derived)
        assert est.dwell == pytest.approx(2.0e-4, rel=1e-12)
        rate = scattering_rate(default_params, default_derived)
        assert est.eta_integral == pytest.approx(rate * 2.0e-4, rel=1e-12)
        assert est.eta_bound == pytest.approx(default_params.eta_target, rel=1e-12)

    def test_calibrated_bound_is_four_percent(self, default_params, default_derived):
        # hand evaluation of gamma_sp (omega23/delta)^2 t_rabi / 4 with the
        # frozen calibration constants
        t_rabi = 0.0016500010988582975
        eta_hand = GAMMA_SP * (OMEGA23 / default_params.delta) ** 2 * t_rabi / 4.0
        assert abs(eta_hand - 0.04) / 0.04 < 1e-9
        t = np.linspace(0.0, 1.0e-4, 11)
        est = spontaneous_loss(t, np.zeros_like(t), default_params, default_derived)
        assert float(f"{est.eta_bound:.3g}") == 0.04

    def test_integral_above_bound_rejected(self):
        with pytest.raises(ConfigurationError, match="bound"):
            LossEstimate(
                gamma_sp=1.0, rate=1.0, dwell=1.0, eta_integral=0.5, eta_bound=0.04
            )

    def test_shape_validation(self, default_params, default_derived):
        with pytest.raises(ConfigurationError):
            spontaneous_loss([0.0], [1.0], default_params, default_derived)
        with pytest.raises(ConfigurationError):
            spontaneous_loss([0.0, 1.0], [1.0], default_params, default_derived)


class TestBeamSplitterLoss:
    def test_reference_value_is_exact(self):
        assert apply_beam_splitter_loss(0.398, 0.04) == 0.42208

    def test_limits_and_fixed_point(self):
        assert apply_beam_splitter_loss(0.5, 0.0) == 0.5
        assert apply_beam_splitter_loss(0.5, 1.0) == 1.0
        # vacuum is a fixed point for any eta
        for eta in (0.0, 0.1, 0.7, 1.0):
            assert apply_beam_splitter_loss(1.0, eta) == pytest.approx(1.0, abs=1e-15)

    def test_moves_towards_vacuum_from_both_sides(self):
        assert 0.398 < apply_beam_splitter_loss(0.398, 0.04) < 1.0
        assert 1.0 < apply_beam_splitter_loss(2.512, 0.04) < 2.512

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            apply_beam_splitter_loss(0.5, -0.1)
        with pytest.raises(ConfigurationError):
            apply_beam_splitter_loss(0.5, 1.1)
        with pytest.raises(ConfigurationError):
            apply_beam_splitter_loss(-0.2, 0.1)
