"""Calibration chain, derived quantities, and configuration parsing.

The derived quantities are checked two ways: against explicit hand
evaluations of the defining formulas (recomputed here from the bare
constants, not by calling into the package), and against frozen numerical
values so that an accidental change to the chain cannot pass silently.
"""

import json
import math

import pytest

from incoupler import (
    ConfigurationError,
    ModelParams,
    RunConfig,
    derive,
)
from incoupler.params import (
    PhysicalConstants,
    coupling_profile,
    load_config_file,
    parse_config_text,
)
from incoupler.states import condensate_ground_state

# Frozen expected values for the default parameter set.
FROZEN = {
    "v_atom": 0.011691807611075695,
    "a_ho": 4.822873851478676e-6,
    "t_rabi": 0.0016500010988582975,
    "omega_c_peak": 3807.9885592362198,
    "c_sim": 0.07346179379628127,
    "omega23": 342112648.6130622,
    "g13": 9.763109895147483,
    "gamma_sp": 74565853.995511,
    "phi_peak": 342026.3616547545,
}


class TestCalibrationChain:
    def test_hand_formulas(self, default_params, default_derived):
        p, d = default_params, default_derived
        c = p.constants
        v = 2.0 * c.hbar * p.k0 / c.mass
        a = math.sqrt(c.hbar / (c.mass * p.trap_omega))
        t_rabi = 4.0 * a / v
        gamma = p.k0**3 * p.d13**2 / (3.0 * math.pi * c.hbar * c.epsilon0)
        omega23 = p.delta * math.sqrt(4.0 * p.eta_target / (gamma * t_rabi))
        phi_pk = math.sqrt(p.n_condensate / (math.sqrt(math.pi) * a))
        g13 = (2.0 * math.pi / t_rabi) * p.delta / (phi_pk * omega23)
        assert d.v_atom == pytest.approx(v, rel=1e-14)
        assert d.a_ho == pytest.approx(a, rel=1e-14)
        assert d.t_rabi == pytest.approx(t_rabi, rel=1e-14)
        assert d.gamma_sp == pytest.approx(gamma, rel=1e-14)
        assert d.omega23 == pytest.approx(omega23, rel=1e-14)
        assert d.g13 == pytest.approx(g13, rel=1e-14)
        assert d.c_sim == pytest.approx(2.0 * math.pi * v, rel=1e-14)
        assert d.source_coefficient == pytest.approx(
            g13 * omega23 / p.delta, rel=1e-14
        )

    def test_frozen_values(self, default_derived):
        for name, value in FROZEN.items():
            assert getattr(default_derived, name) == pytest.approx(
                value, rel=1e-12
            ), name

    def test_peak_coupling_hits_full_conversion_target(self, default_derived):
        # the chain is anchored to omega_c_peak = 2*pi/t_rabi
        d = default_derived
        assert d.omega_c_peak * d.t_rabi == pytest.approx(2.0 * math.pi, rel=1e-12)

    def test_shift_product_identity(self, default_derived):
        # s_omega * s_phi_peak = (omega23 g13 phi_peak / delta)^2 = omega_c_peak^2
        d = default_derived
        assert d.s_omega * d.s_phi_peak == pytest.approx(
            d.omega_c_peak**2, rel=1e-12
        )

    def test_loss_budget_closes(self, default_derived):
        # calibrating omega23 from eta_target must reproduce eta_target
        assert default_derived.eta_bound == pytest.approx(0.04, rel=1e-12)

    def test_frame_and_resonance_constants(self, default_derived):
        d = default_derived
        recoil = d.recoil_rotation
        assert d.frame_rotation == pytest.approx(recoil - d.s_omega, rel=1e-12)
        assert d.two_photon_constant == pytest.approx(
            recoil - d.s_omega + d.s_phi_peak, rel=1e-12
        )

    def test_explicit_values_short_circuit_calibration(self):
        p = ModelParams(omega23=1.0e8, g13=5.0, c_sim=0.05)
        d = derive(p)
        assert d.omega23 == 1.0e8
        assert d.g13 == 5.0
        assert d.c_sim == 0.05

    def test_missing_d13_needs_omega23(self):
        with pytest.raises(ConfigurationError):
            derive(ModelParams(d13=None))
        d = derive(ModelParams(d13=None, omega23=1.0e8))
        assert d.gamma_sp is None
        assert d.eta_bound is None


class TestModelParamsValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k0": -1.0},
            {"k0": 0.0},
            {"delta": 0.0},
            {"trap_omega": 0.0},
            {"n_condensate": 0.0},
            {"c_sim": -1.0},
            {"eta_target": 0.0},
            {"eta_target": 1.0},
            {"omega23": -5.0},
            {"g13": 0.0},
        ],
    )
    def test_rejects_unphysical(self, kwargs):
        with pytest.raises(ConfigurationError):
            ModelParams(**kwargs)

    def test_constants_defaults(self):
        c = PhysicalConstants()
        assert c.hbar == 1.054571817e-34
        assert c.mass == 1.44316e-25


class TestCouplingProfile:
    def test_proportional_to_condensate(self, default_params, default_derived):
        from incoupler import SpatialGrid

        grid = SpatialGrid(-1.0e-3, 1.0e-3, 512)
        phi = condensate_ground_state(grid, default_params, default_derived)
        omega = coupling_profile(phi, default_params, default_derived)
        assert omega.values[grid.index_of(0.0)] == pytest.approx(
            default_derived.omega_c_peak, rel=1e-6
        )


class TestRunConfig:
    def test_defaults_resolve(self):
        cfg = RunConfig()
        assert cfg.scenario == "pulsed"
        grid = cfg.grid()
        assert grid.n_points == cfg.n_points
        params = cfg.model_params()
        assert params.k0 == cfg.k0

    def test_sentinels_map_to_calibration(self):
        # zero means "calibrate": ModelParams receives None
        params = RunConfig().model_params()
        assert params.omega23 is None
        assert params.g13 is None
        assert params.c_sim is None

    def test_replace(self):
        cfg = RunConfig().replace(dt=1e-5, scenario="free")
        assert cfg.dt == 1e-5
        assert cfg.scenario == "free"

    def test_from_mapping_unknown_key_raises(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_mapping({"not_a_field": 1})

    def test_from_mapping_coercions(self):
        cfg = RunConfig.from_mapping(
            {
                "dt": "1e-5",
                "n_points": "1024",
                "disable_kinetic": "true",
                "snapshot_times": "1e-3, 2e-3",
                "scenario": "free",
            }
        )
        assert cfg.dt == 1e-5
        assert cfg.n_points == 1024
        assert cfg.disable_kinetic is True
        assert cfg.snapshot_times == (1e-3, 2e-3)

    def test_from_mapping_bad_bool_raises(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_mapping({"disable_kinetic": "maybe"})


class TestConfigParsing:
    def test_json_object(self):
        text = json.dumps({"dt": 1e-5, "scenario": "continuous"})
        mapping = parse_config_text(text)
        assert mapping == {"dt": 1e-5, "scenario": "continuous"}

    def test_key_value_lines_with_comments(self):
        text = """
        # comment line
        dt = 1e-5
        scenario: continuous

        n_points = 2048  # trailing comment
        """
        mapping = parse_config_text(text)
        assert mapping["dt"] == "1e-5"
        assert mapping["scenario"] == "continuous"
        assert mapping["n_points"] == "2048"

    def test_malformed_line_raises(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("just some words\n")

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("dt = 2e-5\nscenario = free\n")
        mapping = load_config_file(path)
        assert mapping["dt"] == "2e-5"
        cfg = RunConfig.from_mapping(mapping)
        assert cfg.dt == 2e-5
        assert cfg.scenario == "free"
