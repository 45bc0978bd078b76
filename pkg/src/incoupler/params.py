"""Physical parameters, calibration chain, and config-file handling.

The model couples a moving atomic beam (internal state |2>, momentum 2*hbar*k0)
to a co-propagating optical probe through a condensate-pumped Raman process.
After adiabatic elimination of the excited level the physics is controlled by
a handful of numbers:

* ``k0``            probe wavenumber (the beam carries momentum ``2*hbar*k0``),
* ``delta``         single-photon detuning from the excited level,
* ``omega23``       control (pump) Rabi frequency,
* ``g13``           probe-transition coupling per sqrt(linear density),
* ``trap_omega``    condensate trap frequency (rad/s),
* ``n_condensate``  condensate atom number,
* ``c_sim``         probe transport speed used in the simulation frame.

Rather than asking the user for a consistent set, the defaults are produced by
a calibration chain anchored to two laboratory-style targets:

1. the peak two-photon coupling equals ``2*pi / t_rabi`` where
   ``t_rabi = 4*a_ho / v_atom`` is the time a beam atom needs to cross the
   condensate (full conversion of a slow beam into probe light), and
2. the spontaneous-scattering budget ``eta_target`` (default 4%) fixes
   ``omega23/delta`` through the excited-state admixture.

``derive`` evaluates the chain and returns every derived quantity used by the
propagator, including the two-photon resonance constant (the probe-laser
tuning that makes the Raman process resonant at the condensate centre) and
the common rotation frequency removed from the co-evolving pair fields.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from .errors import ConfigurationError
from .grid import ComplexField, SpatialGrid

__all__ = [
    "PhysicalConstants",
    "ModelParams",
    "DerivedQuantities",
    "derive",
    "coupling_profile",
    "RunConfig",
    "load_config_file",
    "parse_config_text",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants; mass defaults to 87Rb."""

    hbar: float = 1.054571817e-34
    mass: float = 1.44316e-25
    c_light: float = 2.99792458e8
    epsilon0: float = 8.8541878128e-12


@dataclass(frozen=True)
class ModelParams:
    """Primary physical inputs.

    ``omega23``, ``g13`` and ``c_sim`` may be left as ``None`` to request the
    calibrated defaults (see module docstring); ``d13`` may be ``None`` when
    no spontaneous-loss estimate is wanted, in which case ``omega23`` must be
    given explicitly.
    """

    k0: float = 8.0e6
    delta: float = 3.0e11
    omega23: Optional[float] = None
    g13: Optional[float] = None
    d13: Optional[float] = 3.58e-29
    trap_omega: float = 2.0 * math.pi * 5.0
    n_condensate: float = 1.0e6
    c_sim: Optional[float] = None
    two_photon_offset: float = 0.0
    eta_target: float = 0.04
    constants: PhysicalConstants = PhysicalConstants()

    def __post_init__(self) -> None:
        if self.k0 <= 0:
            raise ConfigurationError(f"k0 must be positive, got {self.k0}")
        if self.delta == 0:
            raise ConfigurationError("delta must be nonzero (adiabatic elimination)")
        if self.trap_omega <= 0:
            raise ConfigurationError("trap_omega must be positive")
        if self.n_condensate <= 0:
            raise ConfigurationError("n_condensate must be positive")
        if self.c_sim is not None and self.c_sim <= 0:
            raise ConfigurationError("c_sim must be positive when given")
        if self.eta_target <= 0 or self.eta_target >= 1:
            raise ConfigurationError("eta_target must lie in (0, 1)")
        for name in ("omega23", "g13", "d13"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ConfigurationError(f"{name} must be positive when given")


@dataclass(frozen=True)
class DerivedQuantities:
    """Everything the propagator and observables need, fully resolved.

    Attributes
    ----------
    v_atom:
        Beam group velocity ``2*hbar*k0/m``.
    a_ho:
        Condensate (harmonic oscillator) length ``sqrt(hbar/(m*trap_omega))``.
    t_rabi:
        Condensate crossing time ``4*a_ho/v_atom``; the coupling calibration
        makes one full beam->probe->beam cycle fit this window.
    omega_c_peak:
        Peak two-photon coupling ``phi_peak*g13*omega23/delta``.
    gamma_sp:
        Excited-level spontaneous rate ``k0^3 d13^2/(3 pi hbar eps0)``
        (``None`` when ``d13`` is not given).
    omega23, g13, c_sim:
        The resolved values actually in force (calibrated when not set).
    phi_peak:
        Condensate peak amplitude ``sqrt(N0/(sqrt(pi)*a_ho))``.
    s_omega:
        Uniform control light shift on the beam, ``omega23^2/delta``.
    s_phi_peak:
        Condensate light shift on the probe at the trap centre,
        ``g13^2*phi_peak^2/delta``.
    recoil_rotation:
        ``hbar*(2 k0)^2/(2 m)`` — the beam's kinetic phase rotation rate.
    two_photon_constant:
        Probe-laser tuning constant making the Raman process resonant at the
        condensate peak: ``recoil_rotation - s_omega + s_phi_peak + offset``.
    frame_rotation:
        Common rotation ``recoil_rotation - s_omega`` removed from both pair
        fields during propagation (bilinears are invariant under it).
    source_coefficient:
        Condensate feeding coefficient ``g13*omega23/delta`` multiplying the
        probe-beam cross correlation.
    eta_bound:
        Spontaneous-loss budget ``gamma_sp*(omega23/delta)^2*t_rabi/4``
        (``None`` when ``gamma_sp`` is).
    """

    v_atom: float
    a_ho: float
    t_rabi: float
    omega_c_peak: float
    gamma_sp: Optional[float]
    omega23: float
    g13: float
    c_sim: float
    phi_peak: float
    s_omega: float
    s_phi_peak: float
    recoil_rotation: float
    two_photon_constant: float
    frame_rotation: float
    source_coefficient: float
    eta_bound: Optional[float]


def derive(params: ModelParams) -> DerivedQuantities:
    """Run the calibration chain and return all derived quantities.

    Calibration order (each step skipped when the user already fixed the
    value): spontaneous rate from ``d13``; ``omega23`` from the
    ``eta_target`` loss budget; ``g13`` from the full-conversion coupling
    target ``2*pi/t_rabi``; ``c_sim`` from the co-propagation matching
    condition ``2*pi*v_atom`` (at which the calibrated coupling transfers the
    whole beam into the probe).
    """
    c = params.constants
    v_atom = 2.0 * c.hbar * params.k0 / c.mass
    a_ho = math.sqrt(c.hbar / (c.mass * params.trap_omega))
    t_rabi = 4.0 * a_ho / v_atom
    omega_c_target = 2.0 * math.pi / t_rabi
    phi_peak = math.sqrt(params.n_condensate / (math.sqrt(math.pi) * a_ho))

    gamma_sp: Optional[float] = None
    if params.d13 is not None:
        gamma_sp = params.k0**3 * params.d13**2 / (3.0 * math.pi * c.hbar * c.epsilon0)

    omega23 = params.omega23
    if omega23 is None:
        if gamma_sp is None:
            raise ConfigurationError(
                "omega23 calibration needs d13 (loss budget); "
                "set omega23 explicitly or provide d13"
            )
        omega23 = abs(params.delta) * math.sqrt(
            4.0 * params.eta_target / (gamma_sp * t_rabi)
        )

    g13 = params.g13
    if g13 is None:
        g13 = omega_c_target * abs(params.delta) / (phi_peak * omega23)

    c_sim = params.c_sim if params.c_sim is not None else 2.0 * math.pi * v_atom

    s_omega = omega23**2 / params.delta
    s_phi_peak = g13**2 * phi_peak**2 / params.delta
    recoil = c.hbar * (2.0 * params.k0) ** 2 / (2.0 * c.mass)
    two_photon_constant = recoil - s_omega + s_phi_peak + params.two_photon_offset
    frame_rotation = recoil - s_omega
    source_coefficient = g13 * omega23 / params.delta
    omega_c_peak = phi_peak * source_coefficient

    eta_bound = None
    if gamma_sp is not None:
        eta_bound = gamma_sp * (omega23 / params.delta) ** 2 * t_rabi / 4.0

    return DerivedQuantities(
        v_atom=v_atom,
        a_ho=a_ho,
        t_rabi=t_rabi,
        omega_c_peak=omega_c_peak,
        gamma_sp=gamma_sp,
        omega23=omega23,
        g13=g13,
        c_sim=c_sim,
        phi_peak=phi_peak,
        s_omega=s_omega,
        s_phi_peak=s_phi_peak,
        recoil_rotation=recoil,
        two_photon_constant=two_photon_constant,
        frame_rotation=frame_rotation,
        source_coefficient=source_coefficient,
        eta_bound=eta_bound,
    )


def coupling_profile(
    phi: ComplexField, params: ModelParams, derived: Optional[DerivedQuantities] = None
) -> ComplexField:
    """Two-photon coupling profile ``Omega_C(x) = (g13*conj(omega23)/delta)*phi(x)``.

    The condensate amplitude ``phi`` carries the spatial shape; the prefactor
    is the resolved source coefficient. Recomputed every step in the
    propagator so condensate growth feeds back on the coupling.
    """
    d = derived if derived is not None else derive(params)
    return ComplexField(phi.grid, d.source_coefficient * phi.values)


# ---------------------------------------------------------------------------
# Run configuration (flat key/value files + CLI overrides)
# ---------------------------------------------------------------------------

_PROBE_MODES = ("quasistatic", "scaledc")
_PROBE_INPUTS = ("vacuum", "thermal")


@dataclass(frozen=True)
class RunConfig:
    """Complete, flat description of one simulation run.

    Every field can be set from a config file (``key = value`` lines or a
    JSON object) or from CLI flags; scenario presets fill in their own
    defaults first (e.g. ``duration``). Zero/empty sentinel values for
    ``omega23``, ``g13``, ``c_sim`` and ``duration`` mean "use the
    calibrated/scenario default".
    """

    scenario: str = "pulsed"

    # physics
    k0: float = 8.0e6
    delta: float = 3.0e11
    omega23: float = 0.0
    g13: float = 0.0
    d13: float = 3.58e-29
    trap_omega: float = 2.0 * math.pi * 5.0
    n_condensate: float = 1.0e6
    c_sim: float = 0.0
    two_photon_offset: float = 0.0
    eta_target: float = 0.04

    # grid
    x_min: float = -1.5e-3
    x_max: float = 1.5e-3
    n_points: int = 4096

    # numerics
    dt: float = 5.0e-6
    duration: float = 0.0
    record_every: int = 100
    probe_mode: str = "quasistatic"
    absorber_fraction: float = 0.05

    # beam input
    beam_n0: float = 5.0e3
    squeezing_db: float = 4.0
    squeeze_angle: float = 0.0
    pulse_center: float = -6.0e-4
    pulse_sigma: float = 1.0e-4
    beam_tail: float = -1.30e-3
    beam_front: float = -1.0e-4
    beam_ramp: float = 5.0e-5

    # probe input
    probe_input: str = "vacuum"
    probe_density: float = 1.9e-7

    # readout / diagnostics
    detector_x: float = 1.0e-4
    snapshot_times: tuple = ()

    # test/scenario hooks
    coupling_scale: float = 1.0
    uniform_coupling: float = 0.0
    disable_kinetic: bool = False

    def __post_init__(self) -> None:
        if self.probe_mode not in _PROBE_MODES:
            raise ConfigurationError(
                f"probe_mode must be one of {_PROBE_MODES}, got {self.probe_mode!r}"
            )
        if self.probe_input not in _PROBE_INPUTS:
            raise ConfigurationError(
                f"probe_input must be one of {_PROBE_INPUTS}, got {self.probe_input!r}"
            )
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.record_every < 1:
            raise ConfigurationError("record_every must be >= 1")
        if self.duration < 0:
            raise ConfigurationError("duration must be >= 0")

    def model_params(self) -> ModelParams:
        return ModelParams(
            k0=self.k0,
            delta=self.delta,
            omega23=self.omega23 or None,
            g13=self.g13 or None,
            d13=self.d13 or None,
            trap_omega=self.trap_omega,
            n_condensate=self.n_condensate,
            c_sim=self.c_sim or None,
            two_photon_offset=self.two_photon_offset,
            eta_target=self.eta_target,
        )

    def grid(self) -> SpatialGrid:
        return SpatialGrid(self.x_min, self.x_max, self.n_points)

    def replace(self, **updates: Any) -> "RunConfig":
        return dataclasses.replace(self, **updates)

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "RunConfig":
        """Build a config from a flat mapping, with type coercion.

        Unknown keys raise ``ConfigurationError`` (listing the offenders) so
        typos in config files fail loudly instead of being ignored.
        """
        fields = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(mapping) - set(fields))
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        kwargs: dict[str, Any] = {}
        for key, raw in mapping.items():
            kwargs[key] = _coerce(key, raw, fields[key].type)
        return cls(**kwargs)


def _coerce(key: str, raw: Any, annotation: Any) -> Any:
    """Coerce a raw config value (possibly a string) to the field's type."""
    ann = str(annotation)
    try:
        if key == "snapshot_times":
            if isinstance(raw, (list, tuple)):
                return tuple(float(v) for v in raw)
            text = str(raw).strip()
            if not text:
                return ()
            return tuple(float(tok) for tok in text.replace(",", " ").split())
        if "bool" in ann:
            if isinstance(raw, bool):
                return raw
            token = str(raw).strip().lower()
            if token in ("1", "true", "yes", "on"):
                return True
            if token in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if "int" in ann:
            return int(str(raw), 0) if isinstance(raw, str) else int(raw)
        if "float" in ann:
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"config key {key!r}: {exc}") from exc


def parse_config_text(text: str) -> dict:
    """Parse config text: a JSON object, or ``key = value`` lines.

    Line format: one ``key = value`` (or ``key: value``) pair per line,
    ``#`` starts a comment, blank lines ignored.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigurationError("JSON config must be an object")
        return data
    mapping: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        for sep in ("=", ":"):
            if sep in body:
                key, value = body.split(sep, 1)
                break
        else:
            raise ConfigurationError(f"config line {lineno}: expected key = value")
        mapping[key.strip()] = value.strip()
    return mapping


def load_config_file(path: str | Path) -> dict:
    """Read and parse a config file; returns the raw key/value mapping."""
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {p}")
    return parse_config_text(p.read_text())


def harmonic_trap_potential(grid: SpatialGrid, params: ModelParams) -> np.ndarray:
    """Trap potential ``0.5*m*trap_omega^2*x^2 / hbar`` in rad/s."""
    c = params.constants
    return 0.5 * c.mass * params.trap_omega**2 * grid.x**2 / c.hbar
