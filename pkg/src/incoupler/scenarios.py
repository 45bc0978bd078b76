"""Packaged experiments: scenario registry, recording, and file output.

Four scenarios ship with the package:

* ``pulsed``      — a squeezed Gaussian beam pulse crosses the condensate and
                    its statistics are written onto the emitted probe train;
* ``continuous``  — a long flat-top beam segment produces a quasi-steady
                    probe stream (the squeezing transfer in steady state);
* ``free``        — the coupling is switched off; the pulse propagates freely
                    and every readout must stay at vacuum (regression guard);
* ``rabi_control``— spatially uniform coupling with kinetic terms disabled:
                    beam and probe populations exchange as cos^2/sin^2 of the
                    coupling area (the analytic control case used to pin the
                    splitting error).

``run_scenario`` takes a fully merged :class:`~incoupler.params.RunConfig`,
integrates it, and returns a :class:`ScenarioResult` holding the per-record
time series, the final state, and a :class:`RunSummary`; with an output
directory it also writes ``timeseries.csv``, optional ``snapshot_*.csv``
files, and ``summary.txt``.
"""

from __future__ import annotations

import math
from dataclasses import MISSING, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import accel
from .errors import ConfigurationError
from .evolve import FluxLedger, Propagator, RunResult, StepConfig
from .grid import ComplexField, SpatialGrid
from .losses import LossEstimate, apply_beam_splitter_loss, illumination_window, spontaneous_loss
from .observables import (
    QuadratureResult,
    StreamReadout,
    aligned_quadrature,
    g2_correlation,
    g2_profile,
    number_tallies,
)
from .params import DerivedQuantities, ModelParams, RunConfig, derive
from .states import (
    FieldState,
    InputMoments,
    condensate_ground_state,
    make_continuous_initial_state,
    make_pulsed_initial_state,
    make_squeezed_input_moments,
)

__all__ = [
    "ScenarioSpec",
    "SCENARIOS",
    "ObservableRow",
    "RunSummary",
    "ScenarioResult",
    "effective_config",
    "run_scenario",
    "write_timeseries",
]


@dataclass(frozen=True)
class ScenarioSpec:
    """A named experiment preset: config overrides applied under the user's."""

    name: str
    description: str
    overrides: dict = field(default_factory=dict)
    default_duration: Optional[float] = None  # None -> derived at runtime


SCENARIOS: dict[str, ScenarioSpec] = {
    "pulsed": ScenarioSpec(
        name="pulsed",
        description=(
            "Squeezed Gaussian beam pulse crosses the condensate; its "
            "quadrature statistics transfer to the emitted probe train."
        ),
        default_duration=0.110,
    ),
    "continuous": ScenarioSpec(
        name="continuous",
        description=(
            "Flat-top beam segment gives a quasi-steady probe stream; "
            "steady-state squeezing transfer."
        ),
        default_duration=0.120,
    ),
    "free": ScenarioSpec(
        name="free",
        description=(
            "Coupling off: free pulse propagation; all readouts stay at "
            "vacuum (regression guard)."
        ),
        overrides={"coupling_scale": 0.0},
        default_duration=0.020,
    ),
    "rabi_control": ScenarioSpec(
        name="rabi_control",
        description=(
            "Uniform coupling, kinetic terms off: analytic cos^2/sin^2 "
            "population exchange between beam and probe."
        ),
        overrides={
            "probe_mode": "scaledc",
            "disable_kinetic": True,
            "record_every": 5,
        },
        default_duration=None,  # one full coupling period, t_rabi
    ),
}


# CSV column order for the per-record time series.
TIMESERIES_COLUMNS = (
    "t",
    "beam_atoms",
    "probe_photons",
    "condensate_atoms",
    "v_plus_atom",
    "v_minus_atom",
    "v_plus_probe",
    "v_minus_probe",
    "g2_atom",
    "g2_probe",
    "atoms_incoupled",
    "photons_emitted",
    "detector_flux",
    "pair_norm_f",
    "pair_norm_h",
    "light_leak_f",
    "light_leak_h",
    "conservation_error_f",
    "conservation_error_h",
)


@dataclass
class ObservableRow:
    """One record of the scenario time series (see TIMESERIES_COLUMNS)."""

    t: float
    beam_atoms: float
    probe_photons: float
    condensate_atoms: float
    v_plus_atom: float
    v_minus_atom: float
    v_plus_probe: float
    v_minus_probe: float
    g2_atom: float
    g2_probe: float
    atoms_incoupled: float
    photons_emitted: float
    detector_flux: float
    pair_norm_f: float
    pair_norm_h: float
    light_leak_f: float
    light_leak_h: float
    conservation_error_f: float
    conservation_error_h: float

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in TIMESERIES_COLUMNS)


@dataclass
class RunSummary:
    """Headline numbers of one completed scenario run."""

    scenario: str
    probe_mode: str
    backend: str
    n_steps: int
    dt: float
    duration: float
    grid_points: int
    wall_time: float
    beam_atoms_initial: float
    beam_atoms_final: float
    atoms_incoupled: float
    photons_emitted: float
    photons_captured: float
    input_v_plus: float
    input_v_minus: float
    atom_v_plus: float
    atom_v_minus: float
    probe_v_plus: float
    probe_v_minus: float
    probe_uncertainty_product: float
    probe_g2: float
    atom_g2_initial: float
    peak_probe_time: float
    peak_detector_flux: float
    max_conservation_error: float
    loss: Optional[LossEstimate] = None
    probe_v_plus_after_loss: Optional[float] = None
    probe_v_minus_after_loss: Optional[float] = None

    def to_text(self) -> str:
        lines = [
            f"scenario            : {self.scenario} (probe_mode={self.probe_mode}, "
            f"kernels={self.backend})",
            f"steps               : {self.n_steps} x dt={self.dt:g} s "
            f"({self.duration:g} s), {self.grid_points} grid points, "
            f"wall {self.wall_time:.2f} s",
            f"beam atoms          : {self.beam_atoms_initial:.6g} -> "
            f"{self.beam_atoms_final:.6g}",
            f"atoms incoupled     : {self.atoms_incoupled:.6g}",
            f"photons emitted     : {self.photons_emitted:.6g}",
            f"photons captured    : {self.photons_captured:.6g}",
            f"input quadratures   : V+ = {self.input_v_plus:.6f}, "
            f"V- = {self.input_v_minus:.6f}",
            f"beam quadratures    : V+ = {self.atom_v_plus:.6f}, "
            f"V- = {self.atom_v_minus:.6f}",
            f"probe quadratures   : V+ = {self.probe_v_plus:.6f}, "
            f"V- = {self.probe_v_minus:.6f} "
            f"(product {self.probe_uncertainty_product:.6f})",
            f"probe g2            : {self.probe_g2:.6f} "
            f"(beam input g2 {self.atom_g2_initial:.6f})",
            f"peak detector flux  : {self.peak_detector_flux:.6g} /s "
            f"at t = {self.peak_probe_time * 1e3:.2f} ms",
            f"max conservation err: {self.max_conservation_error:.3e}",
        ]
        if self.loss is not None:
            lines.append(
                f"spontaneous loss    : eta_integral = {self.loss.eta_integral:.4f}"
                f" (bound {self.loss.eta_bound:.4f})"
            )
            lines.append(
                f"probe V after loss  : V+ = {self.probe_v_plus_after_loss:.6f}, "
                f"V- = {self.probe_v_minus_after_loss:.6f}"
            )
        return "\n".join(lines)


@dataclass
class ScenarioResult:
    config: RunConfig
    params: ModelParams
    derived: DerivedQuantities
    moments: InputMoments
    rows: list
    summary: RunSummary
    result: RunResult
    stream: StreamReadout
    snapshots: dict


def _uniform_beam_state(
    grid: SpatialGrid, params: ModelParams, derived: DerivedQuantities
) -> FieldState:
    """Uniform unit-norm beam mode for the rabi_control scenario."""
    amp = 1.0 / math.sqrt(grid.length)
    uniform = np.full(grid.n_points, amp, dtype=np.complex128)
    return FieldState(
        f_psi=ComplexField(grid, uniform.copy()),
        f_e=ComplexField.zeros(grid),
        h_psi=ComplexField.zeros(grid),
        h_e=ComplexField(grid, uniform.copy()),
        phi=condensate_ground_state(grid, params, derived),
        t=0.0,
    )


def build_initial_state(
    cfg: RunConfig,
    params: ModelParams,
    derived: DerivedQuantities,
    grid: SpatialGrid,
) -> FieldState:
    """Scenario-specific initial fields."""
    if cfg.scenario in ("pulsed", "free"):
        return make_pulsed_initial_state(
            grid, params, derived, center=cfg.pulse_center, sigma=cfg.pulse_sigma
        )
    if cfg.scenario == "continuous":
        return make_continuous_initial_state(
            grid,
            params,
            derived,
            tail=cfg.beam_tail,
            front=cfg.beam_front,
            ramp=cfg.beam_ramp,
        )
    if cfg.scenario == "rabi_control":
        return _uniform_beam_state(grid, params, derived)
    raise ConfigurationError(
        f"unknown scenario {cfg.scenario!r}; choices: {', '.join(SCENARIOS)}"
    )


def build_moments(cfg: RunConfig, grid: SpatialGrid) -> InputMoments:
    probe_n = (
        cfg.probe_density * grid.length if cfg.probe_input == "thermal" else 0.0
    )
    return make_squeezed_input_moments(
        n0=cfg.beam_n0,
        squeezing_db=cfg.squeezing_db,
        theta=cfg.squeeze_angle,
        probe_n=probe_n,
    )


def _resolve_duration(cfg: RunConfig, derived: DerivedQuantities) -> float:
    spec = SCENARIOS.get(cfg.scenario)
    duration = cfg.duration
    if duration == 0.0:
        if spec is not None and spec.default_duration is not None:
            duration = spec.default_duration
        else:
            duration = derived.t_rabi  # rabi_control: one full coupling period
    # snap to a whole number of steps
    n = max(1, int(round(duration / cfg.dt)))
    return n * cfg.dt


def _step_config(cfg: RunConfig, derived: DerivedQuantities) -> StepConfig:
    uniform = cfg.uniform_coupling or None
    if cfg.scenario == "rabi_control" and uniform is None:
        uniform = derived.omega_c_peak
    return StepConfig(
        dt=cfg.dt,
        probe_mode=cfg.probe_mode,
        record_every=cfg.record_every,
        absorber_fraction=cfg.absorber_fraction,
        coupling_scale=cfg.coupling_scale,
        uniform_coupling=uniform,
        disable_kinetic=cfg.disable_kinetic,
    )


class _Recorder:
    """Collects per-record raw data during a run; rows are built afterwards."""

    def __init__(
        self,
        cfg: RunConfig,
        derived: DerivedQuantities,
        grid: SpatialGrid,
        moments: InputMoments,
    ) -> None:
        self.cfg = cfg
        self.derived = derived
        self.grid = grid
        self.moments = moments
        self.detector_index = grid.index_of(cfg.detector_x)
        self.chi = illumination_window(grid, derived)
        self.stream = StreamReadout(derived.c_sim)
        self.times: list[float] = []
        self.tallies: list = []
        self.atom_quads: list[QuadratureResult] = []
        self.g2_atoms: list[float] = []
        self.atom_norms: list[tuple[float, float]] = []
        self.light_norms: list[tuple[float, float]] = []
        self.leaks: list[tuple[float, float]] = []
        self.detector_flux: list[float] = []
        self.chi_overlap: list[float] = []
        self.snapshots: dict[float, dict] = {}
        self._beam0: Optional[float] = None
        self._want_snapshots = sorted(cfg.snapshot_times)

    def __call__(self, state: FieldState, ledger: FluxLedger, step: int) -> None:
        m = self.moments
        t = state.t
        tal = number_tallies(state, m)
        if self._beam0 is None:
            self._beam0 = max(tal.beam_atoms, 1e-300)

        # beam readout: project onto the (normalized) surviving beam mode
        f_norm = math.sqrt(state.f_psi.norm_squared())
        if f_norm > 1e-12:
            c_a = complex(f_norm)
            c_b = complex(
                np.vdot(state.f_psi.values, state.h_psi.values)
                * self.grid.dx
                / f_norm
            )
            quad = aligned_quadrature(c_a, c_b, m)
            g2_atom = float(g2_correlation(m, c_a, c_b))
        else:
            quad = aligned_quadrature(0.0, 0.0, m)
            g2_atom = float("nan")

        ix = self.detector_index
        f_d = complex(state.f_e.values[ix])
        h_d = complex(state.h_e.values[ix])
        self.stream.add_sample(t, f_d, h_d)
        flux = self.derived.c_sim * (m.n_a * abs(f_d) ** 2 + m.n_b * abs(h_d) ** 2)

        beam_density = (
            m.n_a * state.f_psi.density() + m.n_b * state.h_psi.density()
        )
        overlap = float(np.sum(beam_density * self.chi) * self.grid.dx) / self._beam0

        self.times.append(t)
        self.tallies.append(tal)
        self.atom_quads.append(quad)
        self.g2_atoms.append(g2_atom)
        self.atom_norms.append(
            (state.f_psi.norm_squared(), state.h_psi.norm_squared())
        )
        self.light_norms.append(
            (state.f_e.norm_squared(), state.h_e.norm_squared())
        )
        self.leaks.append((ledger.light_leakage("f"), ledger.light_leakage("h")))
        self.detector_flux.append(flux)
        self.chi_overlap.append(overlap)

        for t_want in self._want_snapshots:
            if abs(t - t_want) <= 0.5 * self.cfg.dt * self.cfg.record_every and (
                t_want not in self.snapshots
            ):
                self.snapshots[t_want] = self._snapshot(state)

    def _snapshot(self, state: FieldState) -> dict:
        m = self.moments
        d = self.derived
        return {
            "x": self.grid.x.copy(),
            "beam_density": m.n_a * state.f_psi.density()
            + m.n_b * state.h_psi.density(),
            "probe_density": m.n_a * state.f_e.density()
            + m.n_b * state.h_e.density(),
            "condensate_density": state.phi.density(),
            "coupling": np.abs(d.source_coefficient * state.phi.values),
            "g2_beam": g2_profile(state, m, "psi"),
            "g2_probe": g2_profile(state, m, "e"),
        }


def effective_config(cfg: RunConfig) -> RunConfig:
    """Fill scenario preset values into fields left at their defaults.

    The command line merges preset overrides under user flags before the
    config ever reaches :func:`run_scenario`; this gives direct API callers
    the same behaviour.  A field the caller set away from its dataclass
    default is never touched, so explicit choices always win.
    """
    spec = SCENARIOS.get(cfg.scenario)
    if spec is None or not spec.overrides:
        return cfg
    defaults = {
        f.name: (f.default if f.default is not MISSING else f.default_factory())
        for f in fields(RunConfig)
    }
    fills = {
        key: value
        for key, value in spec.overrides.items()
        if getattr(cfg, key) == defaults[key]
    }
    return cfg.replace(**fills) if fills else cfg


def run_scenario(cfg: RunConfig, out_dir: Optional[str | Path] = None) -> ScenarioResult:
    """Integrate one scenario and (optionally) write its output files."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigurationError(
            f"unknown scenario {cfg.scenario!r}; choices: {', '.join(SCENARIOS)}"
        )
    cfg = effective_config(cfg)
    params = cfg.model_params()
    derived = derive(params)
    grid = cfg.grid()
    moments = build_moments(cfg, grid)
    state = build_initial_state(cfg, params, derived, grid)
    duration = _resolve_duration(cfg, derived)
    step_cfg = _step_config(cfg, derived)

    recorder = _Recorder(cfg, derived, grid, moments)
    prop = Propagator(params, grid, step_cfg, moments, derived)
    result = prop.run(state, duration, callback=recorder)

    rows = _build_rows(recorder, moments, cfg)
    summary = _build_summary(cfg, derived, moments, recorder, rows, result)

    snapshots = recorder.snapshots
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_timeseries(out / "timeseries.csv", rows)
        (out / "summary.txt").write_text(summary.to_text() + "\n")
        for t_snap, data in snapshots.items():
            write_snapshot(out / f"snapshot_{t_snap * 1e3:08.3f}ms.csv", data)

    return ScenarioResult(
        config=cfg,
        params=params,
        derived=derived,
        moments=moments,
        rows=rows,
        summary=summary,
        result=result,
        stream=recorder.stream,
        snapshots=snapshots,
    )


def _build_rows(
    recorder: _Recorder, moments: InputMoments, cfg: RunConfig
) -> list:
    running = recorder.stream.running(moments)
    rows: list[ObservableRow] = []
    cond0 = recorder.tallies[0].condensate_atoms if recorder.tallies else 0.0
    # Conservation identity depends on the probe treatment. With dynamical
    # (scaledc) light, pair norm plus ledgered leakage is constant. With a
    # slaved (quasistatic) probe the light norm is instantaneous in-flight
    # content; the exact identity is atom norm plus net boundary flux.
    quasistatic = cfg.probe_mode == "quasistatic"
    if quasistatic:
        base_f = recorder.atom_norms[0][0]
        base_h = recorder.atom_norms[0][1]
    else:
        base_f = recorder.atom_norms[0][0] + recorder.light_norms[0][0]
        base_h = recorder.atom_norms[0][1] + recorder.light_norms[0][1]
    for j, t in enumerate(recorder.times):
        tal = recorder.tallies[j]
        quad_atom = recorder.atom_quads[j]
        _, quad_probe, g2_probe = running[j]
        leak_f, leak_h = recorder.leaks[j]
        atom_f, atom_h = recorder.atom_norms[j]
        light_f, light_h = recorder.light_norms[j]
        pair_f = atom_f + light_f
        pair_h = atom_h + light_h
        # photons emitted by the beam mode: on-grid light plus what left
        photons_emitted = moments.n_a * (light_f + leak_f)
        rows.append(
            ObservableRow(
                t=t,
                beam_atoms=tal.beam_atoms,
                probe_photons=tal.probe_photons,
                condensate_atoms=tal.condensate_atoms,
                v_plus_atom=quad_atom.v_plus,
                v_minus_atom=quad_atom.v_minus,
                v_plus_probe=quad_probe.v_plus,
                v_minus_probe=quad_probe.v_minus,
                g2_atom=recorder.g2_atoms[j],
                g2_probe=g2_probe,
                atoms_incoupled=tal.condensate_atoms - cond0,
                photons_emitted=photons_emitted,
                detector_flux=recorder.detector_flux[j],
                pair_norm_f=pair_f,
                pair_norm_h=pair_h,
                light_leak_f=leak_f,
                light_leak_h=leak_h,
                conservation_error_f=abs(
                    (atom_f if quasistatic else pair_f) + leak_f - base_f
                ),
                conservation_error_h=abs(
                    (atom_h if quasistatic else pair_h) + leak_h - base_h
                ),
            )
        )
    return rows


def _build_summary(
    cfg: RunConfig,
    derived: DerivedQuantities,
    moments: InputMoments,
    recorder: _Recorder,
    rows: list,
    result: RunResult,
) -> RunSummary:
    first, last = rows[0], rows[-1]
    quad_in = aligned_quadrature(1.0, 0.0, moments)
    quad_probe = recorder.stream.quadratures(moments)
    peak_idx = int(np.argmax([r.detector_flux for r in rows]))
    max_cons = max(
        max(r.conservation_error_f for r in rows),
        max(r.conservation_error_h for r in rows),
    )
    loss = None
    v_plus_loss = None
    v_minus_loss = None
    if derived.gamma_sp is not None and len(recorder.times) >= 2:
        loss = spontaneous_loss(
            recorder.times,
            recorder.chi_overlap,
            cfg.model_params(),
            derived,
        )
        v_plus_loss = apply_beam_splitter_loss(quad_probe.v_plus, loss.eta_integral)
        v_minus_loss = apply_beam_splitter_loss(quad_probe.v_minus, loss.eta_integral)
    return RunSummary(
        scenario=cfg.scenario,
        probe_mode=cfg.probe_mode,
        backend=accel.backend_name(),
        n_steps=result.n_steps,
        dt=cfg.dt,
        duration=result.n_steps * cfg.dt,
        grid_points=cfg.n_points,
        wall_time=result.wall_time,
        beam_atoms_initial=first.beam_atoms,
        beam_atoms_final=last.beam_atoms,
        atoms_incoupled=last.atoms_incoupled,
        photons_emitted=last.photons_emitted,
        photons_captured=recorder.stream.photons_captured() * moments.n_a,
        input_v_plus=quad_in.v_plus,
        input_v_minus=quad_in.v_minus,
        atom_v_plus=last.v_plus_atom,
        atom_v_minus=last.v_minus_atom,
        probe_v_plus=quad_probe.v_plus,
        probe_v_minus=quad_probe.v_minus,
        probe_uncertainty_product=quad_probe.uncertainty_product,
        probe_g2=recorder.stream.g2(moments),
        atom_g2_initial=first.g2_atom,
        peak_probe_time=rows[peak_idx].t,
        peak_detector_flux=rows[peak_idx].detector_flux,
        max_conservation_error=max_cons,
        loss=loss,
        probe_v_plus_after_loss=v_plus_loss,
        probe_v_minus_after_loss=v_minus_loss,
    )


def write_timeseries(path: str | Path, rows: list) -> None:
    """Write the per-record time series as CSV."""
    lines = [",".join(TIMESERIES_COLUMNS)]
    for row in rows:
        lines.append(",".join(f"{v:.10g}" for v in row.values()))
    Path(path).write_text("\n".join(lines) + "\n")


SNAPSHOT_COLUMNS = (
    "x",
    "beam_density",
    "probe_density",
    "condensate_density",
    "coupling",
    "g2_beam",
    "g2_probe",
)


def write_snapshot(path: str | Path, data: dict) -> None:
    """Write one spatial snapshot as CSV."""
    cols = [np.asarray(data[c]) for c in SNAPSHOT_COLUMNS]
    lines = [",".join(SNAPSHOT_COLUMNS)]
    for j in range(cols[0].size):
        lines.append(",".join(f"{col[j]:.10g}" for col in cols))
    Path(path).write_text("\n".join(lines) + "\n")
