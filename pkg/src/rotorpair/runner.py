"""Orchestration of a single run: build operators from a RunConfig,
propagate, and (optionally) write the CSV artifact."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angular import TwoRotorBasis
from .config import RunConfig, validate_config
from .exceptions import NumericalError, StepSizeError
from .observables import TimeSeriesRecorder
from .operators import HamiltonianPieces, PulseSchedule, build_pieces
from .propagation import IntegratorConfig, Trajectory, default_total_time_ps, run_schedule
from .units import ReducedParameters, time_unit_seconds, to_reduced

CSV_NAME = "timeseries.csv"
CONFIG_ECHO_NAME = "run_config.json"


@dataclass
class RunResult:
    config: RunConfig
    reduced: ReducedParameters
    time_unit_ps: float
    basis: TwoRotorBasis
    pieces: HamiltonianPieces
    schedule: PulseSchedule
    recorder: TimeSeriesRecorder
    trajectory: Trajectory
    total_time_ps: float
    csv_path: Path | None = None


def _prepare(cfg: RunConfig):
    validate_config(cfg)
    reduced = to_reduced(cfg.to_setup())
    time_unit_ps = time_unit_seconds(cfg.molecule.B_cm1) * 1e12
    basis = TwoRotorBasis(cfg.basis.l_max, cfg.basis.restrict_total_m)
    pieces = build_pieces(basis, reduced.dipole_strength)
    schedule = PulseSchedule(
        kick_strength=reduced.kick_strength,
        sigma_red=reduced.sigma_red,
        t0_red=reduced.t0_red,
        carrier_omega=reduced.carrier_omega,
        period_red=reduced.period_red,
        count=cfg.pulse.count,
    )
    total_ps = cfg.output.total_time_ps
    if total_ps is None:
        total_ps = default_total_time_ps(cfg.pulse.count, reduced.period_red, time_unit_ps)
    n_samples = int(np.floor(total_ps / cfg.output.sample_interval_ps)) + 1
    sample_ps = np.arange(n_samples) * cfg.output.sample_interval_ps
    samples_red = sample_ps / time_unit_ps
    dt_pulse = None
    if cfg.integrator.dt_pulse_fs is not None:
        dt_pulse = cfg.integrator.dt_pulse_fs * 1e-15 / time_unit_seconds(cfg.molecule.B_cm1)
    integrator = IntegratorConfig(dt_pulse=dt_pulse, norm_tolerance=cfg.integrator.norm_tolerance)
    recorder = TimeSeriesRecorder(
        basis,
        cfg.output.watch_populations,
        entropy_log_base=cfg.output.entropy_log_base,
        sample_interval_ps=cfg.output.sample_interval_ps,
    )
    return reduced, time_unit_ps, basis, pieces, schedule, integrator, samples_red, recorder, total_ps


def simulate(cfg: RunConfig) -> RunResult:
    """Run in memory; raises on numerical failure."""
    (reduced, time_unit_ps, basis, pieces, schedule,
     integrator, samples_red, recorder, total_ps) = _prepare(cfg)
    trajectory = run_schedule(pieces, schedule, integrator, samples_red, observers=(recorder,))
    return RunResult(
        config=cfg,
        reduced=reduced,
        time_unit_ps=time_unit_ps,
        basis=basis,
        pieces=pieces,
        schedule=schedule,
        recorder=recorder,
        trajectory=trajectory,
        total_time_ps=total_ps,
    )


def run_config(cfg: RunConfig, out_dir=None) -> RunResult:
    """Run and write artifacts; on failure keep a partial CSV with a marker."""
    from .output import write_timeseries_csv  # local import keeps module load light

    (reduced, time_unit_ps, basis, pieces, schedule,
     integrator, samples_red, recorder, total_ps) = _prepare(cfg)
    target = Path(out_dir if out_dir is not None else (cfg.output.out_dir or "sim_out"))
    target.mkdir(parents=True, exist_ok=True)
    csv_path = target / CSV_NAME
    try:
        trajectory = run_schedule(pieces, schedule, integrator, samples_red, observers=(recorder,))
    except (StepSizeError, NumericalError) as exc:
        write_timeseries_csv(csv_path, recorder.watch, recorder.samples, failure_message=str(exc))
        raise
    write_timeseries_csv(csv_path, recorder.watch, recorder.samples)
    echo = cfg.to_json_dict()
    echo["output"]["out_dir"] = str(target)
    with open(target / CONFIG_ECHO_NAME, "w", encoding="utf-8", newline="") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return RunResult(
        config=cfg,
        reduced=reduced,
        time_unit_ps=time_unit_ps,
        basis=basis,
        pieces=pieces,
        schedule=schedule,
        recorder=recorder,
        trajectory=trajectory,
        total_time_ps=total_ps,
        csv_path=csv_path,
    )
