"""Time propagation of i dc/dt = H(t) c.

Between pulses the state advances by the exact exponential of the
field-free Hamiltonian (one eigendecomposition per run). Inside a
window of +-window_halfwidth sigma around each pulse center the state
is stepped with classical fixed-step RK4. The norm is monitored and a
violation raises; nothing is ever silently renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .angular import TwoRotorBasis
from .exceptions import ConsistencyError, InvalidConfigError, NumericalError, StepSizeError
from .operators import HamiltonianPieces, OperatorMatrix, PulseSchedule


@dataclass
class WaveFunction:
    basis: TwoRotorBasis
    coeffs: np.ndarray
    t: float = 0.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.basis, self.coeffs.copy(), self.t)


@dataclass(frozen=True)
class IntegratorConfig:
    """Stepping parameters for the windowed RK4 segments.

    dt_pulse = None picks sigma_red / 400, which resolves both the
    envelope and the carrier with fourth-order headroom.
    """

    dt_pulse: float | None = None
    window_halfwidth: float = 5.0
    norm_tolerance: float = 1e-8
    method: str = "rk4"

    def __post_init__(self) -> None:
        if self.dt_pulse is not None and not self.dt_pulse > 0:
            raise InvalidConfigError(f"dt_pulse must be positive, got {self.dt_pulse}")
        if self.window_halfwidth < 3:
            raise InvalidConfigError(f"window_halfwidth must be at least 3, got {self.window_halfwidth}")
        if not self.norm_tolerance > 0:
            raise InvalidConfigError(f"norm_tolerance must be positive, got {self.norm_tolerance}")
        if self.method != "rk4":
            raise InvalidConfigError(f"unknown integration method {self.method!r}")

    def step_for(self, pulse: PulseSchedule) -> float:
        return self.dt_pulse if self.dt_pulse is not None else pulse.sigma_red / 400.0


@dataclass
class Trajectory:
    """Sampled run: times, norms, field-free energy, and the final state."""

    t_red: np.ndarray
    norms: np.ndarray
    h0_expect: np.ndarray
    psi_final: WaveFunction
    windows: list[tuple[float, float]]
    pulse_centers: np.ndarray
    max_norm_drift: float


def initial_state(basis: TwoRotorBasis) -> WaveFunction:
    """Both molecules in the rotational ground state, c_0000 = 1."""
    if not basis.contains(0, 0, 0, 0):
        raise InvalidConfigError("basis does not contain the (0,0;0,0) ground state")
    coeffs = np.zeros(basis.size, dtype=np.complex128)
    coeffs[basis.index_of(0, 0, 0, 0)] = 1.0
    return WaveFunction(basis, coeffs, t=0.0)


class FreeEvolution:
    """exp(-i H0 tau) through one eigendecomposition of H0."""

    def __init__(self, h0: OperatorMatrix):
        try:
            self.energies, self.vectors = np.linalg.eigh(h0.matrix.toarray())
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigendecomposition of H0 (dim {h0.dim}) failed: {exc}") from exc

    def advance(self, coeffs: np.ndarray, duration: float) -> np.ndarray:
        amplitudes = self.vectors.conj().T @ coeffs
        amplitudes *= np.exp(-1j * self.energies * duration)
        return self.vectors @ amplitudes


def evolve_free(psi: WaveFunction, duration: float, h0: OperatorMatrix,
                free: FreeEvolution | None = None) -> WaveFunction:
    """Advance psi by the field-free propagator over the given duration."""
    if duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration}")
    if h0.dim != psi.coeffs.shape[0]:
        raise ConsistencyError(f"H0 dimension {h0.dim} does not match state size {psi.coeffs.shape[0]}")
    if free is None:
        free = FreeEvolution(h0)
    return WaveFunction(psi.basis, free.advance(psi.coeffs, duration), psi.t + duration)


def rk4_integrate(deriv, y: np.ndarray, t0: float, t1: float, dt: float) -> np.ndarray:
    """Classical RK4 with fixed step dt and one partial final step."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    span = t1 - t0
    if span < 0:
        raise ValueError(f"t1 must not precede t0, got span {span}")
    n_full = int(np.floor(span / dt + 1e-12))
    for k in range(n_full):
        y = _rk4_step(deriv, y, t0 + k * dt, dt)
    t_last = t0 + n_full * dt
    remainder = t1 - t_last
    if remainder > 1e-12 * max(abs(t1), 1.0):
        y = _rk4_step(deriv, y, t_last, remainder)
    return y


def _rk4_step(deriv, y, t, h):
    k1 = deriv(t, y)
    k2 = deriv(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = deriv(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = deriv(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _schrodinger_deriv(pieces: HamiltonianPieces, pulse: PulseSchedule):
    h0 = pieces.h0
    coupling = pieces.coupling.matrix

    def deriv(t, c):
        return -1j * (h0 @ c + pulse.field_scalar(t) * (coupling @ c))

    return deriv


def evolve_pulse_window(psi: WaveFunction, window: tuple[float, float],
                        pieces: HamiltonianPieces, pulse: PulseSchedule,
                        cfg: IntegratorConfig = IntegratorConfig()) -> WaveFunction:
    """RK4-step psi across one window; fails loudly on norm drift."""
    t_a, t_b = window
    if abs(psi.t - t_a) > 1e-9:
        raise ConsistencyError(f"window starts at {t_a} but the state is at t = {psi.t}")
    if not t_b > t_a:
        raise ValueError(f"window must have positive length, got {window}")
    coeffs = rk4_integrate(_schrodinger_deriv(pieces, pulse), psi.coeffs, t_a, t_b,
                           cfg.step_for(pulse))
    out = WaveFunction(psi.basis, coeffs, t_b)
    drift = abs(out.norm() - 1.0)
    if drift > cfg.norm_tolerance:
        raise StepSizeError(
            f"norm drifted by {drift:.3e} over window [{t_a:.6g}, {t_b:.6g}]"
            f" (tolerance {cfg.norm_tolerance:.1e}); reduce dt_pulse"
        )
    return out


def pulse_windows(pulse: PulseSchedule, halfwidth: float, t_end: float) -> list[tuple[float, float]]:
    """Merged stepping windows [center - w*sigma, center + w*sigma], clipped to [0, t_end].

    A schedule with kick_strength = 0 contributes no windows at all, so the
    whole run is exact free evolution.
    """
    if pulse.kick_strength == 0.0:
        return []
    w = halfwidth * pulse.sigma_red
    merged: list[list[float]] = []
    for c in pulse.centers():
        a, b = c - w, c + w
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    clipped = []
    for a, b in merged:
        a, b = max(a, 0.0), min(b, t_end)
        if b > a:
            clipped.append((a, b))
    return clipped


def run_schedule(pieces: HamiltonianPieces, pulse: PulseSchedule,
                 cfg: IntegratorConfig, sample_times: np.ndarray,
                 observers=(), psi0: WaveFunction | None = None) -> Trajectory:
    """Alternate exact free evolution and windowed RK4, sampling on the way.

    sample_times must be ascending and start at 0; observers are called as
    observer(t_red, sample_index, coeffs) at every sample.
    """
    samples = np.asarray(sample_times, dtype=float)
    if samples.ndim != 1 or samples.size == 0:
        raise InvalidConfigError("sample_times must be a non-empty 1-d array")
    if samples[0] != 0.0 or np.any(np.diff(samples) <= 0):
        raise InvalidConfigError("sample_times must start at 0 and increase strictly")

    psi = initial_state(pieces.basis) if psi0 is None else psi0
    if psi.coeffs.shape[0] != pieces.basis.size:
        raise ConsistencyError("initial state size does not match the basis")
    if psi0 is not None and psi.t != 0.0:
        raise ConsistencyError(f"initial state must start at t = 0, got {psi.t}")

    t_end = float(samples[-1])
    windows = pulse_windows(pulse, cfg.window_halfwidth, t_end)
    free = FreeEvolution(pieces.h0_operator)
    deriv = _schrodinger_deriv(pieces, pulse)
    dt = cfg.step_for(pulse)
    h0 = pieces.h0

    coeffs = psi.coeffs.copy()
    norms = np.empty(samples.size)
    h0_expect = np.empty(samples.size)
    max_drift = 0.0
    t_now = 0.0

    def advance_to(c: np.ndarray, t_from: float, t_to: float) -> np.ndarray:
        # walk [t_from, t_to], switching integrators at window edges
        cursor = t_from
        for a, b in windows:
            if b <= cursor or a >= t_to:
                continue
            if a > cursor:
                c = free.advance(c, a - cursor)
                cursor = a
            stop = min(b, t_to)
            c = rk4_integrate(deriv, c, cursor, stop, dt)
            cursor = stop
        if t_to > cursor:
            c = free.advance(c, t_to - cursor)
        return c

    for k, t_k in enumerate(samples):
        if t_k > t_now:
            coeffs = advance_to(coeffs, t_now, float(t_k))
            t_now = float(t_k)
        norm_k = float(np.linalg.norm(coeffs))
        norms[k] = norm_k
        h0_expect[k] = float(np.vdot(coeffs, h0 @ coeffs).real)
        drift = abs(norm_k - 1.0)
        max_drift = max(max_drift, drift)
        for observer in observers:
            observer(float(t_k), k, coeffs)
        if drift > cfg.norm_tolerance:
            raise StepSizeError(
                f"norm drifted by {drift:.3e} at t = {t_k:.6g}"
                f" (tolerance {cfg.norm_tolerance:.1e}); reduce dt_pulse"
            )

    psi_final = WaveFunction(pieces.basis, coeffs, t_now)
    return Trajectory(
        t_red=samples,
        norms=norms,
        h0_expect=h0_expect,
        psi_final=psi_final,
        windows=windows,
        pulse_centers=pulse.centers(),
        max_norm_drift=max_drift,
    )


def default_total_time_ps(count: int, period_red: float, time_unit_ps: float) -> float:
    """400 ps for a single pulse; count * T + 100 ps for a train."""
    if count <= 1:
        return 400.0
    return count * period_red * time_unit_ps + 100.0
