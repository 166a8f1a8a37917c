import math

import numpy as np
import pytest

from rotorpair.angular import TwoRotorBasis
from rotorpair.exceptions import ConsistencyError, InvalidConfigError, StepSizeError
from rotorpair.operators import PulseSchedule, build_costheta_single, build_pieces
from rotorpair.propagation import (
    FreeEvolution,
    IntegratorConfig,
    WaveFunction,
    default_total_time_ps,
    evolve_free,
    evolve_pulse_window,
    initial_state,
    pulse_windows,
    rk4_integrate,
    run_schedule,
)

# reduced parameters of the default molecule pair, rounded is fine here:
# these tests probe the integrator, not the unit conversion
KICK = 386.21612373411443
SIGMA = 0.006306465451214133
T0 = 0.027124582585867238
OMEGA = 249.9999998468202


def _single_pulse(kick=KICK):
    return PulseSchedule(kick_strength=kick, sigma_red=SIGMA, t0_red=T0, carrier_omega=OMEGA)


# --- wavefunction and config -------------------------------------------------

def test_wavefunction_norm_and_copy():
    basis = TwoRotorBasis(1, 0)
    psi = initial_state(basis)
    assert psi.norm() == 1.0
    assert psi.t == 0.0
    clone = psi.copy()
    clone.coeffs[0] = 0.0
    assert psi.coeffs[basis.index_of(0, 0, 0, 0)] == 1.0


def test_initial_state_needs_the_ground_state():
    with pytest.raises(InvalidConfigError):
        initial_state(TwoRotorBasis(1, 1))


def test_integrator_config_defaults_and_validation():
    cfg = IntegratorConfig()
    assert cfg.dt_pulse is None
    assert cfg.window_halfwidth == 5.0
    assert cfg.norm_tolerance == 1e-8
    assert cfg.step_for(_single_pulse()) == pytest.approx(SIGMA / 400.0)
    assert IntegratorConfig(dt_pulse=1e-4).step_for(_single_pulse()) == 1e-4
    with pytest.raises(InvalidConfigError):
        IntegratorConfig(dt_pulse=0.0)
    with pytest.raises(InvalidConfigError):
        IntegratorConfig(window_halfwidth=2.0)
    with pytest.raises(InvalidConfigError):
        IntegratorConfig(norm_tolerance=0.0)
    with pytest.raises(InvalidConfigError):
        IntegratorConfig(method="euler")


# --- free evolution ----------------------------------------------------------

def test_free_evolution_applies_the_energy_phase():
    basis = TwoRotorBasis(1, 0)
    pieces = build_pieces(basis, 0.0)
    psi = WaveFunction(basis, np.zeros(basis.size, dtype=complex))
    k = basis.index_of(1, 0, 1, 0)
    psi.coeffs[k] = 1.0
    tau = 0.37
    out = evolve_free(psi, tau, pieces.h0_operator)
    # E = l1(l1+1) + l2(l2+1) = 4
    assert out.coeffs[k] == pytest.approx(np.exp(-1j * 4.0 * tau), rel=1e-12)
    assert abs(out.coeffs[basis.index_of(0, 0, 0, 0)]) < 1e-15
    assert out.t == pytest.approx(tau)


def test_free_evolution_beats_at_the_level_splitting():
    # (|00> + |10>)/sqrt(2) on molecule 1: <cos th1>(t) = cos(2t)/sqrt(3)
    basis = TwoRotorBasis(1, None)
    pieces = build_pieces(basis, 0.0)
    cos1 = build_costheta_single(basis, "mol1")
    psi = WaveFunction(basis, np.zeros(basis.size, dtype=complex))
    psi.coeffs[basis.index_of(0, 0, 0, 0)] = 1.0 / math.sqrt(2.0)
    psi.coeffs[basis.index_of(1, 0, 0, 0)] = 1.0 / math.sqrt(2.0)
    for tau in (0.0, 0.3, 1.1):
        out = evolve_free(psi, tau, pieces.h0_operator)
        expected = math.cos(2.0 * tau) / math.sqrt(3.0)
        assert cos1.expectation(out.coeffs).real == pytest.approx(expected, abs=1e-12)


def test_evolve_free_argument_checks():
    basis = TwoRotorBasis(1, 0)
    pieces = build_pieces(basis, 0.0)
    psi = initial_state(basis)
    with pytest.raises(ValueError):
        evolve_free(psi, -0.1, pieces.h0_operator)
    other = build_pieces(TwoRotorBasis(2, 0), 0.0)
    with pytest.raises(ConsistencyError):
        evolve_free(psi, 0.1, other.h0_operator)


def test_free_evolution_reuse_matches_fresh_construction():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.5)
    free = FreeEvolution(pieces.h0_operator)
    psi = initial_state(basis)
    a = evolve_free(psi, 0.8, pieces.h0_operator)
    b = evolve_free(psi, 0.8, pieces.h0_operator, free=free)
    assert np.allclose(a.coeffs, b.coeffs, atol=1e-15)


# --- RK4 ---------------------------------------------------------------------

def test_rk4_scalar_convergence_is_fourth_order():
    lam = -1.0

    def deriv(t, y):
        return lam * y

    y0 = np.array([1.0 + 0.0j])
    exact = math.exp(-2.0)
    err = []
    for dt in (0.1, 0.05):
        y = rk4_integrate(deriv, y0, 0.0, 2.0, dt)
        err.append(abs(y[0] - exact))
    assert 12.0 < err[0] / err[1] < 20.0


def test_rk4_partial_final_step_lands_on_t1():
    def deriv(t, y):
        return np.array([2.0 * t])

    # 0.37 is not a multiple of 0.1: a 0.07 closing step is needed
    y = rk4_integrate(deriv, np.array([0.0]), 0.0, 0.37, 0.1)
    assert y[0] == pytest.approx(0.37**2, rel=1e-12)


def test_rk4_rejects_bad_spans():
    deriv = lambda t, y: y
    with pytest.raises(ValueError):
        rk4_integrate(deriv, np.array([1.0]), 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        rk4_integrate(deriv, np.array([1.0]), 1.0, 0.0, 0.1)


def test_rk4_exact_step_count_adds_no_extra_step():
    calls = []

    def deriv(t, y):
        calls.append(t)
        return np.zeros_like(y)

    rk4_integrate(deriv, np.array([0.0]), 0.0, 0.5, 0.1)
    # 5 full steps, 4 calls each, no closing fragment
    assert len(calls) == 20


# --- windowed pulse integration ----------------------------------------------

def test_window_with_zero_kick_matches_free_evolution():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.5)
    pulse = _single_pulse(kick=0.0)
    psi = initial_state(basis)
    stepped = evolve_pulse_window(psi, (0.0, 0.2), pieces, pulse,
                                  IntegratorConfig(dt_pulse=2e-4))
    free = evolve_free(psi, 0.2, pieces.h0_operator)
    assert np.abs(stepped.coeffs - free.coeffs).max() < 1e-10


def test_window_requires_matching_start_time():
    basis = TwoRotorBasis(1, 0)
    pieces = build_pieces(basis, 0.0)
    psi = initial_state(basis)
    with pytest.raises(ConsistencyError):
        evolve_pulse_window(psi, (0.1, 0.2), pieces, _single_pulse())
    with pytest.raises(ValueError):
        evolve_pulse_window(psi, (0.0, 0.0), pieces, _single_pulse())


def test_window_step_halving_is_fourth_order():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.13150852670024232)
    pulse = _single_pulse()
    psi0 = initial_state(basis)
    t_b = T0 + 5.0 * SIGMA

    def integrate(dt):
        from rotorpair.propagation import _schrodinger_deriv
        return rk4_integrate(_schrodinger_deriv(pieces, pulse), psi0.coeffs, 0.0, t_b, dt)

    ref = integrate(SIGMA / 160.0)
    err_coarse = np.abs(integrate(SIGMA / 10.0) - ref).max()
    err_fine = np.abs(integrate(SIGMA / 20.0) - ref).max()
    assert err_coarse > err_fine > 0.0
    assert 10.0 < err_coarse / err_fine < 25.0


def test_window_integration_is_time_reversible():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.13150852670024232)
    pulse = _single_pulse()
    cfg = IntegratorConfig()
    psi0 = initial_state(basis)
    t_b = T0 + 5.0 * SIGMA
    forward = evolve_pulse_window(psi0, (0.0, t_b), pieces, pulse, cfg)

    h0 = pieces.h0
    coupling = pieces.coupling.matrix

    def reversed_deriv(s, g):
        t = t_b - s
        return 1j * (h0 @ g + pulse.field_scalar(t) * (coupling @ g))

    back = rk4_integrate(reversed_deriv, forward.coeffs, 0.0, t_b, cfg.step_for(pulse))
    assert np.abs(back - psi0.coeffs).max() < 1e-6


def test_window_raises_on_norm_drift():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.13150852670024232)
    pulse = _single_pulse()
    psi0 = initial_state(basis)
    with pytest.raises(StepSizeError):
        evolve_pulse_window(psi0, (0.0, T0 + 5 * SIGMA), pieces, pulse,
                            IntegratorConfig(dt_pulse=0.02))


# --- window placement ----------------------------------------------------------

def test_pulse_windows_zero_kick_has_none():
    assert pulse_windows(_single_pulse(kick=0.0), 5.0, 10.0) == []


def test_pulse_windows_single_pulse_clipped_at_zero():
    w = pulse_windows(_single_pulse(), 5.0, 10.0)
    assert len(w) == 1
    a, b = w[0]
    assert a == 0.0  # t0 < 5 sigma, so the left edge clips
    assert b == pytest.approx(T0 + 5.0 * SIGMA)


def test_pulse_windows_merge_overlapping_pulses():
    pulse = PulseSchedule(kick_strength=1.0, sigma_red=0.1, t0_red=0.5,
                          carrier_omega=1.0, period_red=0.3, count=3)
    # 5 sigma = 0.5 > period, so all three windows fuse into one
    w = pulse_windows(pulse, 5.0, 10.0)
    assert len(w) == 1
    assert w[0] == (0.0, pytest.approx(0.5 + 2 * 0.3 + 0.5))


def test_pulse_windows_clip_and_drop_beyond_t_end():
    pulse = PulseSchedule(kick_strength=1.0, sigma_red=0.01, t0_red=1.0,
                          carrier_omega=1.0, period_red=2.0, count=3)
    w = pulse_windows(pulse, 5.0, 3.5)
    assert len(w) == 2
    assert w[1] == (pytest.approx(2.95), pytest.approx(3.05))
    # the center at t = 5 lies wholly past t_end and is dropped
    assert all(b <= 3.5 for _, b in w)


# --- full schedule -----------------------------------------------------------

def test_run_schedule_validates_samples():
    basis = TwoRotorBasis(1, 0)
    pieces = build_pieces(basis, 0.0)
    pulse = _single_pulse(kick=0.0)
    cfg = IntegratorConfig()
    with pytest.raises(InvalidConfigError):
        run_schedule(pieces, pulse, cfg, np.array([]))
    with pytest.raises(InvalidConfigError):
        run_schedule(pieces, pulse, cfg, np.array([0.5, 1.0]))
    with pytest.raises(InvalidConfigError):
        run_schedule(pieces, pulse, cfg, np.array([0.0, 1.0, 1.0]))


def test_run_schedule_rejects_mismatched_initial_state():
    basis = TwoRotorBasis(1, 0)
    pieces = build_pieces(basis, 0.0)
    pulse = _single_pulse(kick=0.0)
    psi = initial_state(TwoRotorBasis(2, 0))
    with pytest.raises(ConsistencyError):
        run_schedule(pieces, pulse, IntegratorConfig(), np.array([0.0, 1.0]), psi0=psi)
    late = initial_state(basis)
    late.t = 0.5
    with pytest.raises(ConsistencyError):
        run_schedule(pieces, pulse, IntegratorConfig(), np.array([0.0, 1.0]), psi0=late)


def test_run_schedule_without_field_is_pure_free_evolution():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.5)
    pulse = _single_pulse(kick=0.0)
    samples = np.array([0.0, 0.5, 1.3])
    traj = run_schedule(pieces, pulse, IntegratorConfig(), samples)
    assert traj.windows == []
    assert np.allclose(traj.norms, 1.0, atol=1e-12)
    assert np.ptp(traj.h0_expect) < 1e-12
    free = evolve_free(initial_state(basis), 1.3, pieces.h0_operator)
    assert np.abs(traj.psi_final.coeffs - free.coeffs).max() < 1e-12


def test_run_schedule_matches_a_hand_composed_run():
    # free to the window edge, RK4 across it, free to the end
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.13150852670024232)
    pulse = _single_pulse()
    cfg = IntegratorConfig()
    t_end = 0.5
    samples = np.array([0.0, 0.25, t_end])  # no sample inside the window
    traj = run_schedule(pieces, pulse, cfg, samples)
    assert len(traj.windows) == 1
    a, b = traj.windows[0]

    psi = initial_state(basis)
    psi = evolve_free(psi, a - 0.0, pieces.h0_operator) if a > 0 else psi
    psi = evolve_pulse_window(psi, (a, b), pieces, pulse, cfg)
    psi = evolve_free(psi, t_end - b, pieces.h0_operator)
    assert np.abs(traj.psi_final.coeffs - psi.coeffs).max() < 1e-9
    assert traj.max_norm_drift < 1e-9
    assert np.allclose(traj.pulse_centers, [T0])


def test_run_schedule_records_the_violating_sample_then_raises():
    basis = TwoRotorBasis(2, 0)
    pieces = build_pieces(basis, 0.13150852670024232)
    pulse = _single_pulse()
    cfg = IntegratorConfig(dt_pulse=0.02)  # far too coarse for the carrier
    seen = []
    with pytest.raises(StepSizeError):
        run_schedule(pieces, pulse, cfg, np.array([0.0, 0.5, 1.0]),
                     observers=(lambda t, k, c: seen.append((k, float(np.linalg.norm(c)))),))
    assert [k for k, _ in seen] == [0, 1]
    assert abs(seen[-1][1] - 1.0) > 1e-8


# --- run-length default ---------------------------------------------------------

def test_default_total_time():
    assert default_total_time_ps(1, 0.0, 44.24) == 400.0
    two = default_total_time_ps(2, 1.0, 44.24)
    assert two == pytest.approx(2 * 44.24 + 100.0)
    train = default_total_time_ps(20, math.pi, 44.240312130194325)
    assert train == pytest.approx(20 * math.pi * 44.240312130194325 + 100.0)
