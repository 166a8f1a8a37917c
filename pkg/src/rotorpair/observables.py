"""Measured quantities: orientation, populations, rotational energy,
and regularity diagnostics for pulse-train runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import entanglement
from .angular import TwoRotorBasis
from .exceptions import QueryError
from .operators import OperatorMatrix, build_costheta_single
from .propagation import WaveFunction

# Lags below half the orientation revival period (pi in reduced time)
# are excluded from the autocorrelation peak search by default.
DEFAULT_MIN_LAG_RED = math.pi / 2.0


@dataclass(frozen=True)
class TimeSeriesSample:
    """One sampled instant; populations follow the recorder's watch list."""

    index: int
    t_red: float
    t_ps: float
    cos1: float
    cos2: float
    entropy: float
    norm: float
    energy_rot: float
    populations: tuple[float, ...]


@dataclass(frozen=True)
class RegularityMetrics:
    autocorr_peak: float
    spectral_entropy: float
    energy_growth_rate: float


def orientation(psi: WaveFunction, which: str, operator: OperatorMatrix | None = None) -> float:
    """<cos theta> of one molecule; pass a prebuilt operator in hot loops."""
    if operator is None:
        operator = build_costheta_single(psi.basis, which)
    return operator.expectation(psi.coeffs).real


def population(psi: WaveFunction, l1: int, m1: int, l2: int, m2: int) -> float:
    """|c_{l1 m1 l2 m2}|^2; raises QueryError outside the basis."""
    idx = psi.basis.index_of(l1, m1, l2, m2)
    return float(abs(psi.coeffs[idx]) ** 2)


def rotational_energy(psi: WaveFunction) -> float:
    """<L1^2 + L2^2> in units of B."""
    return float((np.abs(psi.coeffs) ** 2 @ psi.basis.rotor_diagonal))


class TimeSeriesRecorder:
    """Observer that turns sampled coefficient vectors into TimeSeriesSamples."""

    def __init__(self, basis: TwoRotorBasis, watch: tuple[tuple[int, int, int, int], ...],
                 entropy_log_base: str = "e", sample_interval_ps: float = 0.5):
        self.basis = basis
        self.watch = tuple(tuple(int(q) for q in entry) for entry in watch)
        # fail on an out-of-basis watch entry up front, not at sample time
        self._watch_idx = np.asarray([basis.index_of(*entry) for entry in self.watch], dtype=np.intp)
        self.entropy_log_base = entropy_log_base
        self.sample_interval_ps = sample_interval_ps
        self._cos1 = build_costheta_single(basis, "mol1")
        self._cos2 = build_costheta_single(basis, "mol2")
        self.samples: list[TimeSeriesSample] = []

    def __call__(self, t_red: float, index: int, coeffs: np.ndarray) -> None:
        psi = WaveFunction(self.basis, coeffs, t_red)
        record = entanglement.analyze(psi, self.entropy_log_base)
        pops = np.abs(coeffs[self._watch_idx]) ** 2
        self.samples.append(TimeSeriesSample(
            index=index,
            t_red=t_red,
            t_ps=index * self.sample_interval_ps,
            cos1=orientation(psi, "mol1", self._cos1),
            cos2=orientation(psi, "mol2", self._cos2),
            entropy=record.entropy,
            norm=record.norm,
            energy_rot=rotational_energy(psi),
            populations=tuple(float(p) for p in pops),
        ))

    def column(self, name: str) -> np.ndarray:
        return np.asarray([getattr(s, name) for s in self.samples])

    def population_column(self, entry: tuple[int, int, int, int]) -> np.ndarray:
        k = self.watch.index(tuple(entry))
        return np.asarray([s.populations[k] for s in self.samples])


def _autocorr_peak(x: np.ndarray, k_min: int, k_max: int) -> float:
    x = x - x.mean()
    n = x.size
    denom = float(x @ x) / n
    if denom == 0.0:
        return 0.0
    best = -np.inf
    for k in range(k_min, k_max + 1):
        r = float(x[: n - k] @ x[k:]) / (n - k) / denom
        best = max(best, r)
    return best


def _spectral_entropy(x: np.ndarray) -> float:
    power = np.abs(np.fft.rfft(x - x.mean())) ** 2
    power = power[1:]  # DC carries no structure after demeaning
    total = power.sum()
    if total <= 0.0:
        return 0.0
    p = power[power > 0] / total
    return float(-(p * np.log(p)).sum())


def _energy_growth_rate(t: np.ndarray, energy: np.ndarray, centers: np.ndarray) -> float:
    if centers.size < 2:
        return 0.0
    per_pulse = []
    for k in range(centers.size):
        if k + 1 < centers.size:
            before = np.nonzero(t < centers[k + 1])[0]
            if before.size == 0:
                raise QueryError("no sample falls before the next pulse center")
            per_pulse.append(energy[before[-1]])
        else:
            per_pulse.append(energy[-1])
    ks = np.arange(centers.size, dtype=float)
    slope, _ = np.polyfit(ks, np.asarray(per_pulse), 1)
    return float(slope)


def regularity_metrics(t_red: np.ndarray, cos_series: np.ndarray,
                       energy_series: np.ndarray, pulse_centers: np.ndarray,
                       min_lag_red: float = DEFAULT_MIN_LAG_RED) -> RegularityMetrics:
    """Quantify how regular a pulse-train orientation trace is.

    autocorr_peak: maximum unbiased-normalized autocorrelation of the
    orientation over lags from min_lag_red up to half the series.
    spectral_entropy: Shannon entropy (nats) of the normalized power
    spectrum, DC excluded.
    energy_growth_rate: least-squares slope of <L^2> after each pulse
    versus pulse index.
    """
    t = np.asarray(t_red, dtype=float)
    x = np.asarray(cos_series, dtype=float)
    e = np.asarray(energy_series, dtype=float)
    if t.size != x.size or t.size != e.size:
        raise QueryError("time, orientation, and energy series must share a length")
    if t.size < 64:
        raise QueryError(f"series too short for regularity metrics: {t.size} < 64")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise QueryError("series must be uniformly sampled")
    dt = float(steps[0])
    k_min = max(1, int(math.ceil(min_lag_red / dt - 1e-9)))
    k_max = t.size // 2
    if k_min > k_max:
        raise QueryError(
            f"series too short: min lag {min_lag_red} needs more than {t.size} samples at dt = {dt}"
        )
    return RegularityMetrics(
        autocorr_peak=_autocorr_peak(x, k_min, k_max),
        spectral_entropy=_spectral_entropy(x),
        energy_growth_rate=_energy_growth_rate(t, e, np.asarray(pulse_centers, dtype=float)),
    )
