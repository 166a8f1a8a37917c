"""Schmidt analysis of the two-rotor wavefunction.

The coefficient vector c_{l m l' m'} scatters into the matrix
C[(l,m), (l',m')]; the Schmidt weights are the squared singular values
of C, identical to the eigenvalues of the reduced density matrix
rho_mol1 = C C^dagger. The von Neumann entropy is -sum(lam log lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidConfigError, NumericalError
from .propagation import WaveFunction

# weights below this are rounding noise and are dropped before the log
_CLIP = 1e-15

LOG_BASES = ("e", "2", "d_single")


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt weights lambda_k, descending, at one instant."""

    eigenvalues: np.ndarray
    t: float


@dataclass(frozen=True)
class EntanglementRecord:
    t: float
    entropy: float
    schmidt_rank_eps: int
    norm: float


def coefficient_matrix(psi: WaveFunction) -> np.ndarray:
    """Scatter the coefficient vector into the d_single x d_single matrix C."""
    basis = psi.basis
    d = basis.d_single
    c = np.zeros((d, d), dtype=np.complex128)
    c[basis.mol1_single, basis.mol2_single] = psi.coeffs
    return c


def reduced_density_mol1(psi: WaveFunction) -> np.ndarray:
    """rho_mol1 = C C^dagger; trace equals the squared norm of psi."""
    c = coefficient_matrix(psi)
    return c @ c.conj().T


def schmidt_spectrum(psi: WaveFunction) -> SchmidtSpectrum:
    """Schmidt weights via SVD of C (better behaved for tiny weights
    than the eigensolve of C C^dagger, which tests keep as the oracle)."""
    c = coefficient_matrix(psi)
    try:
        singulars = np.linalg.svd(c, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD of the coefficient matrix failed: {exc}") from exc
    return SchmidtSpectrum(eigenvalues=singulars * singulars, t=psi.t)


def schmidt_rank(spectrum: SchmidtSpectrum, eps: float = 1e-12) -> int:
    return int(np.count_nonzero(spectrum.eigenvalues > eps))


def von_neumann_entropy(spectrum: SchmidtSpectrum, log_base: str = "e") -> float:
    """-sum(lam log lam) with 0 log 0 = 0, in the chosen log base."""
    if log_base not in LOG_BASES:
        raise InvalidConfigError(f"log_base must be one of {LOG_BASES}, got {log_base!r}")
    lam = spectrum.eigenvalues
    lam = lam[lam > _CLIP]
    if lam.size == 0:
        return 0.0
    entropy = float(-(lam * np.log(lam)).sum())
    if log_base == "2":
        entropy /= math.log(2.0)
    elif log_base == "d_single":
        d = spectrum.eigenvalues.size
        if d > 1:
            entropy /= math.log(d)
    return entropy


def analyze(psi: WaveFunction, log_base: str = "e", eps: float = 1e-12) -> EntanglementRecord:
    spectrum = schmidt_spectrum(psi)
    return EntanglementRecord(
        t=psi.t,
        entropy=von_neumann_entropy(spectrum, log_base),
        schmidt_rank_eps=schmidt_rank(spectrum, eps),
        norm=psi.norm(),
    )
