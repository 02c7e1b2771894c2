"""Scalar diagnostics: fidelities, target states, entanglement and CHSH violation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidDensityMatrix, NotPSD
from .evolve import TimeGrid
from .hilbert import DensityMatrix, ModeDims, StateVector, partial_trace
from .model import CouplerParams, TruncatedAmplitudes, analytic_amplitudes, truncated_to_full
from .series import TimeSeries

ENTROPY_CLAMP = 1e-10
SQRT_CLAMP = 1e-8

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_S = 1 / math.sqrt(2)


class BellStateId(str, enum.Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    B5 = "B5"
    B6 = "B6"
    P1 = "P1"
    P2 = "P2"


# Each target is {(n, m): amplitude}; all are equal-weight two-term superpositions.
_TARGETS = {
    BellStateId.B1: {(2, 0): _S, (0, 2): 1j * _S},
    BellStateId.B2: {(2, 0): _S, (0, 2): -1j * _S},
    BellStateId.B3: {(2, 0): _S, (1, 2): 1j * _S},
    BellStateId.B4: {(2, 0): _S, (1, 2): -1j * _S},
    BellStateId.B5: {(2, 0): _S, (1, 2): _S},
    BellStateId.B6: {(2, 0): _S, (1, 2): -_S},
    BellStateId.P1: {(1, 2): _S, (0, 2): 1j * _S},
    BellStateId.P2: {(1, 2): _S, (0, 2): -1j * _S},
}


def bell_state(which, dims: ModeDims) -> StateVector:
    which = BellStateId(which)
    if not dims.covers(2, 2):
        raise DimensionError(f"{which.value} needs Fock levels 0..2 in both modes")
    amps = np.zeros(dims.size, dtype=complex)
    for (n, m), c in _TARGETS[which].items():
        amps[dims.index(n, m)] = c
    return StateVector(dims, amps)


def pure_fidelity(psi: StateVector, phi: StateVector, convention: str = "amplitude") -> float:
    """|<psi|phi>| (``amplitude``) or |<psi|phi>|^2 (``probability``)."""
    overlap = abs(psi.inner(phi))
    if convention == "amplitude":
        return overlap
    if convention == "probability":
        return overlap**2
    raise ValueError(f"unknown fidelity convention {convention!r}")


def psd_sqrt(mat: np.ndarray, clamp: float = SQRT_CLAMP) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in [-clamp, 0) are set to zero; anything more negative raises
    NotPSD.
    """
    h = 0.5 * (mat + mat.conj().T)
    w, v = np.linalg.eigh(h)
    if w.size and w[0] < -clamp:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{clamp:.0e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def mixed_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)) (unsquared)."""
    if rho.size != sigma.size or (rho.dims is not None and sigma.dims is not None and rho.dims != sigma.dims):
        raise DimensionError("fidelity between states of different dimension")
    r = psd_sqrt(rho.matrix)
    inner = r @ sigma.matrix @ r
    inner = 0.5 * (inner + inner.conj().T)
    w = np.linalg.eigvalsh(inner)
    if w[0] < -SQRT_CLAMP:
        raise NotPSD(f"eigenvalue {w[0]:.3e} of sqrt(rho) sigma sqrt(rho) below -{SQRT_CLAMP:.0e}")
    return float(min(np.sum(np.sqrt(np.clip(w, 0.0, None))), 1.0))


def probabilities(psi: StateVector, targets: Iterable[tuple[int, int]]) -> np.ndarray:
    return np.array([abs(psi.amplitudes[psi.dims.index(n, m)]) ** 2 for n, m in targets])


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) + 0.0


def schmidt_coefficients(psi: StateVector) -> np.ndarray:
    return np.linalg.svd(psi.coefficients(), compute_uv=False)


def entanglement_entropy(psi: StateVector) -> float:
    """Entropy (ebits) of the squared Schmidt coefficients."""
    return shannon_bits(schmidt_coefficients(psi) ** 2)


def von_neumann_bits(rho: DensityMatrix, clamp: float = ENTROPY_CLAMP) -> float:
    w = rho.eigenvalues()
    if w.size and w[0] < -clamp:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{clamp:.0e}")
    return shannon_bits(np.clip(w, 0.0, None))


def entanglement_entropy_mixed_marginal(rho: DensityMatrix, side: str = "a") -> float:
    return von_neumann_bits(partial_trace(rho, side))


def validate_density(rho: DensityMatrix, tol: float = 1e-8) -> None:
    herm = rho.hermiticity_error()
    if herm > tol:
        raise InvalidDensityMatrix(f"not Hermitian: max|rho - rho^dag| = {herm:.3e}")
    tr = rho.trace()
    if abs(tr - 1) > tol:
        raise InvalidDensityMatrix(f"trace {tr:.12g} differs from 1")
    w = rho.eigenvalues()
    if w[0] < -tol:
        raise InvalidDensityMatrix(f"negative eigenvalue {w[0]:.3e}")


@dataclass(frozen=True)
class CHSHReport:
    t_matrix: np.ndarray
    u_eigenvalues: np.ndarray
    m_value: float
    b_value: float

    @property
    def n_value(self) -> float:
        """max(0, M - 1); equals b_value squared."""
        return max(0.0, self.m_value - 1.0)

    @property
    def violates(self) -> bool:
        return self.m_value > 1.0


def correlation_matrix(rho_qq: np.ndarray) -> np.ndarray:
    """t_nm = tr(rho sigma_n (x) sigma_m), Pauli order (x, y, z)."""
    t = np.empty((3, 3))
    for n, sn in enumerate(PAULI):
        for m, sm in enumerate(PAULI):
            t[n, m] = np.real(np.trace(rho_qq @ np.kron(sn, sm)))
    return t


def chsh_violation(rho_qq: DensityMatrix) -> CHSHReport:
    """Horodecki criterion on a two-qubit state.

    M is the sum of the two largest eigenvalues of T^T T, and
    B = sqrt(max(0, M - 1)) lies in [0, 1] with 1 for maximal violation.
    """
    if rho_qq.size != 4:
        raise DimensionError(f"expected a 4x4 two-qubit density matrix, got size {rho_qq.size}")
    validate_density(rho_qq)
    t = correlation_matrix(rho_qq.matrix)
    u = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    m = float(u[0] + u[1])
    b = math.sqrt(max(0.0, m - 1.0))
    return CHSHReport(t_matrix=t, u_eigenvalues=u, m_value=m, b_value=b)


def truncation_fidelity_series(
    full: Sequence[StateVector], params: CouplerParams, grid: TimeGrid
) -> TimeSeries:
    """1 - |<psi(t)|psi_cut(t)>|^2 per grid time (probability convention)."""
    times = grid.times
    if len(full) != times.size:
        raise DimensionError(f"{len(full)} states for {times.size} grid times")
    out = np.empty(times.size)
    stationary = complex(params.alpha) == 0 and complex(params.epsilon) == 0
    for k, (t, psi) in enumerate(zip(times, full)):
        # Without couplings the truncated state never leaves |2,0>.
        amps = TruncatedAmplitudes(1, 0, 0) if stationary else analytic_amplitudes(params, t)
        cut = truncated_to_full(amps, psi.dims)
        out[k] = 1.0 - pure_fidelity(psi, cut, "probability")
    return TimeSeries(("one_minus_F",), times, out, {"fidelity_convention": "probability"})
