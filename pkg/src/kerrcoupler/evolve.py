"""Unitary and Lindblad time evolution.

Superoperators act on column-stacked density matrices: ``stack(rho)``
concatenates the columns of rho, so that

    A rho B^dag  ->  kron(conj(B), A) @ stack(rho)

The ``integrate`` master-equation method never builds the superoperator; it
evaluates the generator directly on rho with matrix products. The
``spectral`` method diagonalises the superoperator returned by
:func:`liouvillian`. The two therefore cross-check each other.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DimensionError,
    EigendecompositionFailed,
    NotHermitian,
    StepSizeTooLarge,
)
from .hilbert import DensityMatrix, ModeDims, OperatorMatrix, StateVector

log = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-10
# Condition number of the Liouvillian eigenvector matrix above which the
# spectral expansion is considered unreliable.
SPECTRAL_MAX_COND = 1e10


@dataclass(frozen=True)
class TimeGrid:
    """``n_steps + 1`` uniformly spaced samples from t_start to t_end inclusive."""

    t_start: float = 0.0
    t_end: float = 50.0
    n_steps: int = 2000

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps!r}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.n_steps) + 1)

    def __len__(self):
        return int(self.n_steps) + 1


def _matrix(op) -> np.ndarray:
    return np.asarray(op.matrix if isinstance(op, OperatorMatrix) else op, dtype=complex)


def _dims(op) -> Optional[ModeDims]:
    return op.dims if isinstance(op, (OperatorMatrix, DensityMatrix, StateVector)) else None


@dataclass(frozen=True)
class UnitaryPropagator:
    """Spectral form of exp(-i H t): V diag(exp(-i lambda t)) V^dag."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dims: Optional[ModeDims]

    def matrix(self, t: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(-1j * self.eigenvalues * t)) @ v.conj().T

    def apply(self, psi: StateVector, t: float) -> StateVector:
        if self.dims is not None and psi.dims != self.dims:
            raise DimensionError(f"state dims {psi.dims} do not match propagator dims {self.dims}")
        v = self.eigenvectors
        return StateVector(psi.dims, v @ (np.exp(-1j * self.eigenvalues * t) * (v.conj().T @ psi.amplitudes)))


def make_propagator(H) -> UnitaryPropagator:
    h = _matrix(H)
    scale = max(np.linalg.norm(h), 1.0)
    err = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if err > HERMITIAN_RTOL * scale:
        raise NotHermitian(f"max|H - H^dag| = {err:.3e} exceeds {HERMITIAN_RTOL:.0e} * ||H||")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return UnitaryPropagator(w, v, _dims(H))


def evolve_pure(prop: UnitaryPropagator, psi0: StateVector, grid: TimeGrid) -> list[StateVector]:
    if prop.dims is not None and psi0.dims != prop.dims:
        raise DimensionError(f"state dims {psi0.dims} do not match propagator dims {prop.dims}")
    v = prop.eigenvectors
    coeffs = v.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(grid.times, prop.eigenvalues))
    states = (phases * coeffs) @ v.T
    # U(0) is the identity; keep psi0 bit-exact there.
    states[grid.times == 0.0] = psi0.amplitudes
    return [StateVector(psi0.dims, row) for row in states]


def stack(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unstack(vec: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(vec).reshape(d, d, order="F")


def _check_shared_size(H, collapse) -> int:
    d = _matrix(H).shape[0]
    for c in collapse:
        if _matrix(c).shape != (d, d):
            raise DimensionError(f"collapse operator of shape {_matrix(c).shape} vs Hamiltonian size {d}")
    return d


def liouvillian(H, collapse: Sequence = ()) -> np.ndarray:
    """Dense ``d^2 x d^2`` generator of d rho/dt for column-stacked rho.

    Uses the trace-preserving dissipator
    C rho C^dag - (C^dag C rho + rho C^dag C) / 2.
    """
    d = _check_shared_size(H, collapse)
    h = _matrix(H)
    eye = np.eye(d)
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in collapse:
        c = _matrix(c)
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    return L


def lindblad_rhs(H, collapse: Sequence = ()):
    """Return f(rho) = L rho evaluated with matrix products only."""
    h = _matrix(H)
    cs = [_matrix(c) for c in collapse]
    heff = h - 0.5j * sum((c.conj().T @ c for c in cs), np.zeros_like(h))
    heff_dag = heff.conj().T

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * (heff @ rho - rho @ heff_dag)
        for c in cs:
            out += c @ rho @ c.conj().T
        return out

    return rhs


def _symmetrise(rho: np.ndarray) -> tuple[np.ndarray, float]:
    drift = float(np.max(np.abs(rho - rho.conj().T)))
    return 0.5 * (rho + rho.conj().T), drift


def evolve_master(
    H,
    collapse: Sequence,
    rho0: DensityMatrix,
    grid: TimeGrid,
    method: str = "integrate",
    rtol: float = 1e-8,
    atol: float = 1e-12,
) -> list[DensityMatrix]:
    """rho(t_k) at every grid time.

    ``integrate`` uses adaptive Dormand-Prince 5(4) on rho (scipy RK45) and
    raises StepSizeTooLarge if the step controller gives up. ``spectral``
    expands rho0 in eigenvectors of the Liouvillian and propagates each
    component as exp(s_j t). Every returned matrix is Hermitian-symmetrised;
    the largest correction is logged at DEBUG level. The trace is never
    renormalised.
    """
    d = _check_shared_size(H, collapse)
    if rho0.size != d:
        raise DimensionError(f"rho0 of size {rho0.size} vs Hamiltonian size {d}")
    times = grid.times

    if method == "integrate":
        raw = _integrate(H, collapse, rho0.matrix, times, rtol, atol)
    elif method == "spectral":
        raw = _spectral(H, collapse, rho0.matrix, times)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'integrate' or 'spectral'")

    out = []
    worst = 0.0
    for rho in raw:
        rho, drift = _symmetrise(rho)
        worst = max(worst, drift)
        out.append(DensityMatrix(rho0.dims, rho))
    log.debug("evolve_master[%s]: max hermiticity correction %.3e", method, worst)
    return out


def _integrate(H, collapse, rho0, times, rtol, atol):
    d = rho0.shape[0]
    f = lindblad_rhs(H, collapse)

    def fun(_t, y):
        return f(y.reshape(d, d)).ravel()

    sol = solve_ivp(
        fun,
        (times[0], times[-1]),
        np.asarray(rho0, dtype=complex).ravel(),
        method="RK45",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise StepSizeTooLarge(f"integration failed at t={sol.t[-1] if sol.t.size else times[0]}: {sol.message}")
    return [sol.y[:, k].reshape(d, d) for k in range(times.size)]


def _spectral(H, collapse, rho0, times):
    d = rho0.shape[0]
    L = liouvillian(H, collapse)
    try:
        s, W = np.linalg.eig(L)
        cond = np.linalg.cond(W)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionFailed(str(exc)) from exc
    if not np.isfinite(cond) or cond > SPECTRAL_MAX_COND:
        raise EigendecompositionFailed(
            f"Liouvillian eigenvectors ill-conditioned (cond={cond:.3e}); use method='integrate'"
        )
    amps = np.linalg.solve(W, stack(rho0))
    vecs = (np.exp(np.outer(times, s)) * amps) @ W.T
    return [unstack(v, d) for v in vecs]
