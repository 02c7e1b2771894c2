"""Two-mode truncated Fock space and its elementary operator algebra.

Basis states |n>_a |m>_b are flattened with mode ``a`` as the slow index::

    index(n, m) = n * dim_b + m

so a state vector reshaped to ``(dim_a, dim_b)`` is the coefficient matrix
``c[n, m]``. All containers are frozen and hold read-only arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, NearZeroSupport

MODES = ("a", "b")

#: Logical qubit levels used by :func:`project_qubit_qubit` (Fock 0 -> 0, Fock 2 -> 1).
LOGICAL_LEVELS = (0, 2)


def _frozen(arr, dtype=complex) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ModeDims:
    dim_a: int = 10
    dim_b: int = 10

    def __post_init__(self):
        for name in ("dim_a", "dim_b"):
            value = getattr(self, name)
            if int(value) != value or value < 3:
                raise DimensionError(
                    f"{name}={value!r}: need an integer >= 3 so that |2> is representable"
                )
            object.__setattr__(self, name, int(value))

    @property
    def size(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def shape(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def index(self, n: int, m: int) -> int:
        if not (0 <= n < self.dim_a and 0 <= m < self.dim_b):
            raise DimensionError(f"Fock pair ({n}, {m}) outside truncation {self.shape}")
        return n * self.dim_b + m

    def unflatten(self, k: int) -> tuple[int, int]:
        if not 0 <= k < self.size:
            raise DimensionError(f"flat index {k} outside [0, {self.size})")
        return divmod(k, self.dim_b)

    def covers(self, n_max: int, m_max: int) -> bool:
        return self.dim_a > n_max and self.dim_b > m_max


@dataclass(frozen=True)
class StateVector:
    """Pure two-mode state; ``amplitudes[index(n, m)]`` is c_{n,m}."""

    dims: ModeDims
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).ravel()
        if amps.shape != (self.dims.size,):
            raise DimensionError(
                f"expected {self.dims.size} amplitudes for dims {self.dims.shape}, got {amps.shape}"
            )
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def coefficients(self) -> np.ndarray:
        """The ``dim_a x dim_b`` matrix c[n, m]."""
        return self.amplitudes.reshape(self.dims.shape)

    def amplitude(self, n: int, m: int) -> complex:
        return complex(self.amplitudes[self.dims.index(n, m)])

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        _check_same_dims(self.dims, other.dims)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state. ``dims`` is ``None`` for bare matrices such as the
    4x4 logical qubit-qubit state produced by :func:`project_qubit_qubit`."""

    dims: Optional[ModeDims]
    matrix: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {mat.shape}")
        if self.dims is not None and mat.shape[0] != self.dims.size:
            raise DimensionError(
                f"matrix of size {mat.shape[0]} does not match dims {self.dims.shape}"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the Hermitian part, ascending."""
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class OperatorMatrix:
    """Square operator on the two-mode space (``dims=None`` for other spaces)."""

    dims: Optional[ModeDims]
    matrix: np.ndarray
    hermitian_hint: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"operator must be square, got shape {mat.shape}")
        if self.dims is not None and mat.shape[0] != self.dims.size:
            raise DimensionError(
                f"operator of size {mat.shape[0]} does not match dims {self.dims.shape}"
            )
        object.__setattr__(self, "matrix", mat)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "OperatorMatrix":
        label = f"{self.label}^dag" if self.label else ""
        return OperatorMatrix(self.dims, self.matrix.conj().T, self.hermitian_hint, label)

    def apply(self, psi: StateVector) -> StateVector:
        if self.dims is not None:
            _check_same_dims(self.dims, psi.dims)
        return StateVector(psi.dims, self.matrix @ psi.amplitudes)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.dims, self.matrix @ other.matrix)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.dims, self.matrix + other.matrix)

    def scaled(self, factor: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.dims, factor * self.matrix, label=self.label)


def _check_same_dims(a, b):
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} vs {b}")


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


def single_mode_annihilation(dim: int) -> np.ndarray:
    """Lowering operator on a ``dim``-level oscillator: <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def annihilation(dims: ModeDims, mode: str) -> OperatorMatrix:
    _check_mode(mode)
    if mode == "a":
        mat = np.kron(single_mode_annihilation(dims.dim_a), np.eye(dims.dim_b))
    else:
        mat = np.kron(np.eye(dims.dim_a), single_mode_annihilation(dims.dim_b))
    return OperatorMatrix(dims, mat, label=mode)


def creation(dims: ModeDims, mode: str) -> OperatorMatrix:
    """Adjoint of :func:`annihilation`. The top Fock level is mapped to zero."""
    return annihilation(dims, mode).dagger()


def number(dims: ModeDims, mode: str) -> OperatorMatrix:
    a = annihilation(dims, mode)
    return OperatorMatrix(dims, a.matrix.conj().T @ a.matrix, hermitian_hint=True, label=f"n_{mode}")


def basis_state(dims: ModeDims, n: int, m: int) -> StateVector:
    amps = np.zeros(dims.size, dtype=complex)
    amps[dims.index(n, m)] = 1.0
    return StateVector(dims, amps)


def product_state(dims: ModeDims, psi_a, psi_b) -> StateVector:
    """|psi_a> (x) |psi_b> from single-mode amplitude lists (zero-padded)."""
    va = np.zeros(dims.dim_a, dtype=complex)
    vb = np.zeros(dims.dim_b, dtype=complex)
    psi_a = np.asarray(psi_a, dtype=complex)
    psi_b = np.asarray(psi_b, dtype=complex)
    if psi_a.size > dims.dim_a or psi_b.size > dims.dim_b:
        raise DimensionError("single-mode factor longer than the truncation")
    va[: psi_a.size] = psi_a
    vb[: psi_b.size] = psi_b
    return StateVector(dims, np.kron(va, vb))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced density matrix of mode ``keep``.

    The result carries ``dims=None``; it is a single-mode matrix of size
    ``dim_a`` (keep="a") or ``dim_b`` (keep="b").
    """
    _check_mode(keep)
    if rho.dims is None:
        raise DimensionError("partial_trace needs two-mode dims on the input")
    da, db = rho.dims.shape
    t = rho.matrix.reshape(da, db, da, db)
    if keep == "a":
        red = np.einsum("ikjk->ij", t)
    else:
        red = np.einsum("kikj->ij", t)
    return DensityMatrix(None, red)


def qubit_projector(dims: ModeDims) -> np.ndarray:
    """Isometry (dims.size x 4) onto span{|0>,|2>}_a (x) span{|0>,|2>}_b.

    Column ordering is the logical basis |00>,|01>,|10>,|11> with a first,
    Fock |0> -> logical 0 and Fock |2> -> logical 1.
    """
    if not dims.covers(2, 2):
        raise DimensionError("projection needs Fock levels 0..2 in both modes")
    iso = np.zeros((dims.size, 4), dtype=complex)
    for col, (la, lb) in enumerate((x, y) for x in range(2) for y in range(2)):
        iso[dims.index(LOGICAL_LEVELS[la], LOGICAL_LEVELS[lb]), col] = 1.0
    return iso


def project_qubit_qubit(rho: DensityMatrix, eps_proj: float = 1e-12) -> DensityMatrix:
    """Local projection Pi_{0,2} (x) Pi_{0,2}, renormalised, in the logical basis.

    Raises NearZeroSupport when the projected trace is <= ``eps_proj``.
    """
    if rho.dims is None:
        raise DimensionError("project_qubit_qubit needs two-mode dims on the input")
    iso = qubit_projector(rho.dims)
    block = iso.conj().T @ rho.matrix @ iso
    weight = float(np.real(np.trace(block)))
    if weight <= eps_proj:
        raise NearZeroSupport(
            f"projected weight {weight:.3e} <= {eps_proj:.1e}; state has no support on {{0,2}}x{{0,2}}"
        )
    return DensityMatrix(None, block / weight)


def random_state(dims: ModeDims, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=dims.size) + 1j * rng.normal(size=dims.size)
    return StateVector(dims, v / np.linalg.norm(v))


def random_density(dims: ModeDims, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Random full-rank (or given rank) density matrix, Wishart-style."""
    rank = dims.size if rank is None else rank
    g = rng.normal(size=(dims.size, rank)) + 1j * rng.normal(size=(dims.size, rank))
    rho = g @ g.conj().T
    return DensityMatrix(dims, rho / np.trace(rho))
