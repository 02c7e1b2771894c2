"""Coupler Hamiltonian, collapse operators and the three-state closed-form solution.

The Hamiltonian (interaction picture, hbar = 1) is::

    H = chi_a/2 (a^dag)^2 a^2 + chi_b/2 (b^dag)^2 b^2
        + eps (a^dag)^2 b^2 + eps^* (b^dag)^2 a^2
        + alpha a^dag + alpha^* a

With chi_a = chi_b the states |2,0>, |1,2>, |0,2> are degenerate under the
Kerr part, and for weak pumping the dynamics stays inside that triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DegenerateParams, DimensionError
from .hilbert import ModeDims, OperatorMatrix, StateVector, annihilation

# Fock pairs spanned by the truncated solution, in (c20, c12, c02) order.
RESONANT_TRIPLE = ((2, 0), (1, 2), (0, 2))


@dataclass(frozen=True)
class CouplerParams:
    """Physical parameters.

    ``time_unit`` is a label only: ``"1/chi"`` for the dimensionless
    closed-system scenarios, ``"s"`` for the damped one. It never enters a
    computation.
    """

    chi_a: float = 25.0
    chi_b: float = 25.0
    epsilon: complex = math.pi / 25
    alpha: complex = math.pi / 25
    kappa_a: float = 0.0
    kappa_b: float = 0.0
    time_unit: str = "1/chi"

    def __post_init__(self):
        for name in ("kappa_a", "kappa_b"):
            value = getattr(self, name)
            if not value >= 0:
                raise ConfigError(f"damping rate must be >= 0, got {value!r}", field=name)

    @property
    def is_real(self) -> bool:
        return complex(self.epsilon).imag == 0 and complex(self.alpha).imag == 0

    def replace(self, **changes) -> "CouplerParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class TruncatedAmplitudes:
    c20: complex
    c12: complex
    c02: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c20, self.c12, self.c02], dtype=complex)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))


def hamiltonian(params: CouplerParams, dims: ModeDims) -> OperatorMatrix:
    a = annihilation(dims, "a").matrix
    b = annihilation(dims, "b").matrix
    ad = a.conj().T
    bd = b.conj().T
    eps = complex(params.epsilon)
    alpha = complex(params.alpha)

    a2 = a @ a
    b2 = b @ b
    ad2 = ad @ ad
    bd2 = bd @ bd
    h = 0.5 * params.chi_a * (ad2 @ a2) + 0.5 * params.chi_b * (bd2 @ b2)
    h = h + eps * (ad2 @ b2) + eps.conjugate() * (bd2 @ a2)
    h = h + alpha * ad + alpha.conjugate() * a
    return OperatorMatrix(dims, h, hermitian_hint=True, label="H")


def collapse_operators(params: CouplerParams, dims: ModeDims) -> list[OperatorMatrix]:
    """Amplitude-damping operators sqrt(2 kappa) a and sqrt(2 kappa) b.

    An operator whose rate is exactly zero is left out.
    """
    ops = []
    for mode, kappa in (("a", params.kappa_a), ("b", params.kappa_b)):
        if kappa == 0:
            continue
        ops.append(annihilation(dims, mode).scaled(math.sqrt(2.0 * kappa)))
    return ops


def effective_frequency(params: CouplerParams) -> float:
    """Omega = sqrt(alpha^2 + 4 eps^2) for real couplings (moduli otherwise)."""
    alpha = abs(complex(params.alpha))
    eps = abs(complex(params.epsilon))
    return math.sqrt(alpha**2 + 4.0 * eps**2)


def _require_real_couplings(params: CouplerParams):
    alpha = complex(params.alpha)
    eps = complex(params.epsilon)
    if alpha.imag != 0 or eps.imag != 0 or alpha.real < 0 or eps.real < 0:
        raise ConfigError(
            "closed-form solution is defined for real, non-negative alpha and epsilon only; "
            "use the numeric propagator for complex couplings",
            field="alpha/epsilon",
        )
    if alpha.real == 0 and eps.real == 0:
        raise DegenerateParams("alpha = epsilon = 0: no dynamics, Omega = 0")
    return alpha.real, eps.real


def analytic_amplitudes(params: CouplerParams, t: float) -> TruncatedAmplitudes:
    """Closed-form (c20, c12, c02) for the initial state |2>_a|0>_b.

    The result omits the common phase exp(-i chi t) picked up from the
    degenerate Kerr energies; it solves the equations in
    :func:`truncated_rhs` exactly.
    """
    alpha, eps = _require_real_couplings(params)
    om2 = alpha**2 + 4.0 * eps**2
    omega = math.sqrt(om2)
    c, s = math.cos(omega * t), math.sin(omega * t)
    return TruncatedAmplitudes(
        c20=complex((alpha**2 + 4.0 * eps**2 * c) / om2),
        c12=complex(2.0 * eps * alpha * (c - 1.0) / om2),
        # sin term scales as 1/Omega; 1/Omega^2 would break normalisation.
        c02=-2j * eps * s / omega,
    )


def truncated_rhs(params: CouplerParams, amps) -> np.ndarray:
    """d/dt (c20, c12, c02) from the three-state Schroedinger equation."""
    c20, c12, c02 = np.asarray(amps, dtype=complex)
    eps = complex(params.epsilon)
    alpha = complex(params.alpha)
    return -1j * np.array(
        [
            2.0 * eps * c02,
            alpha * c02,
            2.0 * eps.conjugate() * c20 + alpha.conjugate() * c12,
        ]
    )


def truncated_to_full(amps: TruncatedAmplitudes, dims: ModeDims) -> StateVector:
    if not dims.covers(2, 2):
        raise DimensionError("embedding needs Fock levels 0..2 in both modes")
    vec = np.zeros(dims.size, dtype=complex)
    for (n, m), c in zip(RESONANT_TRIPLE, amps.as_array()):
        vec[dims.index(n, m)] = c
    return StateVector(dims, vec)
