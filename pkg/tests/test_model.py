import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrcoupler.errors import ConfigError, DegenerateParams
from kerrcoupler.hilbert import ModeDims, annihilation, basis_state, number
from kerrcoupler.model import (
    CouplerParams,
    TruncatedAmplitudes,
    analytic_amplitudes,
    collapse_operators,
    effective_frequency,
    hamiltonian,
    truncated_rhs,
    truncated_to_full,
)

from oracles import hamiltonian_element

FIG1 = CouplerParams()
couplings = st.floats(1e-3, 2.0)


def _el(H, dims, bra, ket):
    return H.matrix[dims.index(*bra), dims.index(*ket)]


@pytest.mark.parametrize(
    "params",
    [
        CouplerParams(),
        CouplerParams(chi_a=3.0, chi_b=-1.5, epsilon=0.3 - 0.7j, alpha=1.1 + 0.2j),
        CouplerParams(chi_a=1e8, chi_b=1e8, epsilon=2.5e6, alpha=5e6),
    ],
)
def test_hamiltonian_matches_ladder_oracle(params):
    dims = ModeDims(5, 4)
    H = hamiltonian(params, dims)
    ref = np.zeros((dims.size, dims.size), complex)
    for i in range(dims.size):
        for j in range(dims.size):
            ref[i, j] = hamiltonian_element(
                dims.unflatten(i), dims.unflatten(j),
                params.chi_a, params.chi_b, complex(params.epsilon), complex(params.alpha),
            )
    np.testing.assert_allclose(H.matrix, ref, rtol=1e-14, atol=1e-14 * max(1.0, abs(params.chi_a)))


def test_hamiltonian_diagonal_without_couplings():
    dims = ModeDims(6, 6)
    p = CouplerParams(chi_a=2.0, chi_b=3.0, epsilon=0.0, alpha=0.0)
    H = hamiltonian(p, dims).matrix
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    for n in range(6):
        for m in range(6):
            k = dims.index(n, m)
            assert H[k, k] == pytest.approx(1.0 * n * (n - 1) + 1.5 * m * (m - 1))


@pytest.mark.parametrize("eps", [0.3, math.pi / 25, 1.7])
def test_pair_exchange_element(eps):
    dims = ModeDims(4, 4)
    for chi in (0.0, 25.0, -4.0):
        H = hamiltonian(CouplerParams(chi_a=chi, chi_b=chi, epsilon=eps, alpha=0.2), dims)
        assert _el(H, dims, (2, 0), (0, 2)) == pytest.approx(2 * eps, rel=1e-15)


def test_pump_element():
    dims = ModeDims(4, 4)
    H = hamiltonian(CouplerParams(alpha=0.37), dims)
    assert _el(H, dims, (1, 2), (0, 2)) == pytest.approx(0.37, rel=1e-15)


def test_resonant_triple_is_degenerate():
    chi = 25.0
    dims = ModeDims(4, 4)
    H = hamiltonian(CouplerParams(chi_a=chi, chi_b=chi, epsilon=0.0, alpha=0.0), dims)
    for pair in ((2, 0), (0, 2), (1, 2)):
        assert _el(H, dims, pair, pair) == pytest.approx(chi, rel=1e-15)


@given(couplings, couplings, couplings, couplings, st.floats(-5, 5), st.floats(-5, 5))
def test_hamiltonian_hermitian_for_complex_couplings(er, ei, ar, ai, chi_a, chi_b):
    H = hamiltonian(CouplerParams(chi_a=chi_a, chi_b=chi_b, epsilon=complex(er, ei), alpha=complex(ar, ai)), ModeDims(5, 5))
    assert H.hermitian_hint
    assert np.max(np.abs(H.matrix - H.matrix.conj().T)) <= 1e-12


def test_collapse_operators():
    dims = ModeDims(4, 4)
    assert collapse_operators(CouplerParams(kappa_a=0, kappa_b=0), dims) == []

    chi = 1e8
    ops = collapse_operators(CouplerParams(kappa_a=chi / 500, kappa_b=0.0), dims)
    assert len(ops) == 1
    np.testing.assert_allclose(ops[0].matrix, math.sqrt(4e5) * annihilation(dims, "a").matrix, rtol=1e-15)

    ops = collapse_operators(CouplerParams(kappa_a=0.3, kappa_b=0.8), dims)
    for op, mode, kappa in zip(ops, "ab", (0.3, 0.8)):
        np.testing.assert_allclose(op.matrix.conj().T @ op.matrix, 2 * kappa * number(dims, mode).matrix, atol=1e-14)


def test_negative_kappa_rejected():
    with pytest.raises(ConfigError):
        CouplerParams(kappa_a=-1e-3)


def test_effective_frequency():
    assert effective_frequency(CouplerParams(alpha=math.pi / 25, epsilon=math.pi / 25)) == pytest.approx(
        math.pi / 25 * math.sqrt(5), rel=1e-15
    )
    assert effective_frequency(CouplerParams(alpha=math.pi / 25, epsilon=math.pi / 25)) == pytest.approx(0.280993, abs=5e-7)
    assert effective_frequency(CouplerParams(alpha=1.0, epsilon=0.0)) == 1.0
    assert effective_frequency(CouplerParams(alpha=0.0, epsilon=1.0)) == 2.0


def test_analytic_initial_condition():
    for p in (FIG1, CouplerParams(alpha=0.3, epsilon=1.1), CouplerParams(alpha=0.0, epsilon=0.5)):
        amps = analytic_amplitudes(p, 0.0)
        assert (amps.c20, amps.c12, amps.c02) == (1, 0, 0)


def test_analytic_half_period_equal_couplings():
    # cos = -1, sin = 0 with alpha = eps: c20 = (1 - 4)/5, c12 = 2 * (-2)/5
    p = CouplerParams(alpha=math.pi / 25, epsilon=math.pi / 25)
    amps = analytic_amplitudes(p, math.pi / effective_frequency(p))
    np.testing.assert_allclose(amps.as_array(), [-0.6, -0.8, 0.0], atol=1e-15)


@given(couplings, couplings, st.floats(0, 100))
def test_analytic_full_period_revival(alpha, eps, t):
    p = CouplerParams(alpha=alpha, epsilon=eps)
    period = 2 * math.pi / effective_frequency(p)
    np.testing.assert_allclose(
        analytic_amplitudes(p, t + period).as_array(), analytic_amplitudes(p, t).as_array(), atol=1e-12 * max(1.0, t / period)
    )
    assert analytic_amplitudes(p, period).as_array() == pytest.approx([1, 0, 0], abs=1e-12)


@given(couplings, couplings, st.floats(0, 1000))
def test_analytic_normalised(alpha, eps, t):
    amps = analytic_amplitudes(CouplerParams(alpha=alpha, epsilon=eps), t)
    assert abs(amps.norm_squared() - 1) <= 1e-12


@given(couplings, couplings, st.floats(0, 50))
def test_analytic_solves_three_state_equations(alpha, eps, t):
    p = CouplerParams(alpha=alpha, epsilon=eps)
    h = 1e-6
    tp, tm = t + h, t - h
    fd = (analytic_amplitudes(p, tp).as_array() - analytic_amplitudes(p, tm).as_array()) / (tp - tm)
    np.testing.assert_allclose(fd, truncated_rhs(p, analytic_amplitudes(p, t).as_array()), atol=1e-8, rtol=0)


def test_analytic_matches_numeric_integration_of_equations():
    from scipy.integrate import solve_ivp

    p = CouplerParams(alpha=0.4, epsilon=0.9)
    ts = np.linspace(0, 20, 41)
    sol = solve_ivp(lambda t, y: truncated_rhs(p, y), (0, 20), np.array([1, 0, 0], complex), t_eval=ts, rtol=1e-11, atol=1e-13)
    for k, t in enumerate(ts):
        np.testing.assert_allclose(sol.y[:, k], analytic_amplitudes(p, t).as_array(), atol=1e-8)


def test_analytic_rejects_complex_and_degenerate():
    with pytest.raises(ConfigError):
        analytic_amplitudes(CouplerParams(alpha=0.1 + 0.1j), 1.0)
    with pytest.raises(ConfigError):
        analytic_amplitudes(CouplerParams(epsilon=-0.1), 1.0)
    with pytest.raises(DegenerateParams):
        analytic_amplitudes(CouplerParams(alpha=0.0, epsilon=0.0), 1.0)


def test_truncated_to_full():
    dims = ModeDims(5, 4)
    np.testing.assert_array_equal(truncated_to_full(TruncatedAmplitudes(1, 0, 0), dims).amplitudes, basis_state(dims, 2, 0).amplitudes)
    np.testing.assert_array_equal(truncated_to_full(TruncatedAmplitudes(0, 0, 1), dims).amplitudes, basis_state(dims, 0, 2).amplitudes)
    amps = TruncatedAmplitudes(0.3, -0.2j, 0.7)
    assert truncated_to_full(amps, dims).norm() == pytest.approx(math.sqrt(0.09 + 0.04 + 0.49), rel=1e-15)
