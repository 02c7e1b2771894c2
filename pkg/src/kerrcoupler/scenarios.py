"""Figure-by-figure scenario runner.

Column schema (first CSV column is always ``t``):

=================  ==============================================================
scenario           columns
=================  ==============================================================
truncation         one_minus_F                 (squared-overlap convention)
probabilities      P_n_m per target, default P_2_0, P_0_2, P_1_2
bell_fidelities    F_<target> per target       (amplitude |<psi|target>|)
entropy            E_ebits
chsh               B, M                        (null where the projection fails)
damped             chi_t, F_<target>           (Uhlmann, unsquared)
=================  ==============================================================
"""

from __future__ import annotations

import logging

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .errors import NearZeroSupport, NumericError
from .evolve import evolve_master, evolve_pure, make_propagator
from .hilbert import basis_state, project_qubit_qubit
from .measures import (
    bell_state,
    chsh_violation,
    entanglement_entropy,
    mixed_fidelity,
    probabilities,
    pure_fidelity,
    truncation_fidelity_series,
)
from .model import collapse_operators, hamiltonian
from .series import TimeSeries

log = logging.getLogger(__name__)


def _with_context(exc: NumericError, config: ScenarioConfig, t=None) -> NumericError:
    where = f"scenario {config.scenario}" + (f", t={t:.17g}" if t is not None else "")
    new = type(exc)(f"{where}: {exc}")
    new.__cause__ = exc
    return new


def _pure_states(config: ScenarioConfig):
    H = hamiltonian(config.params, config.dims)
    psi0 = basis_state(config.dims, *config.initial)
    return evolve_pure(make_propagator(H), psi0, config.grid)


def run_scenario(config: ScenarioConfig) -> TimeSeries:
    try:
        columns, values = _RUNNERS[config.scenario](config)
    except NumericError as exc:
        raise _with_context(exc, config) from exc
    metadata = {
        "kerrcoupler_version": __version__,
        "scenario": config.scenario,
        "time_unit": config.params.time_unit,
        "fidelity_convention": _CONVENTION[config.scenario],
    }
    return TimeSeries(tuple(columns), config.grid.times, values, metadata, tuple(config.to_lines()))


def _truncation(config):
    states = _pure_states(config)
    ts = truncation_fidelity_series(states, config.params, config.grid)
    return ts.columns, ts.values


def _probabilities(config):
    states = _pure_states(config)
    targets = config.targets
    values = np.array([probabilities(psi, targets) for psi in states])
    return [f"P_{n}_{m}" for n, m in targets], values


def _bell_fidelities(config):
    states = _pure_states(config)
    refs = [bell_state(t, config.dims) for t in config.targets]
    values = np.array([[pure_fidelity(psi, ref, "amplitude") for ref in refs] for psi in states])
    return [f"F_{t}" for t in config.targets], values


def _entropy(config):
    states = _pure_states(config)
    return ["E_ebits"], np.array([entanglement_entropy(psi) for psi in states])


def _chsh(config):
    states = _pure_states(config)
    values = np.full((len(states), 2), np.nan)
    for k, psi in enumerate(states):
        try:
            report = chsh_violation(project_qubit_qubit(psi.projector()))
        except NearZeroSupport:
            log.info("chsh: no {0,2}x{0,2} support at t=%g; writing null", config.grid.times[k])
            continue
        values[k] = (report.b_value, report.m_value)
    return ["B", "M"], values


def _damped(config):
    H = hamiltonian(config.params, config.dims)
    collapse = collapse_operators(config.params, config.dims)
    rho0 = basis_state(config.dims, *config.initial).projector()
    rhos = evolve_master(H, collapse, rho0, config.grid, method=config.method)
    refs = [bell_state(t, config.dims).projector() for t in config.targets]
    fid = np.array([[mixed_fidelity(rho, ref) for ref in refs] for rho in rhos])
    chi_t = config.params.chi_a * config.grid.times
    return ["chi_t"] + [f"F_{t}" for t in config.targets], np.column_stack([chi_t, fid])


_RUNNERS = {
    "truncation": _truncation,
    "probabilities": _probabilities,
    "bell_fidelities": _bell_fidelities,
    "entropy": _entropy,
    "chsh": _chsh,
    "damped": _damped,
}

_CONVENTION = {
    "truncation": "probability |<psi|psi_cut>|^2",
    "probabilities": "n/a",
    "bell_fidelities": "amplitude |<psi|target>|",
    "entropy": "n/a",
    "chsh": "n/a",
    "damped": "Uhlmann tr sqrt(sqrt(rho) sigma sqrt(rho)), unsquared",
}
