"""Pumped Kerr nonlinear coupler with nonlinear internal coupling.

Modules
-------
hilbert    two-mode Fock space, ladder operators, partial trace, qubit projection
model      parameters, Hamiltonian, collapse operators, closed-form amplitudes
evolve     unitary propagation and Lindblad master equation
measures   fidelities, target states, entanglement entropy, CHSH violation
scenarios  figure scenarios producing CSV time series (``sim`` CLI)
"""

__version__ = "0.1.0"
