"""Quantum chaos from the ETH off-diagonal envelope f(E, omega).

Exact diagonalisation of SYK, XXZ and GUE models, extraction of f at fixed
energy, fits of its large-omega decay rate gamma and the bound gamma >= beta/4.
"""

__version__ = "0.1.0"
