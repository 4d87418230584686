"""Operators with a planted off-diagonal envelope ``f(omega) = exp(-gamma0 |omega|)``.

Used as the ground truth for the extraction and fit routines.
"""
from __future__ import annotations

import numpy as np

from .linalg import GaussianStream


def jittered_spectrum(dim: int, seed: int, low: float = -2.0, high: float = 2.0) -> np.ndarray:
    """Ascending, roughly uniform spectrum on ``[low, high]`` without lattice spacing."""
    g = np.random.Generator(np.random.PCG64(seed))
    grid = np.linspace(low, high, dim)
    step = (high - low) / (dim - 1)
    e = grid + step * (g.random(dim) - 0.5) * 0.9
    e[0], e[-1] = low, high
    return np.sort(e)


def planted_operator(energies, gamma0: float, S: float, seed: int | None = None) -> np.ndarray:
    """Hermitian ``A_ij = e^{-S/2} e^{-gamma0 |E_i - E_j|} R_ij`` with zero diagonal.

    With ``seed=None`` every ``R_ij = 1``; otherwise ``R_ij`` are complex
    Gaussians with ``E|R|^2 = 1``.
    """
    e = np.asarray(energies, dtype=float)
    d = len(e)
    envelope = np.exp(-0.5 * S - gamma0 * np.abs(e[:, None] - e[None, :]))
    if seed is None:
        a = envelope.astype(complex)
    else:
        iu = np.triu_indices(d, k=1)
        z = GaussianStream(seed).normal(2 * len(iu[0])) / np.sqrt(2)
        r = np.zeros((d, d), dtype=complex)
        r[iu] = z[0::2] + 1j * z[1::2]
        r[iu[1], iu[0]] = np.conj(r[iu])
        a = envelope * r
    a[np.diag_indices(d)] = 0.0
    return a
