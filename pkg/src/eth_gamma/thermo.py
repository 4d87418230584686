"""Canonical thermodynamics of a finite spectrum (k_B = hbar = 1)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, EmptySpectrum, EnergyOutOfRange, NonFiniteInput

BRACKET_WIDTH = 1e-12
_MAX_EXPANSIONS = 200


def _as_spectrum(spectrum):
    e = np.asarray(spectrum, dtype=float).ravel()
    if e.size == 0:
        raise EmptySpectrum("spectrum is empty")
    if not np.all(np.isfinite(e)):
        raise NonFiniteInput("spectrum contains non-finite values")
    return e


def partition_stats(spectrum, beta: float) -> tuple[float, float, float]:
    """Return ``(log Z, <E>, S)`` at inverse temperature ``beta``.

    The exponent is shifted by the ground state for ``beta >= 0`` and by the
    top of the spectrum for ``beta < 0`` so the largest weight is exactly 1.
    """
    e = _as_spectrum(spectrum)
    beta = float(beta)
    if not np.isfinite(beta):
        raise NonFiniteInput("beta must be finite")
    ref = e.min() if beta >= 0 else e.max()
    w = np.exp(-beta * (e - ref))
    z = w.sum()
    log_z = np.log(z) - beta * ref
    energy = float(np.dot(w, e) / z)
    return float(log_z), energy, float(log_z + beta * energy)


def mean_energy(spectrum, beta: float) -> float:
    return partition_stats(spectrum, beta)[1]


def energy_variance(spectrum, beta: float) -> float:
    e = _as_spectrum(spectrum)
    ref = e.min() if beta >= 0 else e.max()
    w = np.exp(-beta * (e - ref))
    w /= w.sum()
    mu = np.dot(w, e)
    return float(np.dot(w, (e - mu) ** 2))


def beta_eff(spectrum, E_target: float) -> float:
    """Inverse temperature whose canonical mean energy is ``E_target``.

    Exponential bracket expansion from beta = 0, then bisection down to a
    bracket width of 1e-12.
    """
    e = _as_spectrum(spectrum)
    lo_e, hi_e = e.min(), e.max()
    if hi_e == lo_e:
        raise DegenerateSpectrum("all eigenvalues are equal")
    if not lo_e < E_target < hi_e:
        raise EnergyOutOfRange(f"E_target={E_target} outside ({lo_e}, {hi_e})")

    # <E>(beta) is decreasing; g(beta) = <E> - E_target changes sign once
    def g(b):
        return mean_energy(e, b) - E_target

    g0 = g(0.0)
    if g0 == 0.0:
        return 0.0
    direction = 1.0 if g0 > 0 else -1.0
    step = 1.0 / (hi_e - lo_e)
    a, b = 0.0, direction * step
    for _ in range(_MAX_EXPANSIONS):
        if g(b) * direction <= 0:
            break
        a, b = b, 2 * b
    else:
        raise EnergyOutOfRange(f"could not bracket E_target={E_target}")
    lo, hi = min(a, b), max(a, b)
    g_lo = g(lo)
    for _ in range(_MAX_EXPANSIONS):
        if hi - lo <= BRACKET_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def entropy_at_energy(spectrum, E_target: float) -> tuple[float, float]:
    """``(beta_eff, S)`` at energy ``E_target``."""
    b = beta_eff(spectrum, E_target)
    return b, partition_stats(spectrum, b)[2]


@dataclass(frozen=True)
class ThermoCurve:
    betas: np.ndarray
    log_z: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray


def thermo_curve(spectrum, betas) -> ThermoCurve:
    e = _as_spectrum(spectrum)
    betas = np.asarray(betas, dtype=float)
    rows = np.array([partition_stats(e, b) for b in betas]).reshape(-1, 3)
    return ThermoCurve(betas, rows[:, 0], rows[:, 1], rows[:, 2])
