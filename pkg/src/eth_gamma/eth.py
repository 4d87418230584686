"""Off-diagonal ETH analysis.

Pairs of eigenstates whose mean energy falls in a window around a target
energy are binned by their energy difference ``omega``; the binned second
moment ``mean |A_ij|^2 = e^{-S} f(omega)^2`` gives ``f``. The large-omega tail
of ``-ln f`` is fitted with a straight line whose slope is ``gamma``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AllBinsSparse,
    DegenerateAbscissa,
    DomainError,
    EmptyWindow,
    EnergyOutOfRange,
    TooFewBins,
    WindowTooLarge,
    ZeroColumn,
)
from .thermo import entropy_at_energy

log = logging.getLogger(__name__)

MIN_FIT_BINS = 8
SPARSE_WINDOW_PAIRS = 1000


@dataclass(frozen=True)
class ETHConfig:
    """Windowing, binning and fit-window settings.

    ``omega_min`` and the cap are absolute energies; ``None`` selects the
    defaults ``1e-8 * span`` and ``omega_cap_frac * span``.
    """

    window_frac: float = 0.05
    n_bins: int = 60
    n_min: int = 20
    omega_min: float | None = None
    omega_cap_frac: float = 0.75
    lo_frac: float = 0.35
    hi_frac: float = 1.0


@dataclass(frozen=True)
class FOmegaTable:
    E_target: float
    beta_eff: float
    S: float
    window_width: float
    omega_max: float
    n_pairs: int
    omega_center: np.ndarray
    count: np.ndarray
    mean_abs2: np.ndarray
    f: np.ndarray
    f_stderr: np.ndarray
    bin_index: np.ndarray
    warnings: tuple = field(default=())

    @property
    def neg_log_f(self) -> np.ndarray:
        return -np.log(self.f)

    def scaled(self, c: float) -> "FOmegaTable":
        """Same table with every ``mean_abs2`` multiplied by ``c``."""
        root = math.sqrt(c)
        return FOmegaTable(
            self.E_target, self.beta_eff, self.S, self.window_width, self.omega_max,
            self.n_pairs, self.omega_center, self.count, self.mean_abs2 * c,
            self.f * root, self.f_stderr * root, self.bin_index, self.warnings,
        )


@dataclass(frozen=True)
class GammaFit:
    gamma: float
    intercept: float
    stderr_gamma: float
    r_squared: float
    fit_window: tuple[float, float]
    n_bins_used: int


@dataclass(frozen=True)
class BoundCheck:
    ratio: float
    satisfied: bool
    tolerance: float


@dataclass(frozen=True)
class ChaosReport:
    beta_eff: float
    E_target: float
    S: float
    gamma: float
    gamma_over_beta: float
    bound_satisfied: bool
    bound_tolerance: float
    lambda_implied: float
    fit: GammaFit


def _energies(eigs) -> np.ndarray:
    return np.asarray(getattr(eigs, "eigenvalues", eigs), dtype=float)


def window_pairs(energies: np.ndarray, lo: float, hi: float):
    """Index arrays ``(i, j)``, ``i < j``, with ``(E_i + E_j) / 2`` in ``[lo, hi]``.

    ``energies`` must be ascending. Pairs come out ordered by ``i`` then ``j``.
    """
    e = energies
    d = len(e)
    start = np.searchsorted(e, 2 * lo - e, side="left")
    stop = np.searchsorted(e, 2 * hi - e, side="right")
    start = np.maximum(start, np.arange(d) + 1)
    n = np.clip(stop - start, 0, None)
    i = np.repeat(np.arange(d), n)
    first = np.cumsum(n) - n
    j = np.repeat(start, n) + (np.arange(n.sum()) - np.repeat(first, n))
    mean = 0.5 * (e[i] + e[j])
    keep = (mean >= lo) & (mean <= hi)
    return i[keep], j[keep]


def bin_edges(span: float, config: ETHConfig) -> tuple[float, float, int]:
    omega_min = 1e-8 * span if config.omega_min is None else float(config.omega_min)
    omega_cap = config.omega_cap_frac * span
    if omega_cap <= omega_min or config.n_bins < 1:
        raise ValueError("empty omega range")
    return omega_min, omega_cap, int(config.n_bins)


def extract_f_omega(eigs, A, E_target: float, config: ETHConfig = ETHConfig()) -> FOmegaTable:
    """Bin ``|A_ij|^2`` over the energy window around ``E_target``.

    ``A`` must be expressed in the eigenbasis of ``eigs``. Bins with fewer
    than ``config.n_min`` pairs are dropped; ``omega_max`` is the upper edge of
    the last retained bin.
    """
    e = _energies(eigs)
    e_min, e_max = e[0], e[-1]
    if not e_min < E_target < e_max:
        raise EnergyOutOfRange(f"E_target={E_target} outside ({e_min}, {e_max})")
    span = e_max - e_min
    beta, S = entropy_at_energy(e, E_target)
    width = config.window_frac * span
    i, j = window_pairs(e, E_target - width / 2, E_target + width / 2)
    if len(i) == 0:
        raise EmptyWindow(f"no eigenstate pairs within {width:g} of E={E_target:g}")

    omega_min, omega_cap, n_bins = bin_edges(span, config)
    omega = e[j] - e[i]
    sel = (omega > omega_min) & (omega <= omega_cap)
    i, j, omega = i[sel], j[sel], omega[sel]
    h = (omega_cap - omega_min) / n_bins
    k = np.clip(np.ceil((omega - omega_min) / h).astype(np.int64) - 1, 0, n_bins - 1)
    abs2 = np.abs(np.asarray(A)[i, j]) ** 2

    count = np.bincount(k, minlength=n_bins)
    s1 = np.bincount(k, weights=abs2, minlength=n_bins)
    s2 = np.bincount(k, weights=abs2 * abs2, minlength=n_bins)
    keep = np.nonzero(count >= config.n_min)[0]
    if len(keep) == 0:
        raise AllBinsSparse(f"no omega bin reaches {config.n_min} pairs")
    n = count[keep].astype(float)
    mean = s1[keep] / n
    if np.any(mean <= 0):
        keep, n, mean = keep[mean > 0], n[mean > 0], mean[mean > 0]
        if len(keep) == 0:
            raise AllBinsSparse("every populated bin has vanishing matrix elements")
    var = np.clip(s2[keep] / n - mean**2, 0.0, None) * n / np.maximum(n - 1, 1)
    f = np.sqrt(math.exp(S) * mean)
    f_err = 0.5 * f * np.sqrt(var / n) / mean

    notes = []
    if len(i) < SPARSE_WINDOW_PAIRS:
        notes.append(f"only {len(i)} pairs in the energy window")
        log.warning("E_target=%g: %s", E_target, notes[-1])
    return FOmegaTable(
        E_target=float(E_target), beta_eff=beta, S=S, window_width=width,
        omega_max=float(omega_min + (keep[-1] + 1) * h), n_pairs=int(len(i)),
        omega_center=omega_min + (keep + 0.5) * h, count=count[keep], mean_abs2=mean,
        f=f, f_stderr=f_err, bin_index=keep, warnings=tuple(notes),
    )


def fit_gamma(table: FOmegaTable, lo_frac: float = 0.35, hi_frac: float = 1.0,
              min_bins: int = MIN_FIT_BINS) -> GammaFit:
    """Count-weighted least squares of ``-ln f`` against ``omega`` on the tail."""
    lo, hi = lo_frac * table.omega_max, hi_frac * table.omega_max
    x_all = np.asarray(table.omega_center, dtype=float)
    sel = (x_all >= lo) & (x_all <= hi)
    n = int(sel.sum())
    if n < min_bins:
        raise TooFewBins(f"{n} bins in fit window [{lo:g}, {hi:g}], need {min_bins}")
    x = x_all[sel]
    y = -np.log(np.asarray(table.f, dtype=float)[sel])
    w = np.asarray(table.count, dtype=float)[sel]
    if np.ptp(x) == 0:
        raise DegenerateAbscissa("all omega values equal")
    sw = w.sum()
    xm, ym = np.dot(w, x) / sw, np.dot(w, y) / sw
    dx, dy = x - xm, y - ym
    sxx = np.dot(w, dx * dx)
    slope = np.dot(w, dx * dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = np.dot(w, resid * resid)
    ss_tot = np.dot(w, dy * dy)
    stderr = math.sqrt(ss_res / (n - 2) / sxx)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return GammaFit(float(slope), float(intercept), stderr, float(min(max(r2, 0.0), 1.0)),
                    (float(lo), float(hi)), n)


def check_bound(gamma: float, beta_eff: float, tol_abs: float = 0.0) -> BoundCheck:
    """Test ``gamma >= beta_eff / 4`` allowing ``tol_abs`` slack.

    The ratio is NaN at ``beta_eff == 0``, where the bound reduces to gamma >= 0.
    """
    ratio = gamma / beta_eff if beta_eff != 0 else math.nan
    return BoundCheck(ratio, bool(gamma >= beta_eff / 4 - tol_abs), float(tol_abs))


def lambda_from_gamma(gamma: float, beta: float) -> float:
    """Lyapunov exponent implied by the decay rate: ``3 pi / (4 (gamma + beta / 8))``."""
    denom = gamma + beta / 8
    if not denom > 0:
        raise DomainError(f"gamma + beta/8 = {denom} must be positive")
    return 3 * math.pi / (4 * denom)


def gamma_from_lambda(lam: float, beta: float) -> float:
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return 3 * math.pi / (4 * lam) - beta / 8


def chaos_report(table: FOmegaTable, fit: GammaFit) -> ChaosReport:
    tol = 2 * fit.stderr_gamma
    bound = check_bound(fit.gamma, table.beta_eff, tol)
    try:
        lam = lambda_from_gamma(fit.gamma, table.beta_eff)
    except DomainError:
        lam = math.nan
    return ChaosReport(table.beta_eff, table.E_target, table.S, fit.gamma, bound.ratio,
                       bound.satisfied, tol, lam, fit)


def ipr(A, n: int) -> tuple[float, float]:
    """IPR of the normalised state ``A |E_n>``; returns ``(ipr, norm)``."""
    col = np.asarray(A)[:, n]
    p = np.abs(col) ** 2
    norm2 = p.sum()
    if norm2 == 0:
        raise ZeroColumn(f"column {n} of A vanishes")
    p = p / norm2
    return float(1.0 / np.dot(p, p)), float(math.sqrt(norm2))


def ipr_all(A) -> np.ndarray:
    """IPR of ``A |E_n>`` for every column; NaN for vanishing columns."""
    p = np.abs(np.asarray(A)) ** 2
    norm2 = p.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = norm2**2 / (p * p).sum(axis=0)
    out[norm2 == 0] = np.nan
    return out


def diagonal_profile(eigs, A, smoothing_window: int = 1):
    """Diagonal elements ``A_nn`` and their centred moving average.

    The window shrinks symmetrically to fit at the spectrum edges. Returns
    ``(E_n, A_nn, running_mean)`` arrays.
    """
    e = _energies(eigs)
    d = np.real(np.diag(np.asarray(A)))
    D = len(d)
    if smoothing_window > D:
        raise WindowTooLarge(f"window {smoothing_window} exceeds dimension {D}")
    if smoothing_window < 1 or smoothing_window % 2 == 0:
        raise ValueError("smoothing window must be a positive odd count")
    half = smoothing_window // 2
    idx = np.arange(D)
    reach = np.minimum(np.minimum(idx, D - 1 - idx), half)
    csum = np.concatenate([[0.0], np.cumsum(d)])
    running = (csum[idx + reach + 1] - csum[idx - reach]) / (2 * reach + 1)
    return e, d, running
