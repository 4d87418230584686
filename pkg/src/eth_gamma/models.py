"""Sector-restricted SYK, XXZ and GUE Hamiltonians and the diagonal observables."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidSite, InvalidSize, SectorMismatch
from .hilbert import FERMION, SPIN, SectorBasis, enumerate_sector, occupation_bits
from .linalg import GaussianStream


@dataclass(frozen=True)
class SYKCouplings:
    """Couplings between ordered site pairs ``P = (i < j)`` and ``Q = (k < l)``.

    ``J[p, q]`` multiplies ``c+_i c+_j c_k c_l``; the matrix is Hermitian.
    """

    L: int
    seed: int
    pairs: np.ndarray
    J: np.ndarray

    @property
    def variance(self) -> float:
        return 6.0 / self.L**3

    def independent_entries(self) -> np.ndarray:
        iu = np.triu_indices(len(self.pairs))
        return self.J[iu]


@dataclass(frozen=True)
class XXZParams:
    L: int
    J_xy: float = 1.0
    J_z: float = 0.5
    J_z_prime: float = 1.0

    def __post_init__(self):
        if self.L < 2:
            raise InvalidSize(f"XXZ chain needs L >= 2, got {self.L}")
        if not np.all(np.isfinite([self.J_xy, self.J_z, self.J_z_prime])):
            raise InvalidSize("XXZ couplings must be finite")


def site_pairs(L: int) -> np.ndarray:
    return np.array(list(combinations(range(L), 2)), dtype=np.int64).reshape(-1, 2)


def sample_syk_couplings(L: int, seed: int) -> SYKCouplings:
    """Draw one realisation with ``E|J_PQ|^2 = 6 / L^3``.

    Stream order: the M diagonal (real) entries first, then the strict upper
    triangle row by row as interleaved (real, imag) pairs.
    """
    if not 4 <= L <= 20:
        raise InvalidSize(f"SYK needs 4 <= L <= 20, got {L}")
    pairs = site_pairs(L)
    m = len(pairs)
    var = 6.0 / L**3
    g = GaussianStream(seed)
    J = np.zeros((m, m), dtype=complex)
    J[np.diag_indices(m)] = np.sqrt(var) * g.normal(m)
    iu = np.triu_indices(m, k=1)
    z = g.normal(2 * len(iu[0])) * np.sqrt(var / 2)
    J[iu] = z[0::2] + 1j * z[1::2]
    J[iu[1], iu[0]] = np.conj(J[iu])
    J.setflags(write=False)
    return SYKCouplings(L=L, seed=seed, pairs=pairs, J=J)


def _pair_index_table(L):
    table = -np.ones((L, L), dtype=np.int64)
    for p, (i, j) in enumerate(site_pairs(L)):
        table[i, j] = p
    return table


def build_syk_hamiltonian(couplings: SYKCouplings, basis: SectorBasis) -> np.ndarray:
    """Dense matrix of ``sum_{P,Q} 4 J_PQ c+_i c+_j c_k c_l`` in a particle-number sector.

    Every matrix element factors through a common (N-2)-particle state x:
    ``<a| c+_i c+_j |x> <x| c_k c_l |b>``. The first factor is
    ``s_i(x) s_j(x)`` and the second ``-s_k(x) s_l(x)``, where ``s_p(x)`` is
    the Jordan-Wigner parity of x below site p.
    """
    L, N = basis.L, basis.charge
    if basis.kind != FERMION or L != couplings.L:
        raise SectorMismatch(f"need a fermion sector with L={couplings.L}")
    dim = basis.dim
    H = np.zeros((dim, dim), dtype=complex)
    if N < 2:
        return H

    inner = enumerate_sector(L, N - 2).states
    occ = occupation_bits(inner, L)
    parity = 1 - 2 * ((np.cumsum(occ, axis=1) - occ) % 2)
    n_empty = L - N + 2
    empty = np.nonzero(occ == 0)[1].reshape(len(inner), n_empty)
    combo = np.array(list(combinations(range(n_empty), 2)), dtype=np.int64)
    si, sj = empty[:, combo[:, 0]], empty[:, combo[:, 1]]
    rows = np.arange(len(inner))[:, None]
    outer = inner[:, None] | (np.int64(1) << si) | (np.int64(1) << sj)
    pos = basis.index(outer.ravel()).reshape(outer.shape)
    sign = parity[rows, si] * parity[rows, sj]
    pid = _pair_index_table(L)[si, sj]

    J = couplings.J
    amp = -4.0 * sign[:, :, None] * sign[:, None, :] * J[pid[:, :, None], pid[:, None, :]]
    flat = (pos[:, :, None] * dim + pos[:, None, :]).ravel()
    amp = amp.ravel()
    H = (np.bincount(flat, weights=amp.real, minlength=dim * dim)
         + 1j * np.bincount(flat, weights=amp.imag, minlength=dim * dim)).reshape(dim, dim)
    # rounding in the two accumulation orders can leave ~1e-17 asymmetry
    return 0.5 * (H + H.conj().T)


def build_xxz_hamiltonian(params: XXZParams, basis: SectorBasis) -> np.ndarray:
    """Open XXZ chain with next-nearest-neighbour zz coupling (real symmetric)."""
    L = params.L
    if basis.kind != SPIN or basis.L != L:
        raise SectorMismatch(f"need a spin sector with L={L}")
    states = basis.states
    dim = basis.dim
    H = np.zeros((dim, dim))
    spin = occupation_bits(states, L) - 0.5
    diag = np.zeros(dim)
    for i in range(L - 1):
        diag += params.J_z * spin[:, i] * spin[:, i + 1]
    for i in range(L - 2):
        diag += params.J_z_prime * spin[:, i] * spin[:, i + 2]
    H[np.diag_indices(dim)] = diag
    if params.J_xy != 0.0:
        cols = np.arange(dim)
        for i in range(L - 1):
            flip = spin[:, i] != spin[:, i + 1]
            target = basis.index(states[flip] ^ np.int64(3 << i))
            H[target, cols[flip]] += 0.5 * params.J_xy
    return H


def occupation(basis: SectorBasis, site: int = 0) -> np.ndarray:
    if not 0 <= site < basis.L:
        raise InvalidSite(f"site {site} outside [0, {basis.L})")
    return ((basis.states >> site) & 1).astype(float)


def spin_z(basis: SectorBasis, site: int = 0) -> np.ndarray:
    return occupation(basis, site) - 0.5


def build_observable_diagonal(kind: str, basis: SectorBasis, site: int = 0) -> np.ndarray:
    """``"occupation"`` gives n_site, ``"spin_z"`` gives Sz_site, both as diagonals."""
    if kind == "occupation":
        return occupation(basis, site)
    if kind == "spin_z":
        return spin_z(basis, site)
    raise ValueError(f"unknown observable {kind!r}")


def build_gue(dim: int, seed: int) -> np.ndarray:
    """GUE matrix with entry variance 1/dim (semicircle support [-2, 2])."""
    if dim < 1:
        raise InvalidSize(f"GUE dimension must be positive, got {dim}")
    g = GaussianStream(seed)
    H = np.zeros((dim, dim), dtype=complex)
    H[np.diag_indices(dim)] = g.normal(dim) / np.sqrt(dim)
    iu = np.triu_indices(dim, k=1)
    z = g.normal(2 * len(iu[0])) / np.sqrt(2 * dim)
    H[iu] = z[0::2] + 1j * z[1::2]
    H[iu[1], iu[0]] = np.conj(H[iu])
    return H
