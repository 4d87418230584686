"""Symmetry-sector bases in the occupation-number (bitmask) representation.

Site ``p`` is bit ``p`` of the integer state; site 0 is the least significant
bit. For spins a set bit means spin up.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import InvalidSector, InvalidSite

MAX_SITES = 20

FERMION = "fermion"
SPIN = "spin"


def popcount(x):
    """Number of set bits; works elementwise on integer arrays."""
    if isinstance(x, np.ndarray):
        x = x.astype(np.int64)
        count = np.zeros_like(x)
        while np.any(x):
            count += x & 1
            x = x >> 1
        return count
    return bin(int(x)).count("1")


@dataclass(frozen=True)
class SectorBasis:
    """All basis states of one conserved-charge sector, in ascending order.

    ``charge`` is the particle number for fermions and ``2 * Sz_total`` for
    spins.
    """

    L: int
    charge: int
    kind: str
    states: np.ndarray
    index_of: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def n_set(self) -> int:
        """Number of set bits shared by every state in the sector."""
        if self.kind == FERMION:
            return self.charge
        return (self.L + self.charge) // 2

    def index(self, states) -> np.ndarray:
        """Vectorised inverse of ``states``. Raises KeyError for foreign states."""
        states = np.asarray(states, dtype=np.int64)
        pos = np.searchsorted(self.states, states)
        pos = np.clip(pos, 0, self.dim - 1)
        if not np.array_equal(self.states[pos], states):
            raise KeyError("state outside sector")
        return pos


def sector_dimension(L: int, n_set: int) -> int:
    if not 0 <= n_set <= L:
        return 0
    return comb(L, n_set)


def _n_set_for(L, charge, kind):
    if not 2 <= L <= MAX_SITES:
        raise InvalidSector(f"L={L} outside [2, {MAX_SITES}]")
    if kind == FERMION:
        if not 0 <= charge <= L:
            raise InvalidSector(f"particle number {charge} outside [0, {L}]")
        return charge
    if kind == SPIN:
        if abs(charge) > L or (L + charge) % 2:
            raise InvalidSector(f"2*Sz={charge} incompatible with L={L}")
        return (L + charge) // 2
    raise InvalidSector(f"unknown sector kind {kind!r}")


def enumerate_sector(L: int, charge: int, kind: str = FERMION) -> SectorBasis:
    """Enumerate every ``L``-site state carrying ``charge``.

    >>> enumerate_sector(4, 2).dim
    6
    >>> enumerate_sector(4, 0, kind="spin").dim
    6
    """
    n_set = _n_set_for(L, charge, kind)
    states = sorted(sum(1 << p for p in occ) for occ in combinations(range(L), n_set))
    arr = np.array(states, dtype=np.int64)
    arr.setflags(write=False)
    return SectorBasis(L=L, charge=charge, kind=kind, states=arr,
                       index_of={s: i for i, s in enumerate(states)})


def fermion_apply(mode: str, site: int, state: int, L: int = MAX_SITES):
    """Apply ``c_site`` (``mode="annihilate"``) or ``c_site^dagger`` (``"create"``).

    Returns ``(new_state, sign)`` or ``None`` if the result vanishes. The sign is
    ``(-1)**(occupied sites below site)``.
    """
    if not 0 <= site < L:
        raise InvalidSite(f"site {site} outside [0, {L})")
    mask = 1 << site
    occupied = bool(state & mask)
    if mode == "annihilate":
        if not occupied:
            return None
    elif mode == "create":
        if occupied:
            return None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sign = -1 if popcount(state & (mask - 1)) % 2 else 1
    return state ^ mask, sign


def spin_apply(term: str, sites, state: int):
    """Act with one spin-1/2 term on a basis state (``S = sigma / 2``).

    ``term`` is ``"exchange"`` for ``(S+_i S-_j + S-_i S+_j)/2``, ``"zz"`` for
    ``Sz_i Sz_j`` or ``"z"`` for ``Sz_i``. Returns a list of
    ``(state, amplitude)``.
    """
    if term == "z":
        i = sites[0] if isinstance(sites, (tuple, list)) else sites
        return [(state, 0.5 if state >> i & 1 else -0.5)]
    i, j = sites
    if i == j:
        raise InvalidSite("two-site term needs distinct sites")
    bi, bj = state >> i & 1, state >> j & 1
    if term == "zz":
        return [(state, 0.25 if bi == bj else -0.25)]
    if term == "exchange":
        if bi == bj:
            return []
        return [(state ^ (1 << i | 1 << j), 0.5)]
    raise ValueError(f"unknown spin term {term!r}")


def occupation_bits(states: np.ndarray, L: int) -> np.ndarray:
    """(n_states, L) 0/1 matrix of site occupations."""
    return (np.asarray(states, dtype=np.int64)[:, None] >> np.arange(L)) & 1
