"""Dense Hermitian eigensolver wrapper, eigenbasis transforms and the seeded
Gaussian stream used by every random construction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, NotHermitian

HERMITIAN_RTOL = 1e-12
_SEED_MASK = (1 << 64) - 1


class GaussianStream:
    """Deterministic standard-normal stream.

    PCG64 uniforms are turned into normals pairwise with Box-Muller, so the
    sequence depends only on the seed and not on how draws are chunked.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _SEED_MASK
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self._spare = np.empty(0)

    def normal(self, n: int) -> np.ndarray:
        n = int(n)
        out = np.empty(n)
        take = min(n, len(self._spare))
        out[:take] = self._spare[:take]
        self._spare = self._spare[take:]
        need = n - take
        if need:
            pairs = (need + 1) // 2
            u = self._rng.random(2 * pairs)
            # 1 - u lies in (0, 1], keeps the log finite
            radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
            theta = 2.0 * np.pi * u[1::2]
            z = np.empty(2 * pairs)
            z[0::2] = radius * np.cos(theta)
            z[1::2] = radius * np.sin(theta)
            out[take:] = z[:need]
            self._spare = z[need:]
        return out

    def __iter__(self):
        return self

    def __next__(self) -> float:
        return float(self.normal(1)[0])


def gaussian_stream(seed: int) -> GaussianStream:
    return GaussianStream(seed)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    res = hermiticity_residual(m)
    if res > rtol * scale:
        raise NotHermitian(f"Hermiticity residual {res:.3e} exceeds {rtol:g} * {scale:.3e}")


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of every column made real and positive
    idx = np.argmax(np.abs(vecs), axis=0)
    pivot = vecs[idx, np.arange(vecs.shape[1])]
    phase = pivot / np.abs(pivot)
    return vecs * phase.conj()[None, :]


def eigh(matrix: np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a dense Hermitian matrix.

    Eigenvalues ascend; the eigenvector phase convention makes the
    largest-magnitude entry of each column real positive. Already diagonal
    input is returned exactly, without iteration.
    """
    m = np.asarray(matrix)
    check_hermitian(m)
    n = m.shape[0]
    off = m - np.diag(np.diag(m))
    if not np.any(off):
        d = np.real(np.diag(m)).astype(float)
        order = np.argsort(d, kind="stable")
        vecs = np.zeros((n, n), dtype=m.dtype if np.iscomplexobj(m) else float)
        vecs[order, np.arange(n)] = 1.0
        return EigenDecomposition(d[order], vecs)
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return EigenDecomposition(vals, _fix_phases(vecs))


def to_eigenbasis(diag_observable, eigenvectors: np.ndarray) -> np.ndarray:
    """Matrix elements ``A_mn = sum_k conj(V_km) d_k V_kn`` of a diagonal observable."""
    d = np.asarray(diag_observable, dtype=float)
    v = np.asarray(eigenvectors)
    if v.ndim != 2 or v.shape[0] != len(d):
        raise DimensionMismatch(f"observable length {len(d)} vs eigenvectors {v.shape}")
    a = (v.conj().T * d[None, :]) @ v
    # exact Hermitian symmetrisation; the product is Hermitian up to rounding
    return 0.5 * (a + a.conj().T)
