"""Traceless Hermitian operator basis and state/measurement decompositions.

The basis is the generalized Gell-Mann family rescaled to unit
Hilbert-Schmidt norm, Tr(G_i G_j) = delta_ij, so that a state splits as
rho = 1/d + sum_i a_i G_i with real coefficients a_i, and any Hermitian
measurement element as Pi = b + sum_i c_i G_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class OperatorBasis:
    """Ordered traceless Hermitian basis for a given dimension.

    gammas has shape (dim^2 - 1, dim, dim); order is symmetric off-diagonal
    pairs (j < k), antisymmetric pairs (j < k), then diagonal generators.
    """

    dim: int
    gammas: np.ndarray

    @property
    def size(self) -> int:
        return self.dim * self.dim - 1


@lru_cache(maxsize=None)
def gell_mann_basis(d: int) -> OperatorBasis:
    """Unit-Hilbert-Schmidt-norm SU(d) generators in a fixed deterministic order."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    mats = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m / np.sqrt(2.0))
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1.0j
            m[k, j] = 1.0j
            mats.append(m / np.sqrt(2.0))
    for l in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -float(l)
        mats.append(m / np.sqrt(l * (l + 1.0)))
    gammas = np.array(mats) if mats else np.zeros((0, d, d), dtype=complex)
    gammas.setflags(write=False)
    return OperatorBasis(dim=d, gammas=gammas)


def _check_square(op: np.ndarray, dim: int, what: str) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (dim, dim):
        raise ValueError(f"{what} has shape {op.shape}, expected ({dim}, {dim})")
    return op


def bloch_decompose(rho: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Coefficients a_i = Tr(rho G_i) of a state in the traceless basis."""
    rho = _check_square(rho, basis.dim, "state")
    return np.einsum("ij,nji->n", rho, basis.gammas).real


def bloch_compose(a: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Rebuild 1/d + sum_i a_i G_i from traceless-basis coefficients."""
    a = np.asarray(a, dtype=float)
    if a.shape != (basis.size,):
        raise ValueError(f"coefficient vector has shape {a.shape}, expected ({basis.size},)")
    rho = np.eye(basis.dim, dtype=complex) / basis.dim
    if basis.size:
        rho = rho + np.einsum("n,nij->ij", a, basis.gammas)
    return rho


def povm_decompose(pi: np.ndarray, basis: OperatorBasis) -> tuple[float, np.ndarray]:
    """Offset and traceless-basis coefficients of a Hermitian element.

    Returns (b, c) with b = Tr(pi)/d and c_i = Tr(pi G_i), so that
    pi = b + sum_i c_i G_i exactly.
    """
    pi = _check_square(pi, basis.dim, "measurement element")
    b = float(np.trace(pi).real) / basis.dim
    c = np.einsum("ij,nji->n", pi, basis.gammas).real
    return b, c


def validate_density_matrix(
    rho: np.ndarray,
    herm_tol: float = 1e-10,
    eig_tol: float = 1e-10,
    trace_tol: float = 1e-10,
) -> None:
    """Raise unless rho is Hermitian, positive semidefinite and unit trace."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm_dev = np.abs(rho - rho.conj().T).max()
    if herm_dev > herm_tol:
        raise ValueError(f"density matrix is not Hermitian: deviation {herm_dev:.2e}")
    trace_dev = abs(np.trace(rho) - 1.0)
    if trace_dev > trace_tol:
        raise ValueError(f"density matrix trace deviates from 1 by {trace_dev:.2e}")
    min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if min_eig < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {min_eig:.2e}")


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a full-rank random state from the Ginibre ensemble."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
