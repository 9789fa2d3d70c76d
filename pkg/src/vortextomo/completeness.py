"""Informational completeness of a POVM via the rank of its coefficient matrix.

Writing every element as Pi_j = b_j + sum_i c_ji G_i in the traceless
Hermitian basis turns the measurement into the affine map p = b + C a on
Bloch coefficients.  The measurement determines the state if and only if
rank(C) reaches d^2 - 1; right-singular vectors below the rank threshold
span the unmeasured directions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modes import ModeIndex, Subspace, ell_negation_permutation, radial_polynomial_coefficients
from .operator_basis import OperatorBasis, gell_mann_basis
from .povm import PixelGrid, PovmSet, induced_povm


@dataclass(frozen=True)
class CoefficientMatrix:
    """Stacked traceless-basis coefficients of the POVM elements."""

    c: np.ndarray  # (n_elements, d^2 - 1)
    b: np.ndarray  # (n_elements,)
    dim: int


@dataclass(frozen=True)
class CompletenessReport:
    rank: int
    required: int
    singular_values: np.ndarray
    complete: bool
    kernel: np.ndarray  # orthonormal rows spanning the unmeasured directions


@dataclass(frozen=True)
class ScanRow:
    """One truncation step of a completeness scan.

    rank_stable records whether the rank is identical at relative tolerances
    1e-6 and 1e-12, i.e. whether the singular-value plateau is clean.
    """

    ell_cutoff: int
    d: int
    rank: int
    required: int
    complete: bool
    rank_stable: bool


def coefficient_matrix(povm: PovmSet, basis: OperatorBasis) -> CoefficientMatrix:
    """Decompose every POVM element; row order follows the element order."""
    if basis.dim != povm.dim:
        raise ValueError(f"basis dimension {basis.dim} does not match POVM dimension {povm.dim}")
    b = np.einsum("kii->k", povm.elements).real / povm.dim
    if basis.size:
        c = np.einsum("kij,nji->kn", povm.elements, basis.gammas).real
    else:
        c = np.zeros((povm.n_elements, 0))
    return CoefficientMatrix(c=c, b=b, dim=povm.dim)


def numerical_rank(c: np.ndarray, rel_tol: float = 1e-9) -> tuple[int, np.ndarray]:
    """Count singular values above rel_tol times the largest one."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] == 0:
        raise ValueError(f"expected a nonempty 2-d matrix, got shape {c.shape}")
    if rel_tol <= 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    if c.shape[1] == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(c, compute_uv=False)
    if sv[0] == 0.0:
        return 0, sv
    return int(np.count_nonzero(sv > rel_tol * sv[0])), sv


def is_informationally_complete(povm: PovmSet, rel_tol: float = 1e-9) -> CompletenessReport:
    """Rank test of the coefficient matrix, with the unmeasured directions."""
    basis = gell_mann_basis(povm.dim)
    cm = coefficient_matrix(povm, basis)
    required = povm.dim * povm.dim - 1
    if required == 0:
        return CompletenessReport(
            rank=0, required=0, singular_values=np.zeros(0), complete=True, kernel=np.zeros((0, 0))
        )
    _, sv, vh = np.linalg.svd(cm.c, full_matrices=True)
    if sv.size and sv[0] > 0.0:
        rank = int(np.count_nonzero(sv > rel_tol * sv[0]))
    else:
        rank = 0
    kernel = vh[rank:]
    return CompletenessReport(
        rank=rank,
        required=required,
        singular_values=sv,
        complete=rank >= required,
        kernel=kernel,
    )


def flip_conjugate(rho: np.ndarray, s: Subspace) -> np.ndarray:
    """Apply the vorticity-flip involution F conj(rho) F to a state.

    F permutes mode (ell, p) to (-ell, p); states related by this map produce
    identical intensity images, since opposite charges share intensity
    profiles and conjugation mirrors all interference phases consistently.
    """
    perm = ell_negation_permutation(s)
    rho = np.asarray(rho, dtype=complex)
    return rho.conj()[np.ix_(perm, perm)]


def flip_involution_matrix(s: Subspace, basis: OperatorBasis | None = None) -> np.ndarray:
    """Matrix of the flip involution on traceless-basis coefficient vectors."""
    basis = basis or gell_mann_basis(s.dim)
    flipped = np.stack([flip_conjugate(g, s) for g in basis.gammas])
    return np.einsum("nij,mji->mn", flipped, basis.gammas).real


def flip_invisible_directions(s: Subspace, basis: OperatorBasis | None = None) -> np.ndarray:
    """Orthonormal rows spanning the -1 eigenspace of the flip involution.

    These directions change sign under the flip yet leave every intensity
    unchanged, so no intensity scan can measure them.
    """
    m = flip_involution_matrix(s, basis)
    w, v = np.linalg.eigh(m)
    return v[:, w < 0.0].T


def invisible_directions(s: Subspace, basis: OperatorBasis | None = None) -> np.ndarray:
    """Orthonormal rows spanning everything a continuous intensity scan misses.

    The intensity of a state splits into azimuthal orders m = ell - ell' with
    radial factors that are polynomials times exp(-2 r^2).  Expanding each
    mode-pair product in monomials r^k gives the exact linear map from Bloch
    coefficients to intensity data; its null space is computed here in closed
    form.  Beyond the flip degeneracy this includes directions lost to
    coinciding radial profiles, e.g. distinct coherence pairs with the same
    ell - ell' and the same total |ell| + |ell'|.
    """
    basis = basis or gell_mann_basis(s.dim)
    d = s.dim
    n = basis.size
    if n == 0:
        return np.zeros((0, 0))
    ells = [m.ell for m in s.modes]
    coeffs = [radial_polynomial_coefficients(m) for m in s.modes]
    kmax = max(len(v) for v in coeffs) * 2
    blocks = []
    for order in sorted(set(lu - lv for lu in ells for lv in ells)):
        z = np.zeros((kmax, n), dtype=complex)
        for u in range(d):
            for v in range(d):
                if ells[u] - ells[v] != order:
                    continue
                prod = np.convolve(coeffs[u], coeffs[v])
                z[: prod.size] += prod[:, None] * basis.gammas[:, u, v]
        blocks.append(z)
    zmat = np.concatenate(blocks, axis=0)
    zreal = np.concatenate([zmat.real, zmat.imag], axis=0)
    _, sv, vh = np.linalg.svd(zreal, full_matrices=True)
    rank = int(np.count_nonzero(sv > 1e-10 * sv[0])) if sv.size and sv[0] > 0 else 0
    return vh[rank:]


def kernel_degeneracy_oracle(
    s: Subspace, povm: PovmSet, rel_tol: float = 1e-9, inclusion_tol: float = 1e-6
) -> bool:
    """Check that the POVM misses only analytically invisible directions.

    The subspace must be closed under ell negation.  Returns True when every
    kernel direction of the coefficient matrix lies (as a subspace inclusion
    within inclusion_tol) inside the null space of the continuous intensity
    map; vacuously True when the kernel is empty.
    """
    ell_negation_permutation(s)
    report = is_informationally_complete(povm, rel_tol)
    if report.kernel.shape[0] == 0:
        return True
    invisible = invisible_directions(s)
    proj = invisible.T @ invisible
    resid = report.kernel - report.kernel @ proj
    return bool(np.linalg.norm(resid, axis=1).max() <= inclusion_tol)


def completeness_scan(
    grid: PixelGrid,
    family: str,
    ell_cutoff_max: int,
    rel_tol: float = 1e-9,
    closure: str = "auto",
) -> list[ScanRow]:
    """Rank of the induced POVM for growing vorticity truncations at p = 0.

    family 'nonnegative' uses ell = 0..cutoff, 'symmetric' uses
    ell = -cutoff..cutoff.
    """
    if family not in ("nonnegative", "symmetric"):
        raise ValueError(f"unknown truncation family {family!r}")
    if ell_cutoff_max < 0:
        raise ValueError(f"ell_cutoff_max must be nonnegative, got {ell_cutoff_max}")
    rows = []
    for cutoff in range(ell_cutoff_max + 1):
        lo = 0 if family == "nonnegative" else -cutoff
        s = Subspace(tuple(ModeIndex(ell, 0) for ell in range(lo, cutoff + 1)))
        povm = induced_povm(grid, s, closure=closure)
        report = is_informationally_complete(povm, rel_tol)
        if report.required:
            cm = coefficient_matrix(povm, gell_mann_basis(s.dim))
            ranks = {numerical_rank(cm.c, t)[0] for t in (1e-6, rel_tol, 1e-12)}
            stable = len(ranks) == 1
        else:
            stable = True
        rows.append(
            ScanRow(
                ell_cutoff=cutoff,
                d=s.dim,
                rank=report.rank,
                required=report.required,
                complete=report.complete,
                rank_stable=stable,
            )
        )
    return rows
