"""POVMs induced by pixelized position detection in a mode subspace.

A CCD pixel at (x, y) acts as a projector onto the position state weighted
by the pixel area.  Restricted to a truncated mode subspace these projectors
stop commuting and, summed over the grid plus a closure element, form a POVM.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .modes import Subspace, mode_amplitudes

CLOSURE_POLICIES = ("auto", "complement", "rescale")

# Tolerances for accepting the complement element as positive semidefinite.
_CLOSURE_EIG_TOL = 1e-8


@dataclass(frozen=True)
class PixelGrid:
    """Rectangular detector grid spanning [-half_width, half_width]^2.

    Pixel centers are ordered row-major with y as the outer loop, matching
    the on-disk image layout.
    """

    nx: int
    ny: int
    half_width: float

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must have positive pixel counts, got {self.nx}x{self.ny}")
        if self.half_width <= 0:
            raise ValueError(f"grid half_width must be positive, got {self.half_width}")

    @property
    def n_pixels(self) -> int:
        return self.nx * self.ny

    @property
    def pixel_area(self) -> float:
        return (2.0 * self.half_width / self.nx) * (2.0 * self.half_width / self.ny)

    @cached_property
    def centers(self) -> np.ndarray:
        """(n_pixels, 2) array of pixel-center coordinates."""
        hx = 2.0 * self.half_width / self.nx
        hy = 2.0 * self.half_width / self.ny
        xs = -self.half_width + (np.arange(self.nx) + 0.5) * hx
        ys = -self.half_width + (np.arange(self.ny) + 0.5) * hy
        X, Y = np.meshgrid(xs, ys)
        out = np.column_stack([X.ravel(), Y.ravel()])
        out.setflags(write=False)
        return out


@dataclass(frozen=True)
class PovmSet:
    """Ordered measurement elements acting on a subspace.

    completeness_defect is the spectral distance of the raw pixel-element sum
    from the identity, recorded before any closure manipulation.
    """

    elements: np.ndarray
    subspace: Subspace
    completeness_defect: float
    closure_index: int | None = None
    closure_applied: str | None = None
    grid: PixelGrid | None = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        """Outcome probabilities Tr(rho Pi_k) for every element."""
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state has shape {rho.shape}, expected ({self.dim}, {self.dim})")
        return np.einsum("kij,ji->k", self.elements, rho).real


def point_projector(s: Subspace, x: float, y: float, weight: float = 1.0) -> np.ndarray:
    """Rank-one position projector restricted to the subspace.

    Entry (s, s') is weight * conj(phi_s(x, y)) * phi_s'(x, y).
    """
    v = mode_amplitudes(s, x, y)[:, 0]
    return weight * np.outer(v.conj(), v)


def pixel_projector(grid: PixelGrid, k: int, s: Subspace) -> np.ndarray:
    """Measurement element of pixel k: the area-weighted position projector."""
    if not 0 <= k < grid.n_pixels:
        raise ValueError(f"pixel index {k} out of range for {grid.nx}x{grid.ny} grid")
    x, y = grid.centers[k]
    return point_projector(s, x, y, weight=grid.pixel_area)


def _pixel_elements(grid: PixelGrid, s: Subspace) -> np.ndarray:
    pts = grid.centers
    amps = mode_amplitudes(s, pts[:, 0], pts[:, 1])  # (d, n_pixels)
    return grid.pixel_area * np.einsum("sk,tk->kst", amps.conj(), amps)


def _closure_complement(total: np.ndarray) -> np.ndarray:
    """Complement element identity - total, clipping roundoff-negative eigenvalues."""
    d = total.shape[0]
    rem = np.eye(d) - total
    w, v = np.linalg.eigh(rem)
    if w.min() < -_CLOSURE_EIG_TOL:
        raise ValueError(
            f"closure infeasible: complement element has eigenvalue {w.min():.3e}"
            f" < -{_CLOSURE_EIG_TOL:.0e}"
        )
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def induced_povm(grid: PixelGrid, s: Subspace, closure: str = "auto") -> PovmSet:
    """Assemble pixel projectors over the grid and close them into a POVM.

    Closure policies:
      complement -- append identity minus the element sum; rejects the grid
        if that complement is indefinite beyond tolerance.
      rescale    -- divide all elements by the largest eigenvalue of their
        sum (so the complement is positive by construction), then append the
        complement.
      auto       -- complement when feasible, otherwise rescale.
    """
    if closure not in CLOSURE_POLICIES:
        raise ValueError(f"unknown closure policy {closure!r}; expected one of {CLOSURE_POLICIES}")
    elements = _pixel_elements(grid, s)
    total = elements.sum(axis=0)
    d = s.dim
    defect = float(np.abs(np.linalg.eigvalsh(total - np.eye(d))).max())

    applied = closure
    if closure == "auto":
        applied = "complement" if np.linalg.eigvalsh(total).max() <= 1.0 + _CLOSURE_EIG_TOL else "rescale"
    if applied == "rescale":
        lam = float(np.linalg.eigvalsh(total).max())
        elements = elements / lam
        total = total / lam
    rem = _closure_complement(total)
    elements = np.concatenate([elements, rem[None]], axis=0)
    elements.setflags(write=False)
    return PovmSet(
        elements=elements,
        subspace=s,
        completeness_defect=defect,
        closure_index=elements.shape[0] - 1,
        closure_applied=applied,
        grid=grid,
    )


def commutator_norm(a: np.ndarray, b: np.ndarray, norm_kind: str = "frobenius") -> float:
    """Norm of the commutator ab - ba, in Frobenius or spectral norm."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"operands must be square matrices of equal shape, got {a.shape} and {b.shape}")
    comm = a @ b - b @ a
    if norm_kind == "frobenius":
        return float(np.linalg.norm(comm, "fro"))
    if norm_kind == "spectral":
        return float(np.linalg.norm(comm, 2))
    raise ValueError(f"unknown norm kind {norm_kind!r}; expected 'frobenius' or 'spectral'")


def incompatibility_map(
    pixel_a: tuple[float, float],
    pixel_b: tuple[float, float],
    p_cutoffs,
    ell_cutoffs,
    norm_kind: str = "frobenius",
) -> np.ndarray:
    """Commutator norms of two pixel detections across truncation choices.

    Entry [i, j] uses the subspace p = 0..p_cutoffs[i],
    ell = -ell_cutoffs[j]..ell_cutoffs[j].  Unit pixel weight: the overall
    area factor only rescales the map.
    """
    from .modes import ModeIndex

    p_cutoffs = list(p_cutoffs)
    ell_cutoffs = list(ell_cutoffs)
    if not p_cutoffs or not ell_cutoffs:
        raise ValueError("cutoff ranges must be nonempty")
    out = np.empty((len(p_cutoffs), len(ell_cutoffs)))
    for i, pc in enumerate(p_cutoffs):
        for j, lc in enumerate(ell_cutoffs):
            s = Subspace(
                tuple(ModeIndex(ell, p) for p in range(pc + 1) for ell in range(-lc, lc + 1))
            )
            proj_a = point_projector(s, *pixel_a)
            proj_b = point_projector(s, *pixel_b)
            out[i, j] = commutator_norm(proj_a, proj_b, norm_kind)
    return out
