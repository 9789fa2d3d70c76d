"""Laguerre-Gauss transverse modes and truncated reconstruction subspaces.

Coordinates are dimensionless waist units: the fundamental mode is
proportional to exp(-r^2) with r^2 = x^2 + y^2.  All modes are normalized
to unit L2 norm over the transverse plane, so |amplitude|^2 integrates to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, pi

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class ModeIndex:
    """A single Laguerre-Gauss mode label: topological charge and radial index."""

    ell: int
    p: int

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"radial index must be nonnegative, got p={self.p}")

    def __repr__(self):
        return f"LG({self.ell},{self.p})"


@dataclass(frozen=True)
class TruncationSpec:
    """Rectangular truncation bounds for a reconstruction subspace."""

    p_min: int
    p_max: int
    ell_min: int
    ell_max: int

    def __post_init__(self):
        if self.p_min < 0:
            raise ValueError(f"p_min must be nonnegative, got {self.p_min}")
        if self.p_min > self.p_max:
            raise ValueError(f"empty radial range: p_min={self.p_min} > p_max={self.p_max}")
        if self.ell_min > self.ell_max:
            raise ValueError(
                f"empty vorticity range: ell_min={self.ell_min} > ell_max={self.ell_max}"
            )


@dataclass(frozen=True)
class Subspace:
    """An ordered set of distinct modes spanning the reconstruction space."""

    modes: tuple[ModeIndex, ...]

    def __post_init__(self):
        if not self.modes:
            raise ValueError("subspace must contain at least one mode")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("subspace modes must be distinct")

    @property
    def dim(self) -> int:
        return len(self.modes)

    def index(self, mode: ModeIndex) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"{mode} is not in the subspace") from None

    def __contains__(self, mode: ModeIndex) -> bool:
        return mode in self.modes


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product midpoint rule on [-half_width, half_width]^2.

    The midpoint rule is spectrally accurate for these smooth, rapidly
    decaying integrands, so the defaults are far better than the 1e-6
    tolerance used in orthonormality checks.
    """

    half_width: float = 5.0
    points_per_axis: int = 400
    tail_tol: float = 1e-8

    def __post_init__(self):
        if self.half_width <= 0 or self.points_per_axis < 1:
            raise ValueError("quadrature window and resolution must be positive")

    def nodes(self) -> tuple[np.ndarray, np.ndarray, float]:
        """Return meshgrid arrays (X, Y) of midpoints and the cell weight."""
        h = 2.0 * self.half_width / self.points_per_axis
        axis = -self.half_width + (np.arange(self.points_per_axis) + 0.5) * h
        X, Y = np.meshgrid(axis, axis)
        return X, Y, h * h


def _norm_const(ell: int, p: int) -> float:
    a = abs(ell)
    return np.sqrt(2.0 ** (a + 1) * factorial(p) / (pi * factorial(p + a)))


def _laguerre(p: int, alpha: int, x: np.ndarray) -> np.ndarray:
    # Three-term recurrence in the degree; stable for the moderate p used here.
    prev = np.ones_like(x)
    if p == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(2, p + 1):
        prev, cur = cur, ((2 * k - 1 + alpha - x) * cur - (k - 1 + alpha) * prev) / k
    return cur


def lg_amplitude(mode: ModeIndex, x, y):
    """Evaluate the normalized mode amplitude at transverse position(s) (x, y).

    Accepts scalars or broadcastable arrays; returns a complex scalar or array.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    a = abs(mode.ell)
    out = (
        _norm_const(mode.ell, mode.p)
        * r2 ** (a / 2.0)
        * _laguerre(mode.p, a, 2.0 * r2)
        * np.exp(-r2)
        * np.exp(1j * mode.ell * np.arctan2(y, x))
    )
    return complex(out) if out.ndim == 0 else out


def mode_amplitudes(s: Subspace, x, y) -> np.ndarray:
    """Stack lg_amplitude over all subspace modes along a new leading axis."""
    return np.stack([np.atleast_1d(lg_amplitude(m, x, y)) for m in s.modes])


def radial_polynomial_coefficients(mode: ModeIndex) -> np.ndarray:
    """Monomial coefficients v with radial profile sum_k v[k] r^k times exp(-r^2).

    This is the direct series form of the mode (the azimuthal phase factored
    out), exact in rational arithmetic up to the float conversion.
    """
    a = abs(mode.ell)
    p = mode.p
    v = np.zeros(a + 2 * p + 1)
    for j in range(p + 1):
        # L_p^a(u) = sum_j (-1)^j C(p+a, p-j) u^j / j!, evaluated at u = 2 r^2
        v[a + 2 * j] = _norm_const(mode.ell, p) * (-1) ** j * comb(p + a, p - j) * 2.0**j / factorial(j)
    return v


@lru_cache(maxsize=None)
def window_tail_mass(mode: ModeIndex, half_width: float) -> float:
    """Fraction of the mode's intensity outside the disk of radius half_width.

    Upper-bounds the mass outside the square window of the same half width.
    """
    a = abs(mode.ell)
    p = mode.p
    scale = factorial(p) / factorial(p + a)

    def integrand(u):
        return u**a * _laguerre(p, a, np.asarray(u)) ** 2 * np.exp(-u)

    inside, _ = integrate.quad(integrand, 0.0, 2.0 * half_width**2, limit=200)
    return max(0.0, 1.0 - scale * inside)


def mode_overlap(a: ModeIndex, b: ModeIndex, quad: QuadratureSpec = QuadratureSpec()) -> complex:
    """Numerical overlap integral of two modes over the quadrature window."""
    for mode in (a, b):
        tail = window_tail_mass(mode, quad.half_width)
        if tail > quad.tail_tol:
            raise ValueError(
                f"quadrature window half_width={quad.half_width} too small for {mode}: "
                f"tail mass {tail:.2e} exceeds {quad.tail_tol:.2e}"
            )
    X, Y, w = quad.nodes()
    fa = lg_amplitude(a, X, Y)
    fb = lg_amplitude(b, X, Y)
    return complex(np.sum(np.conj(fa) * fb) * w)


def gram_matrix(s: Subspace, quad: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Pairwise overlap matrix of the subspace modes under the quadrature rule."""
    for mode in s.modes:
        tail = window_tail_mass(mode, quad.half_width)
        if tail > quad.tail_tol:
            raise ValueError(
                f"quadrature window half_width={quad.half_width} too small for {mode}: "
                f"tail mass {tail:.2e} exceeds {quad.tail_tol:.2e}"
            )
    X, Y, w = quad.nodes()
    amps = mode_amplitudes(s, X, Y).reshape(s.dim, -1)
    return (amps.conj() @ amps.T) * w


def build_subspace(spec: TruncationSpec) -> Subspace:
    """Enumerate all modes in the truncation rectangle, ordered by (p, ell)."""
    modes = tuple(
        ModeIndex(ell, p)
        for p in range(spec.p_min, spec.p_max + 1)
        for ell in range(spec.ell_min, spec.ell_max + 1)
    )
    return Subspace(modes)


def ell_shift(s: Subspace, delta: int) -> Subspace:
    """Shift every topological charge by a fixed amount.

    Models a fixed unitary applied before detection (a charged fork-like
    hologram adding delta units of orbital angular momentum per photon);
    state coordinates are unchanged, only the mode labels move.
    """
    return Subspace(tuple(ModeIndex(m.ell + delta, m.p) for m in s.modes))


def ell_negation_permutation(s: Subspace) -> np.ndarray:
    """Index permutation sending each mode (ell, p) to (-ell, p).

    Raises if the subspace is not closed under vorticity negation.
    """
    perm = np.empty(s.dim, dtype=int)
    for i, m in enumerate(s.modes):
        flipped = ModeIndex(-m.ell, m.p)
        if flipped not in s:
            raise ValueError(f"subspace is not symmetric under ell negation: missing {flipped}")
        perm[i] = s.index(flipped)
    return perm
