"""Vortex state preparation and synthetic intensity scans.

Stands in for the optical bench: prepares superposition states, evaluates
the ideal pixel probabilities through the induced POVM, and draws Poisson
photon counts from them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .modes import ModeIndex, Subspace
from .povm import PixelGrid, PovmSet


@dataclass(frozen=True)
class StateSpec:
    """A pure superposition of modes; coefficients normalized on construction."""

    terms: tuple[tuple[ModeIndex, complex], ...]

    def __post_init__(self):
        terms = tuple((m, complex(c)) for m, c in self.terms)
        norm = np.sqrt(sum(abs(c) ** 2 for _, c in terms))
        if norm == 0.0:
            raise ValueError("state must have at least one nonzero coefficient")
        object.__setattr__(self, "terms", tuple((m, c / norm) for m, c in terms))


@dataclass(frozen=True)
class IntensityImage:
    """Per-pixel intensity data on a grid, as probabilities or photon counts.

    remainder carries the closure outcome (light outside the pixel set);
    None when the POVM had no closure element or the outcome was masked.
    """

    grid: PixelGrid
    values: np.ndarray
    kind: str  # "probability" or "counts"
    remainder: float | None = None
    total_photons: int | None = None
    seed: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_pixels,):
            raise ValueError(
                f"expected {self.grid.n_pixels} pixel values, got shape {values.shape}"
            )
        if self.kind not in ("probability", "counts"):
            raise ValueError(f"unknown image kind {self.kind!r}")
        if values.min() < 0.0:
            raise ValueError(f"negative intensity value {values.min():.3e}")
        if self.kind == "probability":
            total = values.sum() + (self.remainder or 0.0)
            if total > 1.0 + 1e-8:
                raise ValueError(f"probabilities sum to {total}, above 1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def make_state(spec: StateSpec, s: Subspace) -> np.ndarray:
    """Rank-one density matrix of the normalized superposition in subspace coordinates."""
    psi = np.zeros(s.dim, dtype=complex)
    for mode, coeff in spec.terms:
        psi[s.index(mode)] += coeff
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("state coefficients cancel to zero")
    psi /= norm
    return np.outer(psi, psi.conj())


def ideal_intensity(rho: np.ndarray, povm: PovmSet) -> IntensityImage:
    """Noise-free outcome probabilities of the state, one value per pixel.

    The closure outcome is excluded from the pixel data and reported via the
    remainder field.
    """
    if povm.grid is None:
        raise ValueError("POVM carries no pixel grid; cannot form an image")
    probs = povm.probabilities(rho)
    if probs.min() < -1e-10:
        raise ValueError(f"broken POVM: negative outcome probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    remainder = None
    if povm.closure_index is not None:
        remainder = float(probs[povm.closure_index])
        probs = np.delete(probs, povm.closure_index)
    return IntensityImage(grid=povm.grid, values=probs, kind="probability", remainder=remainder)


def add_noise(
    image: IntensityImage,
    total_photons: int,
    seed: int,
    read_noise_sigma: float = 0.0,
    mask_remainder: bool = False,
) -> IntensityImage:
    """Draw independent Poisson counts with mean total_photons per unit probability.

    The closure outcome is sampled as well (photons missing the pixel set)
    unless mask_remainder is set, which emulates a detector that only reports
    pixels.  Optional Gaussian read noise is added to the pixel counts and
    clipped at zero.  Deterministic for a fixed seed.
    """
    if image.kind != "probability":
        raise ValueError("noise is added to probability images only")
    if total_photons < 0:
        raise ValueError(f"total_photons must be nonnegative, got {total_photons}")
    rng = np.random.default_rng(seed)
    means = image.values * total_photons
    if image.remainder is not None:
        means = np.append(means, image.remainder * total_photons)
    counts = rng.poisson(means).astype(float)
    remainder = None
    if image.remainder is not None:
        remainder = float(counts[-1])
        counts = counts[:-1]
    if read_noise_sigma > 0.0:
        counts = np.clip(np.rint(counts + rng.normal(0.0, read_noise_sigma, counts.shape)), 0.0, None)
    if mask_remainder:
        remainder = None
    return IntensityImage(
        grid=image.grid,
        values=counts,
        kind="counts",
        remainder=remainder,
        total_photons=total_photons,
        seed=seed,
    )
