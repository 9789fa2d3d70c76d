"""Maximum-likelihood state estimation from measured counts.

Implements the diluted fixed-point iteration
rho <- N[(1 + eps R) rho (1 + eps R)] with R = sum_k (f_k / p_k) Pi_k,
which increases the Poissonian log-likelihood monotonically once eps is
small enough; eps is halved whenever a step would decrease it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .completeness import is_informationally_complete
from .modes import Subspace
from .povm import PovmSet

logger = logging.getLogger(__name__)

_EPS_FLOOR_FACTOR = 2.0**-24


@dataclass(frozen=True)
class MlOptions:
    """Iteration knobs for the maximum-likelihood fit.

    stop_tol is the threshold on the per-iteration log-likelihood increase;
    the default start is the maximally mixed state, which gives every
    outcome positive probability.
    """

    max_iters: int = 5000
    dilution: float = 1.0
    stop_tol: float = 1e-12
    start: str = "maximally_mixed"
    start_state: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if not 0.0 < self.dilution <= 1.0:
            raise ValueError(f"dilution must be in (0, 1], got {self.dilution}")
        if self.stop_tol <= 0.0:
            raise ValueError(f"stop_tol must be positive, got {self.stop_tol}")
        if self.start not in ("maximally_mixed", "provided"):
            raise ValueError(f"unknown start {self.start!r}")
        if self.start == "provided" and self.start_state is None:
            raise ValueError("start='provided' requires start_state")


@dataclass
class MlResult:
    rho_hat: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    unique: bool
    gauge_note: str = ""
    ll_history: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_eigenvalue: float = 0.0
    max_trace_error: float = 0.0


def _check_counts(counts, povm: PovmSet) -> np.ndarray:
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (povm.n_elements,):
        raise ValueError(
            f"counts length {counts.shape} does not match the {povm.n_elements} POVM elements"
        )
    if counts.min() < 0.0:
        raise ValueError(f"counts must be nonnegative, got minimum {counts.min()}")
    return counts


def log_likelihood(rho: np.ndarray, povm: PovmSet, counts) -> float:
    """Poissonian log-likelihood sum_k counts_k ln Tr(rho Pi_k).

    Outcomes with zero counts contribute nothing; a zero-probability outcome
    holding counts makes the data impossible and returns -inf.
    """
    counts = _check_counts(counts, povm)
    probs = povm.probabilities(rho)
    mask = counts > 0.0
    if np.any(probs[mask] <= 0.0):
        k = int(np.nonzero(mask & (probs <= 0.0))[0][0])
        logger.warning(
            "outcome %d has zero probability but %g counts; log-likelihood is -inf", k, counts[k]
        )
        return float("-inf")
    return float(np.sum(counts[mask] * np.log(probs[mask])))


def ml_reconstruct(
    povm: PovmSet,
    counts,
    opts: MlOptions = MlOptions(),
    rel_tol: float = 1e-9,
) -> MlResult:
    """Fit a density matrix to measured counts by the diluted iteration.

    Stops when the accepted per-iteration log-likelihood gain drops below
    opts.stop_tol, when no dilution can improve it further, or at
    opts.max_iters (reported via converged=False).  When the POVM is
    rank-deficient the fit still runs but is flagged non-unique: the
    estimate is one representative of a likelihood-equivalent family.
    """
    counts = _check_counts(counts, povm)
    d = povm.dim
    total = counts.sum()
    freqs = counts / total if total > 0.0 else counts
    elements = povm.elements

    if opts.start == "provided":
        rho = np.asarray(opts.start_state, dtype=complex).copy()
        if rho.shape != (d, d):
            raise ValueError(f"start_state has shape {rho.shape}, expected ({d}, {d})")
    else:
        rho = np.eye(d, dtype=complex) / d

    def _logl(r: np.ndarray) -> float:
        p = np.einsum("kij,ji->k", elements, r).real
        mask = counts > 0.0
        return float(np.sum(counts[mask] * np.log(np.maximum(p[mask], 1e-300))))

    eps = opts.dilution
    eps_floor = opts.dilution * _EPS_FLOOR_FACTOR
    ll = _logl(rho)
    history = [ll]
    min_eig = float(np.linalg.eigvalsh(rho).min())
    max_trace_err = abs(float(np.trace(rho).real) - 1.0)
    iterations = 0
    converged = False
    identity = np.eye(d)

    for _ in range(opts.max_iters):
        p = np.einsum("kij,ji->k", elements, rho).real
        weights = np.where(freqs > 0.0, freqs / np.maximum(p, 1e-300), 0.0)
        r_op = np.einsum("k,kij->ij", weights, elements)
        r_op = 0.5 * (r_op + r_op.conj().T)
        while True:
            step = identity + eps * r_op
            cand = step @ rho @ step
            cand = cand / np.trace(cand).real
            cand = 0.5 * (cand + cand.conj().T)
            ll_new = _logl(cand)
            if ll_new >= ll or eps <= eps_floor:
                break
            eps *= 0.5
        if ll_new < ll:
            # even the smallest dilution cannot improve: numerical optimum
            converged = True
            break
        gain = ll_new - ll
        rho, ll = cand, ll_new
        iterations += 1
        history.append(ll)
        min_eig = min(min_eig, float(np.linalg.eigvalsh(rho).min()))
        max_trace_err = max(max_trace_err, abs(float(np.trace(rho).real) - 1.0))
        if gain < opts.stop_tol:
            converged = True
            break

    report = is_informationally_complete(povm, rel_tol)
    gauge_note = ""
    if not report.complete:
        missing = report.required - report.rank
        gauge_note = (
            f"POVM is rank-deficient: {missing} unmeasured Bloch direction(s); "
            "the estimate is one representative of a likelihood-equivalent family"
        )
    return MlResult(
        rho_hat=rho,
        log_likelihood=ll,
        iterations=iterations,
        converged=converged,
        unique=report.complete,
        gauge_note=gauge_note,
        ll_history=np.array(history),
        min_eigenvalue=min_eig,
        max_trace_error=max_trace_err,
    )


def _psd_sqrt(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    if w.min() < -tol:
        raise ValueError(f"matrix is not positive semidefinite: eigenvalue {w.min():.3e}")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    sq = _psd_sqrt(rho)
    inner = _psd_sqrt(sq @ sigma @ sq)
    val = float(np.trace(inner).real) ** 2
    return min(max(val, 0.0), 1.0)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return 0.5 * float(np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


@dataclass(frozen=True)
class RenderedMatrix:
    """Real and imaginary parts of a density matrix with row/column labels."""

    labels: tuple[str, ...]
    real: np.ndarray
    imag: np.ndarray


def render_matrix(rho: np.ndarray, s: Subspace | None = None) -> RenderedMatrix:
    """Split a density matrix into labeled real and imaginary tables."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if s is not None:
        if s.dim != d:
            raise ValueError(f"subspace dimension {s.dim} does not match matrix size {d}")
        labels = tuple(f"l{m.ell}p{m.p}" for m in s.modes)
    else:
        labels = tuple(f"i{k}" for k in range(d))
    return RenderedMatrix(labels=labels, real=rho.real.copy(), imag=rho.imag.copy())
