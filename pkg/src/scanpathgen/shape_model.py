"""PCA over cluster shift vectors and sampling of new shifts.

Each hierarchy node stores the principal components of the shift vectors its
matched group contributed. `fit_pca` keeps the smallest number of components
that explains the requested variance fraction; `sample_weights` plus
`synthesize_shift` turn a component set back into a concrete shift.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class PrincipalComponents:
    """Mean shift plus orthonormal deformation modes with their variances."""

    mean_shift: np.ndarray
    components: np.ndarray
    variances: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.mean_shift)

    @property
    def rank(self) -> int:
        return len(self.variances)


def fit_pca(
    shifts: Sequence[Sequence[float]] | np.ndarray, variance_fraction: float = 0.95
) -> PrincipalComponents:
    """Fit mean + principal directions to a set of d-vectors.

    Uses the sample covariance (divisor n-1) of the shifts and keeps the
    smallest r components whose cumulative variance reaches
    variance_fraction of the total. A single sample (or zero total variance)
    yields rank 0.
    """
    X = np.asarray(shifts, dtype=float)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("fit_pca requires a non-empty (n, d) array of shifts")
    if not 0.0 < variance_fraction <= 1.0:
        raise ValueError(f"variance_fraction must be in (0, 1], got {variance_fraction}")
    n, d = X.shape
    mean = X.mean(axis=0)
    if n == 1:
        return PrincipalComponents(mean, np.zeros((0, d)), np.zeros(0))

    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)
    evecs = evecs[:, order]

    total = float(evals.sum())
    if total <= 0.0:
        return PrincipalComponents(mean, np.zeros((0, d)), np.zeros(0))
    cumulative = np.cumsum(evals)
    r = int(np.searchsorted(cumulative, variance_fraction * total) + 1)
    r = min(r, n - 1, d)

    components = evecs[:, :r].T.copy()
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    return PrincipalComponents(mean, components, evals[:r].copy())


def synthesize_shift(pc: PrincipalComponents, weights: Sequence[float] | np.ndarray) -> np.ndarray:
    """mean_shift + sum(weights[i] * components[i]); caller adds the parent position."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (pc.rank,):
        raise ValueError(f"expected {pc.rank} weights, got shape {w.shape}")
    if pc.rank == 0:
        return pc.mean_shift.copy()
    return pc.mean_shift + w @ pc.components


def sample_weights(pc: PrincipalComponents, rng: np.random.Generator) -> np.ndarray:
    """Per-mode Gaussian weights, std sqrt(variance), truncated at 3 std."""
    w = np.zeros(pc.rank)
    for i, var in enumerate(pc.variances):
        if var <= 0.0:
            continue
        z = rng.standard_normal()
        while abs(z) > 3.0:
            z = rng.standard_normal()
        w[i] = z * np.sqrt(var)
    return w
