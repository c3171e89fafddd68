"""Cascaded mode-sorter outcome statistics.

The sorter interrogates modes in ascending order; each stage either accepts
the photon (correctly with probability eta0 if the photon matches the stage,
erroneously with probability eta1 otherwise) or passes it on.  Conditional
outcome probabilities for a photon in mode j read off the stage cascade:

    P(k|j) = (1-eta1)^(k-2) (1-eta0) eta1   for k > j
    P(k|j) = (1-eta1)^(k-1) eta0            for k = j
    P(k|j) = (1-eta1)^(k-1) eta1            for k < j

Modes are labelled 1..n_modes in the sorted (ascending) subspace order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SorterModel", "srt_probability", "srt_matrix", "separability"]


@dataclass(frozen=True)
class SorterModel:
    """Sorter with intrinsic efficiency eta0 and leakage error eta1 over n_modes stages."""

    n_modes: int
    eta0: float = 0.9
    eta1: float = 0.0

    def __post_init__(self) -> None:
        if self.n_modes < 1:
            raise ValueError(f"need at least one mode, got {self.n_modes}")
        if not 0.0 <= self.eta0 <= 1.0:
            raise ValueError(f"eta0 must lie in [0, 1], got {self.eta0}")
        if not 0.0 <= self.eta1 <= 1.0:
            raise ValueError(f"eta1 must lie in [0, 1], got {self.eta1}")
        if self.eta1 > self.eta0:
            raise ValueError(f"leakage eta1={self.eta1} cannot exceed efficiency eta0={self.eta0}")


def srt_probability(model: SorterModel, k: int, j: int) -> float:
    """Probability the sorter reports mode k for a photon in mode j (1-based)."""
    n = model.n_modes
    if not (1 <= k <= n and 1 <= j <= n):
        raise ValueError(f"mode indices must lie in 1..{n}, got k={k}, j={j}")
    keep = 1.0 - model.eta1
    if k > j:
        return keep ** (k - 2) * (1.0 - model.eta0) * model.eta1
    if k == j:
        return keep ** (k - 1) * model.eta0
    return keep ** (k - 1) * model.eta1


def srt_matrix(model: SorterModel) -> np.ndarray:
    """Outcome kernel P[k-1, j-1] = P(k|j); every column sums to at most 1."""
    n = model.n_modes
    out = np.empty((n, n))
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            out[k - 1, j - 1] = srt_probability(model, k, j)
    return out


def separability(model: SorterModel) -> float:
    """eta0 / (eta0 + (n-1) eta1): 1 for a perfect sorter, 1/n at eta1 = eta0."""
    if model.eta0 == 0.0:
        raise ValueError("separability undefined for eta0 = 0")
    if model.eta1 == model.eta0:
        return 1.0 / model.n_modes   # algebraic limit, exact where rounding would drift
    return model.eta0 / (model.eta0 + (model.n_modes - 1) * model.eta1)
