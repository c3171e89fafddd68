"""Mode-crosstalk amplitude matrices shared by both channel models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateChannelError

__all__ = ["AmplitudeMatrix", "conjugation_correct"]


@dataclass(frozen=True)
class AmplitudeMatrix:
    """Complex crosstalk amplitudes c[receive, send] between labelled modes.

    Columns are the transmitted mode labels, rows the projection labels.
    |c|^2 gives detection probabilities; column norms at or below 1 express
    loss out of the represented basis.
    """

    entries: np.ndarray
    row_labels: tuple[int, ...]
    col_labels: tuple[int, ...]

    def __post_init__(self) -> None:
        e = np.asarray(self.entries)
        if e.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(f"entry shape {e.shape} does not match labels "
                             f"({len(self.row_labels)}, {len(self.col_labels)})")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.entries) ** 2

    def restrict(self, labels: tuple[int, ...]) -> np.ndarray:
        """Square complex submatrix for a subspace given by mode labels (kept in given order)."""
        try:
            rows = [self.row_labels.index(l) for l in labels]
            cols = [self.col_labels.index(l) for l in labels]
        except ValueError as exc:
            raise ValueError(f"label not present in matrix: {exc}") from exc
        return self.entries[np.ix_(rows, cols)]


def conjugation_correct(block: np.ndarray) -> np.ndarray:
    """Undo the unitary part of a crosstalk block: receiver-side channel conjugation.

    Polar-decompose block = U P and return U^dag block = P, the positive
    factor.  A unitary block maps to the identity; purely diagonal loss is
    returned unchanged.  Only the non-unitary (loss/distortion) part of the
    channel remains to cause symbol errors.
    """
    block = np.asarray(block, dtype=complex)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"expected a square block, got shape {block.shape}")
    scale = np.linalg.norm(block)
    if scale < 1e-300 or not np.isfinite(scale):
        raise DegenerateChannelError("crosstalk block carries no amplitude to correct")
    unitary, positive = scipy.linalg.polar(block)
    return positive
