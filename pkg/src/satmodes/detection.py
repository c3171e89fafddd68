"""Composition of channel and sorter statistics into detection error rates."""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateChannelError

__all__ = [
    "total_probabilities",
    "error_probability",
    "optimize_subspace",
]


def total_probabilities(p_ch: np.ndarray, p_srt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Post-selected outcome probabilities and per-symbol transmissions.

    p_ch[r, s] is the channel probability of receiving mode r given symbol s;
    p_srt[m, r] the sorter kernel.  Returns (p_tot, t_s) where
    p_tot[m, s] = sum_r p_srt[m, r] p_ch[r, s] / t_s and t_s is the double sum
    over m and r, i.e. the probability the photon is detected at all.  Columns
    of p_tot sum to 1.
    """
    p_ch = np.asarray(p_ch, dtype=float)
    p_srt = np.asarray(p_srt, dtype=float)
    if p_ch.ndim != 2 or p_srt.ndim != 2:
        raise ValueError("probability tables must be 2-d")
    if p_srt.shape[1] != p_ch.shape[0]:
        raise ValueError(f"kernel shape {p_srt.shape} does not accept channel shape {p_ch.shape}")
    if np.any(p_ch < -1e-12) or np.any(p_srt < -1e-12):
        raise ValueError("probabilities must be non-negative")
    raw = p_srt @ p_ch
    t_s = raw.sum(axis=0)
    if np.any(t_s <= 0.0):
        dead = np.nonzero(t_s <= 0.0)[0].tolist()
        raise DegenerateChannelError(f"no detection probability for symbols {dead}")
    return raw / t_s, t_s


def error_probability(p_tot: np.ndarray) -> float:
    """Mean probability of announcing any mode other than the one sent.

    Assumes uniformly distributed symbols and column-normalized p_tot.
    """
    p_tot = np.asarray(p_tot, dtype=float)
    d = p_tot.shape[1]
    if p_tot.shape[0] != d:
        raise ValueError("p_tot must be square")
    return float((p_tot.sum() - np.trace(p_tot)) / d)


def optimize_subspace(candidates: Sequence[int], d: int,
                      score: Callable[[tuple[int, ...]], float],
                      maximize: bool = False,
                      ) -> tuple[tuple[int, ...], float]:
    """Exhaustively score all d-subsets of candidates; deterministic tie-break.

    Subsets are enumerated in lexicographic order of the ascending-sorted
    candidate list and a tie keeps the earlier subset, so the result does not
    depend on floating-point ordering quirks or dict iteration.
    """
    cand = sorted(candidates)
    if len(set(cand)) != len(cand):
        raise ValueError(f"candidate labels must be distinct, got {candidates}")
    if not 1 <= d <= len(cand):
        raise ValueError(f"cannot pick {d} modes from {len(cand)} candidates")
    best: tuple[int, ...] | None = None
    best_score = -np.inf if maximize else np.inf
    for subset in combinations(cand, d):
        val = float(score(subset))
        better = val > best_score if maximize else val < best_score
        if better:
            best, best_score = subset, val
    assert best is not None
    return best, best_score
