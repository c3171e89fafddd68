"""High-dimensional QKD with complete sets of mutually unbiased bases.

Dimensions 2..9 excluding 6 are supported: for primes the quadratic
Gauss-sum construction over F_p, for odd prime powers its trace form over
GF(p^n), and for 4 and 8 the character construction over the Galois ring
GR(4, n) whose fourth-root phases survive characteristic 2.  In each case the
first basis is the computational one and the d+1 bases are pairwise unbiased,
|<e_i|f_j>|^2 = 1/d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import UnsupportedDimensionError
from .sorter import SorterModel, srt_matrix
from .detection import total_probabilities, error_probability
from .matrices import conjugation_correct

__all__ = [
    "build_mubs",
    "mub_channel_probabilities",
    "average_error",
    "KeyRate",
    "key_rate_per_photon",
    "secret_key_rate",
    "QkdOutcome",
    "evaluate_tm_qkd",
    "evaluate_oam_qkd",
    "evaluate_tm_detection",
    "evaluate_oam_detection",
]


# ---------------------------------------------------------------------------
# finite-field / Galois-ring arithmetic on coefficient tuples

class _PolyRing:
    """Z_m[x] / (modulus), elements as coefficient tuples of length deg(modulus)."""

    def __init__(self, char: int, modulus: tuple[int, ...]):
        self.char = char
        self.mod = modulus          # monic, length n+1, constant term first
        self.n = len(modulus) - 1
        self.zero = (0,) * self.n
        self.one = tuple(1 if i == 0 else 0 for i in range(self.n))

    def add(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x + y) % self.char for x, y in zip(a, b))

    def mul(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        n = self.n
        prod = [0] * (2 * n - 1) if n > 1 else [0]
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % self.char
        for deg in range(len(prod) - 1, n - 1, -1):
            c = prod[deg]
            if c:
                prod[deg] = 0
                for j in range(n):
                    prod[deg - n + j] = (prod[deg - n + j] - c * self.mod[j]) % self.char
        return tuple(prod[:n])

    def elements(self) -> list[tuple[int, ...]]:
        elems = [()]
        for _ in range(self.n):
            elems = [e + (c,) for c in range(self.char) for e in elems]
        return sorted(elems)


def _gf_mubs(p: int, n: int, modulus: tuple[int, ...]) -> list[np.ndarray]:
    """Odd-characteristic construction: V_a[k, m] = w^tr(a k^2 + m k) / sqrt(q)."""
    field = _PolyRing(p, modulus)
    elems = field.elements()
    q = p ** n
    omega = np.exp(2j * np.pi / p)

    def trace(z: tuple[int, ...]) -> int:
        total, cur = field.zero, z
        for _ in range(n):
            total = field.add(total, cur)
            nxt = cur
            for _ in range(p - 1):
                nxt = field.mul(nxt, cur)
            cur = nxt
        assert all(c == 0 for c in total[1:])
        return total[0]

    bases = [np.eye(q, dtype=complex)]
    for a in elems:
        v = np.empty((q, q), dtype=complex)
        for mi, m in enumerate(elems):
            for ki, k in enumerate(elems):
                ex = field.add(field.mul(a, field.mul(k, k)), field.mul(m, k))
                v[ki, mi] = omega ** trace(ex)
        bases.append(v / math.sqrt(q))
    return bases


def _gr4_mubs(n: int, modulus: tuple[int, ...]) -> list[np.ndarray]:
    """Characteristic-2 construction over GR(4, n) with i^trace phases."""
    ring = _PolyRing(4, modulus)
    q = 2 ** n
    two = tuple(2 if i == 0 else 0 for i in range(n))

    # Teichmuller set: 0 and the powers of the modulus root (order 2^n - 1)
    teich = [ring.zero, ring.one]
    if n > 1:
        xi = tuple(1 if i == 1 else 0 for i in range(n))
        cur = xi
        for _ in range(q - 2):
            if cur == ring.one:
                break
            teich.append(cur)
            cur = ring.mul(cur, xi)
        if cur != ring.one or len(teich) != q:
            raise AssertionError("modulus root does not generate the Teichmuller set")

    # 2-adic split z = a + 2b with a, b Teichmuller; needed for the Frobenius
    adic: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for a in teich:
        for b in teich:
            adic[ring.add(a, ring.mul(two, b))] = (a, b)

    def frobenius(z: tuple[int, ...]) -> tuple[int, ...]:
        a, b = adic[z]
        return ring.add(ring.mul(a, a), ring.mul(two, ring.mul(b, b)))

    def trace(z: tuple[int, ...]) -> int:
        total, cur = ring.zero, z
        for _ in range(n):
            total = ring.add(total, cur)
            cur = frobenius(cur)
        assert all(c == 0 for c in total[1:])
        return total[0]

    bases = [np.eye(q, dtype=complex)]
    for a in teich:
        v = np.empty((q, q), dtype=complex)
        for bi, b in enumerate(teich):
            coeff = ring.add(a, ring.mul(two, b))
            for xi_, x in enumerate(teich):
                v[xi_, bi] = 1j ** trace(ring.mul(coeff, x))
        bases.append(v / math.sqrt(q))
    return bases


_CONSTRUCTIONS = {
    2: lambda: _gr4_mubs(1, (3, 1)),            # Z_4 itself
    3: lambda: _gf_mubs(3, 1, (0, 1)),
    4: lambda: _gr4_mubs(2, (1, 1, 1)),          # x^2 + x + 1 lifted to Z_4
    5: lambda: _gf_mubs(5, 1, (0, 1)),
    7: lambda: _gf_mubs(7, 1, (0, 1)),
    8: lambda: _gr4_mubs(3, (3, 1, 2, 1)),       # x^3 + 2x^2 + x + 3, Hensel lift
    9: lambda: _gf_mubs(3, 2, (1, 0, 1)),        # GF(9) = F_3[x]/(x^2 + 1)
}


@lru_cache(maxsize=None)
def build_mubs(d: int) -> tuple[np.ndarray, ...]:
    """d+1 mutually unbiased bases of C^d as unitary column matrices.

    The first basis is the identity (computational basis).  Dimension 6 has no
    known complete set and is rejected; dimensions outside 2..9 are out of the
    supported encoding range.
    """
    if d == 6:
        raise UnsupportedDimensionError("no complete MUB set is known for dimension 6")
    if d not in _CONSTRUCTIONS:
        raise ValueError(f"dimension must lie in 2..9 (excluding 6), got {d}")
    bases = _CONSTRUCTIONS[d]()
    for v in bases:
        v.setflags(write=False)
    return tuple(bases)


# ---------------------------------------------------------------------------
# channel statistics in rotated bases

def mub_channel_probabilities(c_sub: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """|V^dag C V|^2: channel probabilities for symbols encoded in basis V."""
    c_sub = np.asarray(c_sub)
    if c_sub.shape != basis.shape:
        raise ValueError(f"channel block {c_sub.shape} does not match basis {basis.shape}")
    rotated = basis.conj().T @ c_sub @ basis
    return np.abs(rotated) ** 2


def average_error(errors_per_basis) -> float:
    """Mean error rate over the d+1 bases."""
    errs = list(errors_per_basis)
    if not errs:
        raise ValueError("need at least one basis error rate")
    return math.fsum(errs) / len(errs)


# ---------------------------------------------------------------------------
# asymptotic key rate

@dataclass(frozen=True)
class KeyRate:
    """Per-detected-photon key rate with clamp bookkeeping."""

    value: float
    clamped: bool = False
    saturated: bool = False


def key_rate_per_photon(q_error: float, d: int) -> KeyRate:
    """Asymptotic secret bits per detected photon at average error rate q_error.

    log2 d at zero error; negative formula values clamp to 0 (clamped flag);
    error rates beyond the formula's domain, 1 - (d+1)q/d < 0, also return 0
    and raise the saturated flag.
    """
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if not 0.0 <= q_error <= 1.0:
        raise ValueError(f"error rate must lie in [0, 1], got {q_error}")
    if q_error == 0.0:
        return KeyRate(value=math.log2(d))
    arg = 1.0 - (d + 1) / d * q_error
    if arg < 0.0:
        return KeyRate(value=0.0, clamped=True, saturated=True)
    raw = (math.log2(d)
           + (d + 1) / d * q_error * math.log2(q_error / (d * (d - 1.0))))
    if arg > 0.0:
        raw += arg * math.log2(arg)   # x log2 x -> 0 as x -> 0
    if raw < 0.0:
        return KeyRate(value=0.0, clamped=True)
    return KeyRate(value=raw)


def secret_key_rate(c_mismatch: float, t_avg: float, key_rate: KeyRate) -> float:
    """Secret bits per transmitted photon: mode-mismatch times transmission times K1."""
    if not 0.0 <= c_mismatch <= 1.0 + 1e-12:
        raise ValueError(f"mismatch coefficient must lie in [0, 1], got {c_mismatch}")
    if t_avg < 0.0:
        raise ValueError(f"transmission must be non-negative, got {t_avg}")
    return c_mismatch * t_avg * key_rate.value


# ---------------------------------------------------------------------------
# protocol evaluation

@dataclass(frozen=True)
class QkdOutcome:
    """Full statistics of one protocol evaluation."""

    encoding: str
    d: int
    subspace: tuple[int, ...]
    errors_per_basis: tuple[float, ...]
    transmission_per_basis: tuple[float, ...]
    q_error: float
    k1: float
    t_avg: float
    c_mismatch: float
    key: float
    clamped: bool
    saturated: bool


def _compose_bases(prob_per_basis, sorter_kernel: np.ndarray) -> tuple[list[float], list[float]]:
    errors, transmissions = [], []
    for p_ch in prob_per_basis:
        p_tot, t_s = total_probabilities(p_ch, sorter_kernel)
        errors.append(error_probability(p_tot))
        transmissions.append(float(np.mean(t_s)))
    return errors, transmissions


def _finish(encoding: str, d: int, subspace: tuple[int, ...], errors, transmissions,
            c_mismatch: float) -> QkdOutcome:
    q = average_error(errors)
    rate = key_rate_per_photon(q, d)
    t_avg = math.fsum(transmissions) / len(transmissions)
    key = secret_key_rate(c_mismatch, t_avg, rate)
    return QkdOutcome(encoding=encoding, d=d, subspace=tuple(subspace),
                      errors_per_basis=tuple(errors),
                      transmission_per_basis=tuple(transmissions),
                      q_error=q, k1=rate.value, t_avg=t_avg,
                      c_mismatch=c_mismatch, key=key,
                      clamped=rate.clamped, saturated=rate.saturated)


def evaluate_tm_qkd(amp_sub: np.ndarray, subspace: tuple[int, ...],
                    sorter_model: SorterModel, c_smm: float) -> QkdOutcome:
    """Temporal-mode protocol: dispersive channel block + sorter, ground-mode mismatch c_smm.

    amp_sub is the complex crosstalk block restricted to the (ascending)
    subspace; the same sorter kernel applies in every encoding basis.
    """
    d = len(subspace)
    if amp_sub.shape != (d, d):
        raise ValueError(f"channel block shape {amp_sub.shape} does not match d={d}")
    if sorter_model.n_modes != d:
        raise ValueError("sorter must span exactly the encoded subspace")
    kernel = srt_matrix(sorter_model)
    mubs = build_mubs(d)
    probs = [mub_channel_probabilities(amp_sub, v) for v in mubs]
    errors, transmissions = _compose_bases(probs, kernel)
    return _finish("tm", d, subspace, errors, transmissions, c_smm)


def evaluate_oam_qkd(realization_blocks: np.ndarray, subspace: tuple[int, ...],
                     c_tmm: float) -> QkdOutcome:
    """Spatial-mode protocol: conjugation-corrected blocks, ideal mode filter.

    realization_blocks has shape (n_realizations, d, d); each block is
    conjugation-corrected, rotated into every basis, and the resulting
    probabilities are ensemble-averaged before any error rate is formed.
    """
    blocks = np.asarray(realization_blocks)
    if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
        raise ValueError(f"expected (n, d, d) realization blocks, got {blocks.shape}")
    d = len(subspace)
    if blocks.shape[1] != d:
        raise ValueError(f"block size {blocks.shape[1]} does not match subspace size {d}")
    mubs = build_mubs(d)
    mean_probs = [np.zeros((d, d)) for _ in mubs]
    for block in blocks:
        corrected = conjugation_correct(block)
        for i, v in enumerate(mubs):
            mean_probs[i] += mub_channel_probabilities(corrected, v)
    mean_probs = [p / blocks.shape[0] for p in mean_probs]
    kernel = np.eye(d)   # ideal filter: unity efficiency, no leakage
    errors, transmissions = _compose_bases(mean_probs, kernel)
    return _finish("oam", d, subspace, errors, transmissions, c_tmm)


def evaluate_tm_detection(amp_sub: np.ndarray, sorter_model: SorterModel,
                          ) -> tuple[float, float]:
    """Computational-basis error rate and mean transmission for the sorter readout."""
    p_tot, t_s = total_probabilities(np.abs(amp_sub) ** 2, srt_matrix(sorter_model))
    return error_probability(p_tot), float(np.mean(t_s))


def evaluate_oam_detection(realization_blocks: np.ndarray) -> tuple[float, float]:
    """Computational-basis error rate for ensemble-averaged spatial crosstalk.

    No conjugation correction here: direct mode detection of what arrives.
    """
    blocks = np.asarray(realization_blocks)
    mean_prob = np.mean(np.abs(blocks) ** 2, axis=0)
    p_tot, t_s = total_probabilities(mean_prob, np.eye(mean_prob.shape[0]))
    return error_probability(p_tot), float(np.mean(t_s))
