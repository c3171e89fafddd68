"""Dispersive propagation of temporal modes through the layered atmosphere.

The channel multiplies the spectral amplitude by exp(-i sum_q k_q(omega) L_q)
with k_q evaluated exactly at every frequency sample, then removes the overall
group delay exp(+i omega sum_q k'_q(omega0) L_q) so that mode overlap
degradation reflects pulse distortion, not arrival time.  Optional quadratic
compensation multiplies by exp(+i (omega-omega0)^2 Phi2 / 2) with Phi2 the
stack's accumulated group-delay dispersion.
"""

from __future__ import annotations

import numpy as np

from .atmosphere import LayerStack
from .matrices import AmplitudeMatrix
from .temporal import SpectralAmplitude, SpectralGrid, hg_amplitude, inner_product

__all__ = [
    "propagate",
    "apply_quadratic_phase",
    "compensate_gdd",
    "crosstalk_matrix",
    "tmm_coefficient",
]


def propagate(amplitude: SpectralAmplitude, stack: LayerStack,
              vacuum: bool = False) -> SpectralAmplitude:
    """Send a spectral amplitude through the stack; group delay removed.

    vacuum=True treats every layer as index-1 over the same geometric path,
    in which case the output equals the input exactly.
    """
    grid = amplitude.grid
    omega = grid.samples
    if vacuum:
        # k(omega) = omega/c in every slab; the removed group delay cancels
        # the accumulated phase sample by sample.
        return SpectralAmplitude(grid=grid, values=amplitude.values.copy())
    phase = np.zeros_like(omega)
    for layer in stack.layers:
        phase -= layer.wavenumber(omega) * layer.path_length
    phase += omega * stack.total_group_delay()
    return SpectralAmplitude(grid=grid, values=amplitude.values * np.exp(1j * phase))


def apply_quadratic_phase(amplitude: SpectralAmplitude, phi2: float) -> SpectralAmplitude:
    """Multiply by exp(-i phi2 (omega-omega0)^2 / 2); phi2 in s^2."""
    grid = amplitude.grid
    detune = grid.sigma * grid.offsets
    return SpectralAmplitude(grid=grid,
                             values=amplitude.values * np.exp(-0.5j * phi2 * detune * detune))


def compensate_gdd(amplitude: SpectralAmplitude, stack: LayerStack) -> SpectralAmplitude:
    """Undo the stack's accumulated quadratic spectral phase."""
    return apply_quadratic_phase(amplitude, -stack.total_gdd())


def crosstalk_matrix(orders: tuple[int, ...], grid: SpectralGrid, stack: LayerStack,
                     compensated: bool = False, vacuum: bool = False) -> AmplitudeMatrix:
    """Crosstalk amplitudes c[n, n_t] = <mode n | channel(mode n_t)>.

    Columns index the transmitted order n_t, rows the projection order n.
    Projection modes and transmitted modes share the same grid; the channel
    preserves total spectral norm, so column probability sums below 1 measure
    leakage outside the projected basis.
    """
    if len(set(orders)) != len(orders):
        raise ValueError(f"mode orders must be distinct, got {orders}")
    basis = [hg_amplitude(n, grid) for n in orders]
    entries = np.empty((len(orders), len(orders)), dtype=complex)
    for col, mode in enumerate(basis):
        out = propagate(mode, stack, vacuum=vacuum)
        if compensated:
            out = compensate_gdd(out, stack)
        for row, proj in enumerate(basis):
            entries[row, col] = inner_product(proj, out)
    return AmplitudeMatrix(entries=entries, row_labels=tuple(orders),
                           col_labels=tuple(orders))


def tmm_coefficient(grid: SpectralGrid, stack: LayerStack,
                    compensated: bool = False) -> float:
    """Survival probability of the fundamental temporal mode through the stack.

    |<f_0 | channel(f_0)>|^2, optionally after quadratic compensation.  This is
    the temporal-mode-mismatch factor applied to encodings that do not resolve
    the pulse shape.
    """
    mode = hg_amplitude(0, grid)
    out = propagate(mode, stack)
    if compensated:
        out = compensate_gdd(out, stack)
    return float(abs(inner_product(mode, out)) ** 2)
