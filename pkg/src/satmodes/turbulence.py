"""Spatial-mode downlink through Kolmogorov-type turbulence.

Laguerre-Gaussian modes (radial index 0) leave the satellite, cross a stack of
random phase screens by split-step Fresnel propagation, pass a hard-edged
receiver aperture, and are projected onto the vacuum-diffracted mode basis.
Screens follow the modified von Karman spectrum

    PSD_phi(f) = 0.023 r0^(-5/3) exp(-(f/fm)^2) / (f^2 + f0^2)^(11/6)

in cyclic frequency, fm = 5.92/(2 pi l_inner), f0 = 1/L_outer, synthesized by
FFT with three nested 3x3 subharmonic levels so that low-frequency power down
to 1/27 of the grid's fundamental is represented.  Screen strength comes from
the altitude-integrated structure parameter assigned to each slab.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .atmosphere import hv_cn2, fried_parameter
from .errors import GridExtentError, IncompatibleGridError
from .matrices import AmplitudeMatrix

__all__ = [
    "TransverseGrid",
    "TransverseField",
    "lg_mode",
    "fresnel_propagate",
    "PhaseScreen",
    "phase_psd",
    "generate_screen",
    "split_step_propagate",
    "ScreenPlan",
    "plan_screens",
    "TurbulenceParams",
    "TurbulenceEnsemble",
    "oam_crosstalk_realization",
    "run_ensemble",
    "smm_coefficient",
]

BOUNDARY_BAND = 0.1          # outermost fraction of the half-extent checked for leakage
SOURCE_BAND_LIMIT = 1e-4     # max power fraction allowed in the band for a fresh mode
PROPAGATED_BAND_LIMIT = 1e-3  # beyond this the field has aliased into the boundary


@dataclass(frozen=True)
class TransverseGrid:
    """Square transverse grid of n_xy points spanning `extent` metres per side."""

    n_xy: int
    extent: float
    wavelength: float

    def __post_init__(self) -> None:
        if self.n_xy < 16 or self.n_xy & (self.n_xy - 1):
            raise ValueError(f"n_xy must be a power of two >= 16, got {self.n_xy}")
        if self.extent <= 0 or self.wavelength <= 0:
            raise ValueError("extent and wavelength must be positive")

    @property
    def dx(self) -> float:
        return self.extent / self.n_xy

    @cached_property
    def xx(self) -> np.ndarray:
        x = (np.arange(self.n_xy) - self.n_xy // 2) * self.dx
        return np.meshgrid(x, x)[0]

    @cached_property
    def yy(self) -> np.ndarray:
        x = (np.arange(self.n_xy) - self.n_xy // 2) * self.dx
        return np.meshgrid(x, x)[1]

    @cached_property
    def rr(self) -> np.ndarray:
        return np.hypot(self.xx, self.yy)

    @cached_property
    def azimuth(self) -> np.ndarray:
        return np.arctan2(self.yy, self.xx)

    @cached_property
    def freq_sq(self) -> np.ndarray:
        f = np.fft.fftfreq(self.n_xy, self.dx)
        fxx, fyy = np.meshgrid(f, f)
        return fxx * fxx + fyy * fyy

    @cached_property
    def boundary_band(self) -> np.ndarray:
        half = self.extent / 2.0
        edge = (1.0 - BOUNDARY_BAND) * half
        return (np.abs(self.xx) > edge) | (np.abs(self.yy) > edge)


@dataclass(frozen=True)
class TransverseField:
    """Complex field sampled on a TransverseGrid."""

    grid: TransverseGrid
    values: np.ndarray

    def power(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx ** 2)

    def boundary_fraction(self) -> float:
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0.0:
            return 0.0
        band = np.sum(np.abs(self.values[self.grid.boundary_band]) ** 2)
        return float(band / total)


def overlap(a: TransverseField, b: TransverseField) -> complex:
    """int conj(a) b dA on the shared grid."""
    if a.grid != b.grid:
        raise IncompatibleGridError("fields live on different transverse grids")
    return complex(np.sum(np.conj(a.values) * b.values) * a.grid.dx ** 2)


def lg_mode(l: int, waist: float, grid: TransverseGrid) -> TransverseField:
    """Unit-power Laguerre-Gaussian mode of azimuthal index l, radial index 0.

    Normalization is computed on the grid, so the discrete power is exactly 1.

    Raises
    ------
    GridExtentError
        If the waist is not resolved (under 2 pixels) or more than 1e-4 of the
        mode's power falls within 10% of the grid boundary.
    """
    if waist <= 0:
        raise ValueError(f"waist must be positive, got {waist}")
    if waist < 2.0 * grid.dx:
        raise GridExtentError(f"waist {waist:g} m below two pixels ({grid.dx:g} m each)")
    r = grid.rr
    amp = (math.sqrt(2.0) * r / waist) ** abs(l) * np.exp(-(r / waist) ** 2)
    values = amp * np.exp(1j * l * grid.azimuth)
    norm = math.sqrt(np.sum(np.abs(values) ** 2) * grid.dx ** 2)
    fld = TransverseField(grid=grid, values=values / norm)
    frac = fld.boundary_fraction()
    if frac > SOURCE_BAND_LIMIT:
        raise GridExtentError(f"mode l={l} leaves {frac:.2e} of its power near the boundary")
    return fld


def fresnel_propagate(values: np.ndarray, grid: TransverseGrid, distance: float) -> np.ndarray:
    """Paraxial vacuum step via the angular-spectrum transfer function.

    Operates on the trailing two axes so stacked mode arrays propagate in one
    batch; the carrier phase exp(ikz) common to all modes is dropped.
    """
    if distance == 0.0:
        return values
    kernel = np.exp(-1j * math.pi * grid.wavelength * distance * grid.freq_sq)
    return np.fft.ifft2(np.fft.fft2(values) * kernel)


def phase_psd(f, r0: float, outer_scale: float, inner_scale: float):
    """Modified von Karman phase spectral density at cyclic frequency f [1/m]."""
    f = np.asarray(f, dtype=float)
    fm = 5.92 / (2.0 * math.pi * inner_scale)
    f0 = 1.0 / outer_scale
    return 0.023 * r0 ** (-5.0 / 3.0) * np.exp(-(f / fm) ** 2) / (f * f + f0 * f0) ** (11.0 / 6.0)


@dataclass(frozen=True)
class PhaseScreen:
    """One thin random phase screen standing in for a turbulent slab."""

    grid: TransverseGrid
    phase: np.ndarray = field(repr=False)
    h_lo: float = 0.0
    h_hi: float = 0.0
    cn2_integral: float = 0.0
    r0: float = math.inf


def generate_screen(grid: TransverseGrid, cn2_integral: float, rng: np.random.Generator,
                    outer_scale: float, inner_scale: float, n_subharmonics: int = 3,
                    h_lo: float = 0.0, h_hi: float = 0.0) -> PhaseScreen:
    """Zero-mean random phase screen for a slab of integrated Cn^2 [m^(1/3)].

    FFT synthesis over the grid's frequency lattice plus `n_subharmonics`
    nested 3x3 low-frequency levels; each level tiles the zeroed centre cell
    of the one above, so no frequency area is double counted.
    """
    if cn2_integral < 0:
        raise ValueError("integrated Cn^2 must be non-negative")
    n = grid.n_xy
    if cn2_integral == 0.0:
        return PhaseScreen(grid=grid, phase=np.zeros((n, n)), h_lo=h_lo, h_hi=h_hi,
                           cn2_integral=0.0, r0=math.inf)
    r0 = fried_parameter(cn2_integral, grid.wavelength)
    df = 1.0 / grid.extent
    fx = (np.arange(n) - n // 2) * df
    fxx, fyy = np.meshgrid(fx, fx)
    psd = phase_psd(np.hypot(fxx, fyy), r0, outer_scale, inner_scale)
    psd[n // 2, n // 2] = 0.0
    noise = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    coeff = noise * np.sqrt(psd) * df
    screen = np.fft.ifft2(np.fft.ifftshift(coeff)).real * (n * n)
    for level in range(1, n_subharmonics + 1):
        dfp = df / 3.0 ** level
        for i in range(3):
            for j in range(3):
                if i == 1 and j == 1:
                    continue
                fxi, fyj = (i - 1) * dfp, (j - 1) * dfp
                amp = math.sqrt(phase_psd(math.hypot(fxi, fyj), r0, outer_scale, inner_scale))
                a = (rng.standard_normal() + 1j * rng.standard_normal()) * amp * dfp
                screen += (a * np.exp(2j * math.pi * (fxi * grid.xx + fyj * grid.yy))).real
    screen -= screen.mean()
    return PhaseScreen(grid=grid, phase=screen, h_lo=h_lo, h_hi=h_hi,
                       cn2_integral=cn2_integral, r0=r0)


def split_step_propagate(fields: np.ndarray, grid: TransverseGrid,
                         screens: tuple[PhaseScreen, ...],
                         distances: tuple[float, ...]) -> np.ndarray:
    """Alternate vacuum legs and screen multiplications, satellite to ground.

    distances has one more entry than screens: the legs before each screen in
    order, then the final leg to the ground.  Raises GridExtentError if the
    arriving field pushed more than 1e-3 of its power into the boundary band.
    """
    if len(distances) != len(screens) + 1:
        raise ValueError(f"{len(screens)} screens need {len(screens) + 1} legs, "
                         f"got {len(distances)}")
    if any(z < 0 for z in distances):
        raise ValueError("leg distances must be non-negative")
    out = np.asarray(fields, dtype=complex)
    for leg, screen in zip(distances[:-1], screens):
        if screen.grid != grid:
            raise IncompatibleGridError("screen grid does not match the field grid")
        out = fresnel_propagate(out, grid, leg)
        out = out * np.exp(1j * screen.phase)
    out = fresnel_propagate(out, grid, distances[-1])
    flat = out.reshape(-1, grid.n_xy, grid.n_xy)
    band = grid.boundary_band
    for mode in flat:
        total = np.sum(np.abs(mode) ** 2)
        if total > 0 and np.sum(np.abs(mode[band]) ** 2) / total > PROPAGATED_BAND_LIMIT:
            raise GridExtentError("propagated field reaches the grid boundary; "
                                  "increase the extent or reduce the path")
    return out


# ---------------------------------------------------------------------------
# slab planning

@dataclass(frozen=True)
class ScreenPlan:
    """Where the screens sit and how strong each one is."""

    spans: tuple[tuple[float, float], ...]      # altitude slabs [m]
    altitudes: tuple[float, ...]                # Cn^2 centroid of each slab [m]
    integrals: tuple[float, ...]                # slant-integrated Cn^2 per slab [m^(1/3)]
    distances: tuple[float, ...]                # legs satellite -> ... -> ground [m]


def plan_screens(h0: float, sat_altitude: float, zenith_angle: float, n_screens: int,
                 a_ground: float = 9.6e-14, v_rms: float = 21.0) -> ScreenPlan:
    """Split the turbulent column into n_screens slabs of equal integrated Cn^2.

    Equal-strength slabs concentrate screens at low altitude where the profile
    peaks.  Each screen sits at its slab's Cn^2 centroid; legs are slant path
    distances between consecutive screens, starting from the satellite.
    """
    if n_screens < 1:
        raise ValueError(f"need at least one screen, got {n_screens}")
    if h0 < 0 or sat_altitude <= h0:
        raise ValueError("require 0 <= ground altitude < satellite altitude")
    ceiling = 100e3   # profile support: turbulence above is negligible
    if h0 >= ceiling:
        raise ValueError("ground altitude must lie below the turbulent column")
    secant = 1.0 / math.cos(zenith_angle)
    hgrid = np.linspace(h0, ceiling, 200001)
    cn2 = hv_cn2(hgrid, a_ground=a_ground, v_rms=v_rms)
    cum = cumulative_trapezoid(cn2, hgrid, initial=0.0)
    total = cum[-1]
    if total <= 0:
        raise ValueError("turbulence profile integrates to zero over the path")
    bounds = np.interp(np.linspace(0.0, total, n_screens + 1), cum, hgrid)
    spans, altitudes = [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        spans.append((float(lo), float(hi)))
        m = (hgrid >= lo) & (hgrid <= hi)
        w = cn2[m]
        altitudes.append(float(np.trapezoid(hgrid[m] * w, hgrid[m]) / np.trapezoid(w, hgrid[m])))
    descending = altitudes[::-1]
    stations = [sat_altitude] + descending + [h0]
    distances = tuple((a - b) * secant for a, b in zip(stations[:-1], stations[1:]))
    return ScreenPlan(spans=tuple(spans[::-1]), altitudes=tuple(descending),
                      integrals=tuple(total / n_screens * secant for _ in range(n_screens)),
                      distances=distances)


# ---------------------------------------------------------------------------
# ensemble

@dataclass(frozen=True)
class TurbulenceParams:
    """Everything that determines the spatial channel statistics."""

    wavelength: float = 1.064e-6
    h0: float = 3000.0
    sat_altitude: float = 500e3
    zenith_angle: float = 0.0
    waist: float = 0.15
    aperture_radius: float = 4.0
    a_ground: float = 9.6e-14
    v_rms: float = 21.0
    outer_scale: float = 5.0
    inner_scale: float = 0.01
    n_xy: int = 512
    extent: float = 16.0
    n_screens: int = 10
    n_subharmonics: int = 3
    l_values: tuple[int, ...] = (-4, -3, -2, -1, 0, 1, 2, 3, 4)

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["l_values"] = list(self.l_values)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TurbulenceParams":
        data = dict(data)
        data["l_values"] = tuple(data["l_values"])
        return cls(**data)


@dataclass(frozen=True)
class TurbulenceEnsemble:
    """Monte-Carlo crosstalk record: one amplitude matrix per atmosphere draw."""

    params: TurbulenceParams
    seed: int
    matrices: np.ndarray = field(repr=False)     # (n_realizations, n_l, n_l) complex
    smm_samples: np.ndarray = field(repr=False)  # (n_realizations,)

    @property
    def n_realizations(self) -> int:
        return self.matrices.shape[0]

    def subspace_blocks(self, labels: tuple[int, ...]) -> np.ndarray:
        """(n_realizations, d, d) complex blocks for the given l labels."""
        idx = [self.params.l_values.index(l) for l in labels]
        ix = np.ix_(range(self.n_realizations), idx, idx)
        return self.matrices[ix]

    def mean_probabilities(self) -> AmplitudeMatrix:
        """Ensemble-averaged |c|^2 wrapped with labels (probabilities, not amplitudes)."""
        mean = np.mean(np.abs(self.matrices) ** 2, axis=0)
        return AmplitudeMatrix(entries=mean, row_labels=self.params.l_values,
                               col_labels=self.params.l_values)


def _grid_of(params: TurbulenceParams) -> TransverseGrid:
    return TransverseGrid(n_xy=params.n_xy, extent=params.extent,
                          wavelength=params.wavelength)


def oam_crosstalk_realization(params: TurbulenceParams, plan: ScreenPlan,
                              sources: np.ndarray, references: np.ndarray,
                              rng: np.random.Generator,
                              grid: TransverseGrid) -> np.ndarray:
    """One atmosphere draw: crosstalk amplitudes c[m, l] over params.l_values.

    sources and references are stacked mode arrays prepared by the caller
    (source modes at the satellite, vacuum-diffracted modes at the ground).
    """
    screens = tuple(
        generate_screen(grid, integral, rng, params.outer_scale, params.inner_scale,
                        params.n_subharmonics, h_lo=span[0], h_hi=span[1])
        for span, integral in zip(plan.spans, plan.integrals))
    arrived = split_step_propagate(sources, grid, screens, plan.distances)
    mask = grid.rr <= params.aperture_radius
    arrived = arrived * mask
    # c[m, l] = int conj(ref_m) A psi_l dA, all modes at once
    return np.tensordot(references.conj(), arrived, axes=([1, 2], [1, 2])) * grid.dx ** 2


def run_ensemble(params: TurbulenceParams, n_realizations: int, seed: int,
                 ) -> TurbulenceEnsemble:
    """Monte-Carlo ensemble of spatial crosstalk matrices.

    Realization k draws from an independent stream seeded by (seed, k), so any
    subset can be reproduced without regenerating the rest and the result does
    not depend on evaluation order.
    """
    if n_realizations < 1:
        raise ValueError(f"need at least one realization, got {n_realizations}")
    if 0 not in params.l_values:
        raise ValueError("l_values must include 0: the fundamental-mode overlap "
                         "sample is defined on l = 0")
    grid = _grid_of(params)
    plan = plan_screens(params.h0, params.sat_altitude, params.zenith_angle,
                        params.n_screens, params.a_ground, params.v_rms)
    sources = np.stack([lg_mode(l, params.waist, grid).values for l in params.l_values])
    references = fresnel_propagate(sources, grid, sum(plan.distances))
    i0 = params.l_values.index(0)
    n_l = len(params.l_values)
    matrices = np.empty((n_realizations, n_l, n_l), dtype=complex)
    smm = np.empty(n_realizations)
    for k in range(n_realizations):
        rng = np.random.default_rng([seed, k])
        matrices[k] = oam_crosstalk_realization(params, plan, sources, references, rng, grid)
        smm[k] = abs(matrices[k, i0, i0]) ** 2
    return TurbulenceEnsemble(params=params, seed=seed, matrices=matrices, smm_samples=smm)


def smm_coefficient(ensemble: TurbulenceEnsemble) -> float:
    """Ensemble-mean survival of the fundamental Gaussian in its vacuum-diffracted form.

    Compensated summation keeps the mean independent of sample ordering.
    """
    return math.fsum(ensemble.smm_samples.tolist()) / ensemble.n_realizations
