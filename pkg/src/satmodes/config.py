"""Run configuration: one flat dataclass, INI round-trip, derived objects.

The config file uses three sections (physical / numerical / sweep) purely for
readability; every option maps onto one RunConfig field.  Grids for the sorter
crosstalk sweep default to 0..0.3 in steps of 0.01 for key rates and to
0..eta0 for detection error tables.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .atmosphere import SPEED_OF_LIGHT, LayerStack, build_layers
from .temporal import SpectralGrid, build_grid, pulse_sigma
from .turbulence import TurbulenceParams

__all__ = ["RunConfig", "load_config", "save_config", "dump_config",
           "parse_option", "auto_extent", "desk_scale_config"]

_DEFAULT_D = (2, 3, 4, 5, 7, 8, 9)
_DEFAULT_ETA1 = tuple(i / 100 for i in range(31))
_DEFAULT_TM_ORDERS = tuple(range(9))
_DEFAULT_L = (-4, -3, -2, -1, 0, 1, 2, 3, 4)


def auto_extent(aperture_radius: float) -> float:
    """Transverse grid half-diagonal rule: wide enough for both the diffracted
    beam at the ground (about 1.1 m waist for the defaults) and the aperture."""
    return max(8.0, 4.0 * aperture_radius)


@dataclass(frozen=True)
class RunConfig:
    # physical
    wavelength: float = 1.064e-6
    pulse_fwhm: float = 200e-15
    sat_altitude: float = 500e3
    zenith_angle_deg: float = 0.0
    h0: float = 3000.0
    aperture_radius: float = 4.0
    waist: float = 0.15
    a_ground: float = 9.6e-14
    v_rms: float = 21.0
    outer_scale: float = 5.0
    inner_scale: float = 0.01
    eta0: float = 0.9
    # numerical
    span_sigmas: float = 12.0
    n_omega: int = 4096
    n_xy: int = 512
    extent: float | None = None          # None -> auto_extent rule
    n_screens: int = 10
    n_subharmonics: int = 3
    n_realizations: int = 500
    seed: int | None = None
    # sweep
    d_values: tuple[int, ...] = _DEFAULT_D
    eta1_values: tuple[float, ...] = _DEFAULT_ETA1
    detection_eta1_values: tuple[float, ...] | None = None   # None -> 0..eta0
    tm_orders: tuple[int, ...] = _DEFAULT_TM_ORDERS
    l_values: tuple[int, ...] = _DEFAULT_L

    def __post_init__(self) -> None:
        if not 0.0 < self.eta0 <= 1.0:
            raise ValueError(f"eta0 must be in (0, 1], got {self.eta0}")
        if any(d < 2 for d in self.d_values):
            raise ValueError("every subspace dimension must be at least 2")
        if max(self.d_values, default=2) > len(self.tm_orders):
            raise ValueError("largest d exceeds the number of candidate pulse orders")
        if max(self.d_values, default=2) > len(self.l_values):
            raise ValueError("largest d exceeds the number of candidate vortex charges")

    # -- derived quantities ------------------------------------------------

    @property
    def omega0(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def sigma(self) -> float:
        return pulse_sigma(self.pulse_fwhm)

    @property
    def zenith_angle(self) -> float:
        return math.radians(self.zenith_angle_deg)

    @property
    def effective_extent(self) -> float:
        return self.extent if self.extent is not None else auto_extent(self.aperture_radius)

    @property
    def detection_grid(self) -> tuple[float, ...]:
        if self.detection_eta1_values is not None:
            return self.detection_eta1_values
        return tuple(i / 100 for i in range(int(round(self.eta0 * 100)) + 1))

    def spectral_grid(self) -> SpectralGrid:
        return build_grid(self.omega0, self.sigma, span_sigmas=self.span_sigmas,
                          n_points=self.n_omega)

    def layer_stack(self) -> LayerStack:
        return build_layers(self.h0, self.sat_altitude, self.zenith_angle, self.omega0)

    def turbulence_params(self) -> TurbulenceParams:
        return TurbulenceParams(
            wavelength=self.wavelength, h0=self.h0, sat_altitude=self.sat_altitude,
            zenith_angle=self.zenith_angle, waist=self.waist,
            aperture_radius=self.aperture_radius, a_ground=self.a_ground,
            v_rms=self.v_rms, outer_scale=self.outer_scale,
            inner_scale=self.inner_scale, n_xy=self.n_xy,
            extent=self.effective_extent, n_screens=self.n_screens,
            n_subharmonics=self.n_subharmonics, l_values=self.l_values)


_SECTIONS = {
    "physical": ("wavelength", "pulse_fwhm", "sat_altitude", "zenith_angle_deg",
                 "h0", "aperture_radius", "waist", "a_ground", "v_rms",
                 "outer_scale", "inner_scale", "eta0"),
    "numerical": ("span_sigmas", "n_omega", "n_xy", "extent", "n_screens",
                  "n_subharmonics", "n_realizations", "seed"),
    "sweep": ("d_values", "eta1_values", "detection_eta1_values", "tm_orders",
              "l_values"),
}
_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _format_value(value: object) -> str:
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return " ".join(repr(v) for v in value)
    return repr(value)


def parse_option(name: str, raw: str) -> object:
    """Parse one option value using the field's annotated type; 'auto'/'none'
    map to None where the field allows it."""
    if name not in _FIELD_TYPES:
        raise ValueError(f"unknown config option {name!r}")
    ftype = _FIELD_TYPES[name]
    raw = raw.strip()
    if raw.lower() in ("auto", "none", ""):
        if "None" not in ftype:
            raise ValueError(f"option {name} requires an explicit value")
        return None
    if ftype.startswith("tuple[int"):
        return tuple(int(tok) for tok in raw.replace(",", " ").split())
    if ftype.startswith("tuple[float"):
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    if ftype.startswith("int"):
        return int(raw)
    return float(raw)


def load_config(path: str | Path) -> RunConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    overrides: dict[str, object] = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ValueError(f"unknown config section [{section}]")
        for name, raw in parser.items(section):
            if name not in _SECTIONS[section]:
                raise ValueError(f"unknown option {name!r} in section [{section}]")
            overrides[name] = parse_option(name, raw)
    return RunConfig(**overrides)


def dump_config(config: RunConfig) -> str:
    parser = configparser.ConfigParser()
    for section, names in _SECTIONS.items():
        parser[section] = {name: _format_value(getattr(config, name)) for name in names}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def save_config(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(config))


def desk_scale_config(seed: int = 7, **overrides: object) -> RunConfig:
    """Small configuration for tests and quick runs: coarse transverse grid,
    few realizations, three subspace dimensions.  Physics parameters match the
    production defaults so results stay comparable, only resolution drops."""
    base = RunConfig(n_xy=256, extent=12.0, n_realizations=50, seed=seed,
                     d_values=(2, 4, 8))
    return replace(base, **overrides) if overrides else base
