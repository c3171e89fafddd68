"""Layered model atmosphere: pressure/temperature profile, refractivity, turbulence strength.

The mean annual global reference atmosphere (ITU-R P.835) supplies temperature
and pressure versus geometric altitude.  Group-velocity dispersion enters
through the altitude-dependent refractive index

    n(lambda, h) = 1 + 77.6e-6 (1 + 7.52e-3 lambda^-2) P(h)/T(h)

with lambda in micrometres, P in hPa and T in kelvin.  Above 100 km the index
is exactly 1.  Turbulence strength follows the Hufnagel-Valley profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "reference_profile",
    "refractive_index",
    "dispersion_coefficients",
    "AtmosphericLayer",
    "LayerStack",
    "build_layers",
    "hv_cn2",
    "fried_parameter",
    "fresnel_number_product",
]

SPEED_OF_LIGHT = 299792458.0  # m/s

VACUUM_FLOOR_M = 100e3   # the index is unity at and above this altitude
LAYER_STEP_M = 1000.0

# refractivity constants: n - 1 = KA (1 + KB/lambda_um^2) P/T
_KA = 77.6e-6
_KB = 7.52e-3


def _geopotential_km(h_km: float) -> float:
    return 6356.766 * h_km / (6356.766 + h_km)


def reference_profile(h_m: float) -> tuple[float, float]:
    """Temperature [K] and pressure [hPa] of the reference atmosphere at geometric altitude h_m.

    Valid from sea level to 100 km; piecewise in geopotential height below
    86 km and in geometric height above.
    """
    h_km = h_m / 1000.0
    if h_km < 0.0:
        raise ValueError(f"altitude must be non-negative, got {h_m} m")
    if h_km > 100.0:
        raise ValueError(f"profile undefined above 100 km, got {h_m} m")
    if h_km <= 86.0:
        hp = _geopotential_km(h_km)
        if hp <= 11.0:
            t = 288.15 - 6.5 * hp
            p = 1013.25 * (288.15 / t) ** (-34.1632 / 6.5)
        elif hp <= 20.0:
            t = 216.65
            p = 226.3226 * math.exp(-34.1632 * (hp - 11.0) / 216.65)
        elif hp <= 32.0:
            t = 216.65 + (hp - 20.0)
            p = 54.74980 * (216.65 / t) ** 34.1632
        elif hp <= 47.0:
            t = 228.65 + 2.8 * (hp - 32.0)
            p = 8.680187 * (228.65 / t) ** (34.1632 / 2.8)
        elif hp <= 51.0:
            t = 270.65
            p = 1.109106 * math.exp(-34.1632 * (hp - 47.0) / 270.65)
        elif hp <= 71.0:
            t = 270.65 - 2.8 * (hp - 51.0)
            p = 0.6694167 * (270.65 / t) ** (-34.1632 / 2.8)
        else:
            t = 214.65 - 2.0 * (hp - 71.0)
            p = 0.03956649 * (214.65 / t) ** (-34.1632 / 2.0)
    else:
        if h_km <= 91.0:
            t = 186.8673
        else:
            t = 263.1905 - 76.3232 * math.sqrt(1.0 - ((h_km - 91.0) / 19.9429) ** 2)
        p = math.exp(95.571899 - 4.011801 * h_km + 6.424731e-2 * h_km ** 2
                     - 4.789660e-4 * h_km ** 3 + 1.340543e-6 * h_km ** 4)
    return t, p


def refractivity_terms(h_m: float) -> tuple[float, float]:
    """Decompose n(omega) = 1 + s + u omega^2 at altitude h_m.

    s is the static refractivity (dimensionless) and u [s^2/rad^2] the
    dispersive curvature; both vanish at and above the vacuum floor.  The
    quadratic form is exact for the lambda^-2 refractivity law, so downstream
    phase, group delay and dispersion follow without series truncation.
    """
    if h_m >= VACUUM_FLOOR_M:
        return 0.0, 0.0
    t, p = reference_profile(h_m)
    ratio = p / t
    s = _KA * ratio
    u = _KA * _KB * ratio / (2.0 * math.pi * SPEED_OF_LIGHT * 1e6) ** 2
    return s, u


def refractive_index(lambda_um, h_m: float):
    """Mean refractive index at wavelength lambda_um [micrometres] and altitude h_m [m].

    Accepts scalar or array wavelengths; exactly 1.0 at or above 100 km.
    """
    lam = np.asarray(lambda_um, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("wavelength must be positive")
    if h_m >= VACUUM_FLOOR_M:
        return np.ones_like(lam) if lam.ndim else 1.0
    t, p = reference_profile(h_m)
    n = 1.0 + _KA * (1.0 + _KB / (lam * lam)) * p / t
    return n if lam.ndim else float(n)


def dispersion_coefficients(h_m: float, omega0: float) -> tuple[float, float, float]:
    """Wavenumber k [1/m], group slowness k' [s/m], and GVD k'' [s^2/m] at omega0.

    Derivatives are analytic: with n = 1 + s + u omega^2,
    k = ((1+s) omega + u omega^3)/c, k' = ((1+s) + 3 u omega^2)/c, k'' = 6 u omega/c.
    """
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    s, u = refractivity_terms(h_m)
    k0 = ((1.0 + s) * omega0 + u * omega0 ** 3) / SPEED_OF_LIGHT
    k1 = ((1.0 + s) + 3.0 * u * omega0 ** 2) / SPEED_OF_LIGHT
    k2 = 6.0 * u * omega0 / SPEED_OF_LIGHT
    return k0, k1, k2


@dataclass(frozen=True)
class AtmosphericLayer:
    """One homogeneous slab of the layered atmosphere.

    Refractive properties are those of the layer's lower boundary altitude.
    path_length is measured along the (slant) propagation direction.
    """

    h_lo: float
    h_hi: float
    path_length: float
    s: float           # static refractivity at h_lo
    u: float           # dispersive curvature at h_lo [s^2/rad^2]
    k0: float
    k1: float
    k2: float

    def wavenumber(self, omega: np.ndarray) -> np.ndarray:
        """k(omega) [1/m], exact at every sample."""
        return ((1.0 + self.s) * omega + self.u * omega ** 3) / SPEED_OF_LIGHT


@dataclass(frozen=True)
class LayerStack:
    """Full downlink path: ground altitude h0 up to the satellite at altitude sat_altitude."""

    h0: float
    sat_altitude: float
    zenith_angle: float   # radians
    omega0: float
    layers: tuple[AtmosphericLayer, ...] = field(repr=False)

    @property
    def total_path(self) -> float:
        return sum(layer.path_length for layer in self.layers)

    def total_group_delay(self) -> float:
        """sum k' L over layers [s]."""
        return math.fsum(layer.k1 * layer.path_length for layer in self.layers)

    def total_gdd(self) -> float:
        """Accumulated group-delay dispersion sum k'' L [s^2]."""
        return math.fsum(layer.k2 * layer.path_length for layer in self.layers)


def build_layers(h0: float, sat_altitude: float, zenith_angle: float,
                 omega0: float) -> LayerStack:
    """Slice the path into 1 km dispersive slabs up to 100 km plus one vacuum slab.

    Layer boundaries start at h0 and step by 1 km; if the spacing does not land
    exactly on 100 km the last dispersive slab is a partial one.  Slant paths
    scale every slab length by sec(zenith_angle).
    """
    if h0 < 0:
        raise ValueError(f"ground altitude must be non-negative, got {h0}")
    if sat_altitude <= VACUUM_FLOOR_M:
        raise ValueError("satellite must sit above the 100 km vacuum floor, "
                         f"got {sat_altitude}")
    if h0 >= sat_altitude:
        raise ValueError("ground altitude must lie below the satellite")
    if not 0.0 <= zenith_angle < math.pi / 2:
        raise ValueError(f"zenith angle must be in [0, pi/2), got {zenith_angle}")
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")

    secant = 1.0 / math.cos(zenith_angle)
    bounds = list(np.arange(h0, VACUUM_FLOOR_M, LAYER_STEP_M))
    bounds.append(VACUUM_FLOOR_M)
    if len(bounds) >= 2 and bounds[-1] - bounds[-2] < 1e-9:
        del bounds[-2]

    layers = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        s, u = refractivity_terms(lo)
        k0, k1, k2 = dispersion_coefficients(lo, omega0)
        layers.append(AtmosphericLayer(h_lo=lo, h_hi=hi, path_length=(hi - lo) * secant,
                                       s=s, u=u, k0=k0, k1=k1, k2=k2))
    # vacuum slab from 100 km to the satellite
    layers.append(AtmosphericLayer(
        h_lo=VACUUM_FLOOR_M, h_hi=sat_altitude,
        path_length=(sat_altitude - VACUUM_FLOOR_M) * secant,
        s=0.0, u=0.0,
        k0=omega0 / SPEED_OF_LIGHT, k1=1.0 / SPEED_OF_LIGHT, k2=0.0))
    return LayerStack(h0=h0, sat_altitude=sat_altitude, zenith_angle=zenith_angle,
                      omega0=omega0, layers=tuple(layers))


def hv_cn2(h_m, a_ground: float = 9.6e-14, v_rms: float = 21.0):
    """Hufnagel-Valley refractive-index structure parameter C_n^2(h) [m^-2/3].

    a_ground is the ground-level strength [m^-2/3], v_rms the rms wind [m/s];
    h_m may be scalar or array (metres).
    """
    h = np.asarray(h_m, dtype=float)
    if np.any(h < 0):
        raise ValueError("altitude must be non-negative")
    if a_ground < 0 or v_rms < 0:
        raise ValueError("turbulence parameters must be non-negative")
    val = (0.00594 * (v_rms / 27.0) ** 2 * (1e-5 * h) ** 10 * np.exp(-h / 1000.0)
           + 2.7e-16 * np.exp(-h / 1500.0)
           + a_ground * np.exp(-h / 100.0))
    return val if val.ndim else float(val)


def fried_parameter(cn2_integral: float, wavelength: float) -> float:
    """Plane-wave Fried coherence length r0 = (0.423 k^2 int Cn^2 ds)^(-3/5) [m]."""
    if cn2_integral <= 0:
        raise ValueError("integrated Cn^2 must be positive")
    k = 2.0 * math.pi / wavelength
    return (0.423 * k * k * cn2_integral) ** (-3.0 / 5.0)


def fresnel_number_product(r_transmit: float, r_receive: float,
                           wavelength: float, path_length: float) -> float:
    """Product of transmitter and receiver aperture areas over (lambda L)^2.

    Values well below 1 indicate a diffraction-dominated link; above 1 the
    receiver captures the beam geometrically.
    """
    if min(r_transmit, r_receive, wavelength, path_length) <= 0:
        raise ValueError("all geometry arguments must be positive")
    a_t = math.pi * r_transmit ** 2
    a_r = math.pi * r_receive ** 2
    return a_t * a_r / (wavelength * path_length) ** 2
