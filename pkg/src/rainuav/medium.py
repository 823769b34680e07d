"""Effective permittivity of a rain-filled atmosphere.

Permittivities are relative (air = 1) complex numbers in the engineering
convention ``eps = eps' - j eps''`` for an ``exp(+j w t)`` time dependence, so
a lossy medium has a *negative* imaginary part. The split-step phase screen
``exp(-j k0 (n**2 - 1) dz / 2)`` then decays the field, which is the single
place the convention matters.

Drop diameters are in millimetres, the drop-size density in m^-3 mm^-1 and
polarizabilities in m^3, so ``N(D) * alpha(D) * dD`` is dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, NumericalError

EPS_AIR = 1.0 + 0.0j

MP_N0 = 8000.0  # m^-3 mm^-1
MP_LAMBDA_COEF = 4.1  # mm^-1 at 1 mm/h
MP_LAMBDA_EXP = -0.21

PRINTED = "printed"
TEXTBOOK = "textbook"
POLARIZABILITY_FORMS = (PRINTED, TEXTBOOK)

# Floor on the drop fall speed; the exponential fit goes negative below ~0.11 mm
# and a zero speed would make the wind correction factor vanish.
MIN_FALL_SPEED = 0.1  # m/s


@dataclass(frozen=True)
class RainParameters:
    """Rain medium description.

    ``horizontal_wind_speed == 0`` disables the wind correction.
    """

    rain_rate: float  # mm/h
    temperature: float = 20.0  # deg C
    horizontal_wind_speed: float = 0.0  # m/s
    d_min: float = 0.1  # mm
    d_max: float = 8.0  # mm
    sphere_threshold: float = 1.25  # mm

    def __post_init__(self):
        if not self.rain_rate >= 0:
            raise DomainError(f"rain_rate must be >= 0, got {self.rain_rate}")
        if not self.horizontal_wind_speed >= 0:
            raise DomainError(f"horizontal_wind_speed must be >= 0, got {self.horizontal_wind_speed}")
        if not 0 < self.d_min < self.sphere_threshold < self.d_max:
            raise DomainError(
                "need 0 < d_min < sphere_threshold < d_max, got "
                f"{self.d_min}, {self.sphere_threshold}, {self.d_max}"
            )
        if self.d_max > 8.0:
            raise DomainError(f"d_max must be <= 8 mm (larger drops break up), got {self.d_max}")


class PolarizationFactors(NamedTuple):
    l_a: float
    l_b: float
    l_c: float


def _debye(frequency, temperature):
    theta = 300.0 / (273.15 + temperature)
    eps_static = 77.66 + 103.3 * (theta - 1.0)
    eps_inf = 5.48
    f_relax = 20.09 - 142.4 * (theta - 1.0) + 294.0 * (theta - 1.0) ** 2  # GHz
    return eps_inf + (eps_static - eps_inf) / (1.0 + 1j * np.asarray(frequency) / f_relax)


def water_permittivity(frequency: float, temperature: float = 20.0) -> complex:
    """Relative permittivity of liquid water from a single Debye relaxation.

    Static permittivity, high-frequency limit and relaxation frequency follow
    Liebe's temperature fits. ``frequency`` in GHz (1-100), ``temperature`` in
    deg C (0-40).
    """
    if not 1.0 <= frequency <= 100.0:
        raise DomainError(f"frequency {frequency} GHz outside [1, 100]")
    if not 0.0 <= temperature <= 40.0:
        raise DomainError(f"temperature {temperature} C outside [0, 40]")
    return complex(_debye(frequency, temperature))


def mp_slope(rain_rate):
    """Marshall-Palmer slope parameter in mm^-1."""
    return MP_LAMBDA_COEF * np.power(rain_rate, MP_LAMBDA_EXP)


def drop_size_density(d, rain_rate):
    """Marshall-Palmer drop count per m^3 per mm of diameter."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("drop diameter must be non-negative")
    if not rain_rate > 0:
        raise DomainError(f"rain_rate must be positive, got {rain_rate}")
    out = MP_N0 * np.exp(-mp_slope(rain_rate) * d)
    return float(out) if out.ndim == 0 else out


def axis_ratio(d):
    """Oblate drop axis ratio a/b, linear fit in diameter clamped to [0.4, 1]."""
    return np.clip(1.03 - 0.062 * np.asarray(d, dtype=float), 0.4, 1.0)


def eccentricity(axis_ratio: float):
    r = np.asarray(axis_ratio, dtype=float)
    if np.any((r <= 0) | (r > 1)):
        raise DomainError("axis ratio must lie in (0, 1]")
    e = np.sqrt(1.0 - r * r)
    return float(e) if e.ndim == 0 else e


_SERIES_LIMIT = 0.05
# Taylor coefficients in e^2 of the oblate l_a; c[n+1] = c[n] (2n + 2) / (2n + 5)
_SERIES = [1.0 / 3.0]
for _n in range(9):
    _SERIES.append(_SERIES[-1] * (2 * _n + 2) / (2 * _n + 5))


def _depolarization_a(e):
    e = np.asarray(e, dtype=float)
    small = e < _SERIES_LIMIT
    es = np.where(small, 1.0, e)
    direct = (1.0 - np.sqrt(1.0 - es * es) / es * np.arcsin(es)) / (es * es)
    e2 = e * e
    series = np.zeros_like(e2)
    for c in reversed(_SERIES):
        series = series * e2 + c
    l_a = np.where(small, series, direct)
    # snap to a 2^-52 grid so that 1 - l_a, its half and every partial sum of
    # the three factors are exact: they then add to 1 exactly in any order
    return np.round(l_a * 2.0**52) / 2.0**52


def polarization_factors(e: float) -> PolarizationFactors:
    """Depolarization factors of an oblate spheroid with eccentricity ``e``.

    ``l_a`` belongs to the short symmetry axis; the other two are equal and the
    three sum to one. Below ``e = 0.05`` a Taylor series replaces the closed
    form, which loses digits to cancellation.
    """
    if not 0.0 <= e < 1.0:
        raise DomainError(f"eccentricity must lie in [0, 1), got {e}")
    l_a = float(_depolarization_a(e))
    l_b = 0.5 - 0.5 * l_a
    return PolarizationFactors(l_a, l_b, l_b)


def _check_form(form):
    if form not in POLARIZABILITY_FORMS:
        raise DomainError(f"unknown polarizability form {form!r}; expected one of {POLARIZABILITY_FORMS}")


def sphere_polarizability(d, eps_w, form: str = PRINTED):
    """Polarizability (m^3) of a spherical drop of diameter ``d`` mm.

    ``form="printed"`` keeps the ``eps_w - 2`` denominator as it appears in the
    source derivation; ``form="textbook"`` uses the Clausius-Mossotti
    ``eps_w + 2``. The printed variant turns the drop into a gain medium.
    """
    _check_form(form)
    r3 = (np.asarray(d, dtype=float) * 1e-3 / 2.0) ** 3
    denom = eps_w - 2.0 * EPS_AIR if form == PRINTED else eps_w + 2.0 * EPS_AIR
    return 4.0 * np.pi * EPS_AIR * (eps_w - EPS_AIR) / denom * r3


def ellipsoid_polarizability(d, eps_w, l_i, form: str = PRINTED):
    """Polarizability (m^3) of a spheroidal drop along an axis with factor ``l_i``.

    The drop volume is that of the equivolumetric sphere of diameter ``d`` mm.
    ``form="printed"`` uses ``eps_w + L (eps_w - 1)`` in the denominator,
    ``form="textbook"`` uses ``1 + L (eps_w - 1)``; only the latter reduces to
    the Clausius-Mossotti sphere at ``L = 1/3``.
    """
    _check_form(form)
    volume = 4.0 / 3.0 * np.pi * (np.asarray(d, dtype=float) * 1e-3 / 2.0) ** 3
    base = eps_w if form == PRINTED else EPS_AIR
    return volume * EPS_AIR * (eps_w - EPS_AIR) / (base + l_i * (eps_w - EPS_AIR))


def _fall_speed_fit(d):
    return 9.65 - 10.3 * np.exp(-0.6 * np.asarray(d, dtype=float))


def terminal_velocity(d, d_min: float = 0.1, d_max: float = 8.0):
    """Terminal fall speed (m/s) of a drop of diameter ``d`` mm.

    Exponential fit ``9.65 - 10.3 exp(-0.6 D)``, floored at ``MIN_FALL_SPEED``.
    """
    d = np.asarray(d, dtype=float)
    if np.any((d < d_min) | (d > d_max)):
        raise DomainError(f"drop diameter outside [{d_min}, {d_max}] mm")
    v = np.maximum(_fall_speed_fit(d), MIN_FALL_SPEED)
    return float(v) if v.ndim == 0 else v


def _floor_diameter():
    # diameter where the fit crosses the speed floor
    return -np.log((9.65 - MIN_FALL_SPEED) / 10.3) / 0.6


def wind_correction(d, v_h: float, d_min: float = 0.1, d_max: float = 8.0):
    """Factor cos(atan(v_h / v_v(D))) from the wind-tilted drop velocity."""
    if not v_h >= 0:
        raise DomainError(f"horizontal wind speed must be >= 0, got {v_h}")
    v_v = terminal_velocity(d, d_min, d_max)
    return np.cos(np.arctan(v_h / v_v))


def _sphere_integrand(d, rain_rate, eps_w, form, v_h, params):
    alpha = sphere_polarizability(d, eps_w, form)
    out = drop_size_density(d, rain_rate) * alpha * (3.0 * EPS_AIR / (3.0 * EPS_AIR - alpha))
    if v_h > 0:
        out = out / wind_correction(d, v_h, params.d_min, params.d_max)
    return out


def _ellipsoid_integrand(d, rain_rate, eps_w, form, v_h, params):
    factors = polarization_factors_array(eccentricity(axis_ratio(d)))
    n = drop_size_density(d, rain_rate)
    total = np.zeros_like(d, dtype=complex)
    for l_i in factors:
        alpha = ellipsoid_polarizability(d, eps_w, l_i, form)
        total += n * alpha * (EPS_AIR / (EPS_AIR - l_i * alpha))
    total /= 3.0
    if v_h > 0:
        total = total / wind_correction(d, v_h, params.d_min, params.d_max)
    return total


def polarization_factors_array(e):
    """Vectorized ``polarization_factors`` returning three arrays."""
    e = np.asarray(e, dtype=float)
    if np.any((e < 0) | (e >= 1)):
        raise DomainError("eccentricity must lie in [0, 1)")
    l_a = _depolarization_a(e)
    l_b = 0.5 - 0.5 * l_a
    return l_a, l_b, l_b


def _simpson(func, breakpoints, panels):
    total = 0.0 + 0.0j
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        x = np.linspace(lo, hi, 2 * panels + 1)
        y = func(x)
        total += simpson(y.real, x=x) + 1j * simpson(y.imag, x=x)
    return total


def _excess_permittivity(params, frequency, form, panels):
    eps_w = water_permittivity(frequency, params.temperature)
    v_h = params.horizontal_wind_speed
    lo, thr, hi = params.d_min, params.sphere_threshold, params.d_max
    sphere_pts = [lo, thr]
    ellipsoid_pts = [thr, hi]
    if v_h > 0:
        # split at the kink introduced by the fall-speed floor
        d_floor = _floor_diameter()
        for pts in (sphere_pts, ellipsoid_pts):
            if pts[0] < d_floor < pts[-1]:
                pts.insert(1, d_floor)

    def sphere(d):
        return _sphere_integrand(d, params.rain_rate, eps_w, form, v_h, params)

    def ellipsoid(d):
        return _ellipsoid_integrand(d, params.rain_rate, eps_w, form, v_h, params)

    return _simpson(sphere, sphere_pts, panels) + _simpson(ellipsoid, ellipsoid_pts, panels)


def effective_permittivity(
    params: RainParameters,
    frequency: float,
    form: str = PRINTED,
    panels: int = 256,
    rtol: float = 1e-10,
) -> complex:
    """Relative effective permittivity of rain at ``frequency`` GHz.

    Spherical drops up to ``sphere_threshold`` and orientation-averaged
    spheroids above it are integrated over the Marshall-Palmer spectrum with
    composite Simpson rules of ``panels`` panels per branch. The result is
    recomputed with twice the panels and a ``NumericalError`` is raised if the
    two differ by more than ``rtol`` relative to ``eps_eff``.
    """
    _check_form(form)
    if params.rain_rate == 0:
        return EPS_AIR
    coarse = _excess_permittivity(params, frequency, form, panels)
    fine = _excess_permittivity(params, frequency, form, 2 * panels)
    result = EPS_AIR + fine
    if not np.isfinite(result):
        raise NumericalError(f"non-finite effective permittivity at R={params.rain_rate}, f={frequency}")
    change = abs(fine - coarse) / abs(result)
    if change > rtol:
        raise NumericalError(
            f"quadrature not converged: relative change {change:.3e} > {rtol:.1e} "
            f"going from {panels} to {2 * panels} panels (R={params.rain_rate} mm/h, f={frequency} GHz)"
        )
    return complex(result)


def refractive_index(eps) -> complex:
    """Principal square root of the relative permittivity."""
    return complex(np.sqrt(complex(eps)))


def paraxial_attenuation_db_per_km(eps, frequency: float) -> float:
    """Field attenuation implied by the split-step phase screen, in dB/km.

    The screen ``exp(-j k0 (eps - 1) dz / 2)`` decays the amplitude at
    ``k0 * (-Im eps) / 2`` nepers per metre.
    """
    k0 = wavenumber(frequency)
    return float(20.0 * np.log10(np.e) * k0 * (-complex(eps).imag) / 2.0 * 1e3)


SPEED_OF_LIGHT = 299_792_458.0


def wavelength(frequency: float) -> float:
    """Free-space wavelength in metres for ``frequency`` in GHz."""
    return SPEED_OF_LIGHT / (frequency * 1e9)


def wavenumber(frequency: float) -> float:
    return 2.0 * np.pi / wavelength(frequency)
