"""ITU-R power-law rain attenuation and the PWE cross-check harness."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from . import medium, pwe
from .errors import DomainError

COEFFICIENT_FILE = "p838_horizontal.csv"


@dataclass(frozen=True)
class ItuCoefficients:
    frequency: float  # GHz
    k: float
    alpha: float


@dataclass(frozen=True)
class ComparisonRow:
    frequency: float
    itu_db_per_km: float
    pwe_db_per_km: float

    @property
    def relative_error(self) -> float:
        if self.itu_db_per_km == 0:
            return 0.0 if self.pwe_db_per_km == 0 else math.inf
        return abs(self.pwe_db_per_km - self.itu_db_per_km) / self.itu_db_per_km


@lru_cache(maxsize=None)
def coefficient_table() -> tuple[ItuCoefficients, ...]:
    """Horizontal-polarization (k, alpha) rows shipped with the package, sorted by frequency."""
    text = resources.files("rainuav.data").joinpath(COEFFICIENT_FILE).read_text()
    rows = list(csv.DictReader(text.splitlines()))
    table = tuple(
        ItuCoefficients(float(r["frequency_ghz"]), float(r["k"]), float(r["alpha"])) for r in rows
    )
    return tuple(sorted(table, key=lambda c: c.frequency))


def coefficients(frequency: float, table=None) -> ItuCoefficients:
    """Coefficients at ``frequency`` GHz.

    Between rows, ``log k`` and ``alpha`` are interpolated linearly in
    ``log f``.
    """
    table = coefficient_table() if table is None else table
    freqs = np.array([c.frequency for c in table])
    if not freqs[0] <= frequency <= freqs[-1]:
        raise DomainError(f"frequency {frequency} GHz outside coefficient table [{freqs[0]}, {freqs[-1]}]")
    log_f = np.log10(freqs)
    x = math.log10(frequency)
    log_k = np.interp(x, log_f, np.log10([c.k for c in table]))
    alpha = np.interp(x, log_f, [c.alpha for c in table])
    return ItuCoefficients(frequency, float(10.0**log_k), float(alpha))


def itu_specific_attenuation(rain_rate: float, frequency: float, table=None) -> float:
    """Specific attenuation ``k R^alpha`` in dB/km."""
    if rain_rate < 0:
        raise DomainError(f"rain_rate must be non-negative, got {rain_rate}")
    c = coefficients(frequency, table)
    if rain_rate == 0:
        return 0.0
    return c.k * rain_rate**c.alpha


@dataclass(frozen=True)
class PweSettings:
    """Numerical setup of the 2-D attenuation extraction run."""

    waist_wavelengths: float = 20.0
    fit_span: float = 1200.0  # m beyond the near field
    step_dz: float = 5.0
    absorber_width: float = 0.15
    domain_beam_radii: float = 16.0
    max_angle_deg: float = pwe.DEFAULT_MAX_ANGLE_DEG
    temperature: float = 20.0
    wind_speed: float = 0.0
    polarizability: str = medium.PRINTED
    panels: int = 256


def pwe_specific_attenuation(rain_rate: float, frequency: float, settings: PweSettings | None = None) -> float:
    """Rain attenuation in dB/km extracted from paired 2-D split-step runs.

    A Gaussian beam is propagated once through rain and once through free
    space; the slope of their on-axis dB difference beyond the near field is
    the specific attenuation.
    """
    s = settings or PweSettings()
    if s.waist_wavelengths <= 0:
        raise DomainError("waist_wavelengths must be positive")
    lam = medium.wavelength(frequency)
    waist = s.waist_wavelengths * lam
    start = pwe.near_field_range(waist, frequency)
    total = start + s.fit_span
    n_steps = int(math.ceil(total / s.step_dz))
    extent = s.domain_beam_radii * pwe.beam_radius(waist, frequency, n_steps * s.step_dz)
    dx = pwe.max_spacing(frequency, s.max_angle_deg)
    grid = pwe.TransverseGrid.centered(pwe.next_pow2(int(math.ceil(extent / dx))), dx)
    grid.check_sampling(frequency, s.max_angle_deg)
    source = pwe.gaussian_beam(pwe.SourceSpec(waist, (0.0,)), grid)

    if rain_rate == 0:
        n_rain = 1.0
    else:
        rain = medium.RainParameters(rain_rate, s.temperature, s.wind_speed)
        eps = medium.effective_permittivity(rain, frequency, s.polarizability, s.panels)
        n_rain = medium.refractive_index(eps)

    base = pwe.PropagationConfig(frequency, s.step_dz, n_steps, s.absorber_width, 1.0)
    free = pwe.propagate(source, base)
    wet = pwe.propagate(source, pwe.PropagationConfig(frequency, s.step_dz, n_steps, s.absorber_width, n_rain))
    gamma = pwe.extract_specific_attenuation(
        free.probe_ranges, wet.probe_values, free.probe_values, fit_start=start, min_span=1000.0
    )
    return gamma + 0.0  # no negative zero in reports


def compare_models(rain_rate: float, frequencies, settings: PweSettings | None = None) -> list[ComparisonRow]:
    rows = []
    for f in frequencies:
        itu = itu_specific_attenuation(rain_rate, f)
        rows.append(ComparisonRow(float(f), itu, pwe_specific_attenuation(rain_rate, f, settings)))
    return rows


def write_comparison_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frequency_ghz", "itu_db_km", "pwe_db_km", "rel_err"])
        for r in rows:
            w.writerow([repr(r.frequency), repr(r.itu_db_per_km), repr(r.pwe_db_per_km), repr(r.relative_error)])
