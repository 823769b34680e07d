"""Split-step Fourier solver for the paraxial (parabolic) wave equation.

The reduced field ``u`` is marched along the range axis ``z``. Each step
applies the free-space diffraction operator in the transverse wavenumber
domain, then a refractive phase screen over the full step, then the
absorbing taper. Works on one transverse axis (2-D mode) or two (3-D mode).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, NumericalError
from .medium import wavelength, wavenumber

DEFAULT_MAX_ANGLE_DEG = 15.0


def max_spacing(frequency: float, max_angle_deg: float = DEFAULT_MAX_ANGLE_DEG) -> float:
    """Largest transverse spacing resolving plane waves up to ``max_angle_deg``."""
    return wavelength(frequency) / (2.0 * math.sin(math.radians(max_angle_deg)))


def next_pow2(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


@dataclass(frozen=True)
class TransverseGrid:
    """Uniform transverse sampling; ``origin`` is the coordinate of node 0."""

    n_points: tuple[int, ...]
    spacing: tuple[float, ...]
    origin: tuple[float, ...] | None = None

    def __post_init__(self):
        n_points = tuple(int(n) for n in np.atleast_1d(self.n_points))
        spacing = tuple(float(s) for s in np.atleast_1d(self.spacing))
        if len(spacing) == 1 and len(n_points) > 1:
            spacing = spacing * len(n_points)
        if len(n_points) not in (1, 2) or len(spacing) != len(n_points):
            raise ConfigurationError("grid must have one or two transverse axes")
        for n in n_points:
            if n < 2 or n & (n - 1):
                raise ConfigurationError(f"n_points must be a power of two, got {n}")
        if any(s <= 0 for s in spacing):
            raise ConfigurationError("grid spacing must be positive")
        if self.origin is None:
            origin = tuple(-(n // 2) * s for n, s in zip(n_points, spacing))
        else:
            origin = tuple(float(o) for o in np.atleast_1d(self.origin))
            if len(origin) != len(n_points):
                raise ConfigurationError("origin must have one entry per axis")
        object.__setattr__(self, "n_points", n_points)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def centered(cls, n_points, spacing):
        """Grid whose node ``n // 2`` sits at coordinate zero on every axis."""
        return cls(n_points, spacing)

    @property
    def ndim(self) -> int:
        return len(self.n_points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_points

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(n * s for n, s in zip(self.n_points, self.spacing))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def coords(self, axis: int = 0) -> np.ndarray:
        return self.origin[axis] + np.arange(self.n_points[axis]) * self.spacing[axis]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*[self.coords(a) for a in range(self.ndim)], indexing="ij")

    def wavenumbers(self, axis: int = 0) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points[axis], d=self.spacing[axis])

    def nearest_index(self, point: Sequence[float]) -> tuple[int, ...]:
        point = np.atleast_1d(point)
        idx = []
        for a in range(self.ndim):
            i = int(round((point[a] - self.origin[a]) / self.spacing[a]))
            if not 0 <= i < self.n_points[a]:
                raise ConfigurationError(f"point {tuple(point)} lies outside the grid")
            idx.append(i)
        return tuple(idx)

    def check_sampling(self, frequency: float, max_angle_deg: float = DEFAULT_MAX_ANGLE_DEG):
        limit = max_spacing(frequency, max_angle_deg)
        for s in self.spacing:
            if s > limit * (1 + 1e-12):
                raise ConfigurationError(
                    f"grid spacing {s:.4g} m exceeds the {limit:.4g} m limit for "
                    f"{frequency} GHz at a {max_angle_deg} deg paraxial cone; refine the grid"
                )


@dataclass
class ComplexField:
    """Reduced field samples on a transverse grid at range ``current_range``."""

    amplitude: np.ndarray
    grid: TransverseGrid
    current_range: float = 0.0

    def __post_init__(self):
        self.amplitude = np.asarray(self.amplitude, dtype=complex)
        if self.amplitude.shape != self.grid.shape:
            raise ConfigurationError(f"field shape {self.amplitude.shape} does not match grid {self.grid.shape}")

    def norm(self) -> float:
        """Discrete L2 norm, ``sqrt(sum |u|^2 * cell_volume)``."""
        return float(np.sqrt(np.sum(np.abs(self.amplitude) ** 2) * self.grid.cell_volume))

    def copy(self) -> "ComplexField":
        return ComplexField(self.amplitude.copy(), self.grid, self.current_range)

    def __mul__(self, scalar):
        return ComplexField(self.amplitude * scalar, self.grid, self.current_range)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SourceSpec:
    """Unit-amplitude Gaussian source.

    ``center`` holds one transverse coordinate per grid axis; in a vertical
    slice the single transverse axis is height, so ``center == (height,)``.
    """

    beam_waist: float
    center: tuple[float, ...] = (0.0,)
    amplitude: float = 1.0
    height: float = 0.0


@dataclass(frozen=True)
class PropagationConfig:
    frequency: float  # GHz
    step_dz: float  # m
    n_steps: int
    absorber_width: float = 0.0
    refractive_index: complex | np.ndarray = 1.0

    def __post_init__(self):
        if not self.step_dz > 0:
            raise ConfigurationError("step_dz must be positive")
        if self.n_steps < 0:
            raise ConfigurationError("n_steps must be non-negative")
        if not 0.0 <= self.absorber_width < 0.5:
            raise ConfigurationError("absorber_width must lie in [0, 0.5)")

    @property
    def k0(self) -> float:
        return wavenumber(self.frequency)


def gaussian_beam(spec: SourceSpec, grid: TransverseGrid) -> ComplexField:
    """Sample ``amplitude * exp(-|r - r0|^2 / w0^2)`` on ``grid``."""
    if spec.beam_waist < 2.0 * max(grid.spacing):
        raise ConfigurationError(
            f"beam waist {spec.beam_waist} m is under-resolved by spacing {max(grid.spacing)} m"
        )
    center = np.atleast_1d(spec.center)
    if len(center) != grid.ndim:
        raise ConfigurationError("source center needs one coordinate per grid axis")
    r2 = sum((x - c) ** 2 for x, c in zip(grid.mesh(), center))
    return ComplexField(spec.amplitude * np.exp(-r2 / spec.beam_waist**2), grid, 0.0)


def spectral_propagator(k, dz: float, k0: float):
    """Free-space diffraction factor ``exp(-j k^2 dz / (2 k0))``."""
    if not k0 > 0:
        raise ConfigurationError("k0 must be positive")
    return np.exp(-1j * np.asarray(k, dtype=float) ** 2 * dz / (2.0 * k0))


def absorber_taper(grid: TransverseGrid, width: float) -> np.ndarray | None:
    """Raised-cosine taper falling from 1 to 0 over the outer ``width`` of each axis."""
    if width <= 0:
        return None
    taper = np.ones(grid.shape)
    for a, n in enumerate(grid.n_points):
        m = int(round(width * n))
        if m < 1:
            continue
        ramp = 0.5 * (1.0 + np.cos(np.pi * np.arange(1, m + 1) / m))  # 1 -> 0 towards the edge
        profile = np.ones(n)
        profile[n - m :] = ramp
        profile[:m] = ramp[::-1]
        shape = [1] * grid.ndim
        shape[a] = n
        taper = taper * profile.reshape(shape)
    return taper


def _diffraction_operator(grid: TransverseGrid, dz: float, k0: float) -> np.ndarray:
    ops = [spectral_propagator(grid.wavenumbers(a), dz, k0) for a in range(grid.ndim)]
    if grid.ndim == 1:
        return ops[0]
    return np.outer(ops[0], ops[1])


def _phase_screen(n, dz: float, k0: float):
    n = np.asarray(n, dtype=complex)
    return np.exp(-1j * k0 * (n * n - 1.0) * dz / 2.0)


def _advance(u, diffraction, screen, taper):
    u = np.fft.ifftn(diffraction * np.fft.fftn(u))
    u = u * screen
    if taper is not None:
        u = u * taper
    return u


def step(field: ComplexField, refractive_index, dz: float, k0: float, taper=None) -> ComplexField:
    """Advance ``field`` by one range step ``dz``."""
    n = np.asarray(refractive_index)
    if n.ndim and n.shape != field.grid.shape:
        raise ConfigurationError("refractive index profile does not match the grid")
    u = _advance(field.amplitude, _diffraction_operator(field.grid, dz, k0), _phase_screen(n, dz, k0), taper)
    if not np.all(np.isfinite(u)):
        raise NumericalError(f"non-finite field after step to range {field.current_range + dz} m")
    return ComplexField(u, field.grid, field.current_range + dz)


@dataclass
class PropagationResult:
    """Sampled fields plus the per-step field at the probe node.

    ``probe_ranges[i]`` is the range of ``probe_values[i]``; index 0 is the
    source plane.
    """

    samples: list[ComplexField]
    probe_ranges: np.ndarray
    probe_values: np.ndarray
    probe_index: tuple[int, ...] = field(default=())

    @property
    def on_axis(self) -> np.ndarray:
        return np.abs(self.probe_values)


def propagate(
    source: ComplexField,
    config: PropagationConfig,
    sample_every: int = 0,
    probe: Sequence[int] | None = None,
) -> PropagationResult:
    """March ``source`` through ``config.n_steps`` steps.

    Every ``sample_every``-th field (0 disables sampling, the source itself is
    always sample 0) is kept. ``probe`` is the grid index recorded after every
    step; it defaults to the node nearest the grid centre.
    """
    grid = source.grid
    if probe is None:
        probe = tuple(n // 2 for n in grid.n_points)
    probe = tuple(int(i) for i in probe)
    n = np.asarray(config.refractive_index)
    if n.ndim and n.shape != grid.shape:
        raise ConfigurationError("refractive index profile does not match the grid")
    k0 = config.k0
    diffraction = _diffraction_operator(grid, config.step_dz, k0)
    screen = _phase_screen(n, config.step_dz, k0)
    taper = absorber_taper(grid, config.absorber_width)

    u = source.amplitude.copy()
    samples = [ComplexField(u.copy(), grid, source.current_range)]
    values = np.empty(config.n_steps + 1, dtype=complex)
    values[0] = u[probe]
    for i in range(1, config.n_steps + 1):
        u = _advance(u, diffraction, screen, taper)
        values[i] = u[probe]
        if sample_every and i % sample_every == 0:
            samples.append(ComplexField(u.copy(), grid, source.current_range + i * config.step_dz))
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(values))):
        raise NumericalError("non-finite field encountered during propagation")
    ranges = source.current_range + np.arange(config.n_steps + 1) * config.step_dz
    return PropagationResult(samples, ranges, values, probe)


def rayleigh_range(beam_waist: float, frequency: float) -> float:
    return wavenumber(frequency) * beam_waist**2 / 2.0


def beam_radius(beam_waist: float, frequency: float, z: float) -> float:
    """Analytic 1/e field radius of a diffracting Gaussian beam."""
    return beam_waist * math.sqrt(1.0 + (z / rayleigh_range(beam_waist, frequency)) ** 2)


def near_field_range(beam_waist: float, frequency: float) -> float:
    """Range excluded from slope fits: 10 Rayleigh ranges or 100 m, whichever is larger."""
    return max(10.0 * rayleigh_range(beam_waist, frequency), 100.0)


def measured_beam_radius(field: ComplexField, axis: int = 0) -> float:
    """1/e field radius from the second moment of |u|^2 along ``axis``."""
    power = np.abs(field.amplitude) ** 2
    other = tuple(a for a in range(field.grid.ndim) if a != axis)
    profile = power.sum(axis=other) if other else power
    x = field.grid.coords(axis)
    total = profile.sum()
    mean = (x * profile).sum() / total
    var = ((x - mean) ** 2 * profile).sum() / total
    return 2.0 * math.sqrt(var)


def extract_specific_attenuation(
    ranges,
    on_axis,
    reference,
    fit_start: float = 0.0,
    min_span: float = 1000.0,
    max_rms_residual_db: float = 0.05,
) -> float:
    """Excess attenuation in dB/km from on-axis logs of a lossy and a reference run.

    Fits ``20 log10(|u| / |u_ref|)`` against range for ranges ``>= fit_start``
    by least squares and returns minus the slope. Raises ``NumericalError``
    when the fit residual exceeds ``max_rms_residual_db`` (usually near-field
    contamination) and ``ConfigurationError`` when the fitted span is shorter
    than ``min_span`` metres.
    """
    ranges = np.asarray(ranges, dtype=float)
    mask = ranges >= fit_start
    if mask.sum() < 3 or ranges[mask][-1] - ranges[mask][0] < min_span * (1 - 1e-9):
        raise ConfigurationError(
            f"attenuation fit needs at least {min_span} m of range beyond {fit_start} m"
        )
    r_km = ranges[mask] / 1e3
    ratio_db = 20.0 * np.log10(np.abs(np.asarray(on_axis)[mask]) / np.abs(np.asarray(reference)[mask]))
    slope, intercept = np.polyfit(r_km, ratio_db, 1)
    rms = float(np.sqrt(np.mean((ratio_db - (slope * r_km + intercept)) ** 2)))
    if rms > max_rms_residual_db:
        raise NumericalError(f"attenuation fit residual {rms:.3g} dB exceeds {max_rms_residual_db} dB")
    return float(-slope)


def write_probe_csv(path, result: PropagationResult) -> None:
    """Write ``range, re, im, magnitude_db`` rows for the probe record."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["range", "re", "im", "magnitude_db"])
        for r, v in zip(result.probe_ranges, result.probe_values):
            mag = abs(v)
            db = 20.0 * math.log10(mag) if mag > 0 else float("-inf")
            w.writerow([repr(float(r)), repr(float(v.real)), repr(float(v.imag)), repr(db)])
