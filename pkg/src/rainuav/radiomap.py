"""RSS and SIR maps on the flight-altitude plane.

Each base station radiates a unit Gaussian beam. Its field at the flight
altitude is obtained from vertical-slice split-step runs (height is the
transverse axis, horizontal distance is range) swept over azimuth, then
interpolated from the polar samples onto the Cartesian node grid.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import medium, pwe
from .container import read_container, write_container
from .errors import ConfigurationError, DomainError, FormatError

SCHEMA_VERSION = 1
MAGIC = b"RAINUAV-RSSMAP\n"
INTERFERENCE_FLOOR = 1e-30


class MediumMismatchWarning(UserWarning):
    """A loaded map was built for a different medium than requested."""


@dataclass(frozen=True)
class BaseStation:
    position: tuple[float, float, float]  # x, y, antenna height (m)
    beam_waist: float = 1.0


@dataclass(frozen=True)
class Scenario:
    """Airspace box, flight plane, base stations and medium.

    ``bounds`` is ``(x_lo, y_lo, z_lo, x_hi, y_hi, z_hi)`` in metres. The
    flight plane is sampled at cell centres of a ``resolution`` grid.
    """

    bounds: tuple[float, float, float, float, float, float]
    altitude: float
    base_stations: tuple[BaseStation, ...]
    frequency: float  # GHz
    medium: medium.RainParameters
    resolution: float
    polarizability: str = medium.PRINTED
    azimuths: int = 64
    range_step: float = 5.0
    absorber_width: float = 0.15
    max_angle_deg: float = pwe.DEFAULT_MAX_ANGLE_DEG
    domain_beam_radii: float = 12.0

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        object.__setattr__(self, "base_stations", tuple(self.base_stations))
        x_lo, y_lo, z_lo, x_hi, y_hi, z_hi = self.bounds
        if not (x_lo < x_hi and y_lo < y_hi and z_lo <= z_hi):
            raise ConfigurationError(f"degenerate airspace bounds {self.bounds}")
        if not z_lo <= self.altitude <= z_hi:
            raise ConfigurationError(f"flight altitude {self.altitude} m outside [{z_lo}, {z_hi}]")
        if len(self.base_stations) < 2:
            raise ConfigurationError("at least two base stations are needed for SIR")
        for i, bs in enumerate(self.base_stations):
            x, y, _ = bs.position
            if not (x_lo <= x <= x_hi and y_lo <= y <= y_hi):
                raise ConfigurationError(
                    f"base station {i} at ({x}, {y}) lies outside the footprint; move it inside the bounds"
                )
        if self.resolution <= 0:
            raise ConfigurationError("grid resolution must be positive")
        for extent in (x_hi - x_lo, y_hi - y_lo):
            cells = extent / self.resolution
            if abs(cells - round(cells)) > 1e-9:
                raise ConfigurationError(
                    f"footprint extent {extent} m is not a whole number of {self.resolution} m cells"
                )
        if self.azimuths < 1:
            raise ConfigurationError("need at least one azimuth")

    @property
    def geometry(self) -> "MapGeometry":
        x_lo, y_lo, _, x_hi, y_hi, _ = self.bounds
        return MapGeometry(
            x_lo, y_lo, self.resolution,
            int(round((x_hi - x_lo) / self.resolution)),
            int(round((y_hi - y_lo) / self.resolution)),
            self.altitude,
        )

    def medium_digest(self) -> str:
        return medium_digest(self.medium, self.frequency, self.polarizability)

    def digest(self) -> str:
        return _digest(_canonical(self))


def _canonical(obj):
    if hasattr(obj, "__dataclass_fields__"):
        obj = asdict(obj)
    return json.dumps(obj, sort_keys=True, default=float)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def medium_digest(rain: medium.RainParameters, frequency: float, polarizability: str) -> str:
    """Hash of everything that determines the propagation medium."""
    return _digest(_canonical({"rain": asdict(rain), "frequency": frequency, "polarizability": polarizability}))


@dataclass(frozen=True)
class MapGeometry:
    x_lo: float
    y_lo: float
    spacing: float
    nx: int
    ny: int
    altitude: float

    @property
    def x(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.spacing

    @property
    def y(self) -> np.ndarray:
        return self.y_lo + (np.arange(self.ny) + 0.5) * self.spacing

    @property
    def x_hi(self) -> float:
        return self.x_lo + self.nx * self.spacing

    @property
    def y_hi(self) -> float:
        return self.y_lo + self.ny * self.spacing

    def contains(self, q) -> bool:
        return self.x_lo <= q[0] <= self.x_hi and self.y_lo <= q[1] <= self.y_hi

    def node_of(self, q) -> tuple[int, int]:
        """Index of the node cell containing position ``q``."""
        if not self.contains(q):
            raise DomainError(f"position {tuple(q)} outside the map footprint")
        i = min(int((q[0] - self.x_lo) // self.spacing), self.nx - 1)
        j = min(int((q[1] - self.y_lo) // self.spacing), self.ny - 1)
        return i, j

    def position_of(self, node) -> np.ndarray:
        i, j = node
        return np.array([self.x_lo + (i + 0.5) * self.spacing, self.y_lo + (j + 0.5) * self.spacing])


@dataclass
class RssMap:
    """Per-base-station RSS ``|u|^2`` indexed ``[m, ix, iy]``."""

    rss: np.ndarray
    geometry: MapGeometry
    frequency: float
    medium_digest: str
    scenario_digest: str = ""
    base_stations: list = field(default_factory=list)

    @property
    def n_base_stations(self) -> int:
        return self.rss.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.geometry.nx * self.geometry.ny

    def at(self, node) -> np.ndarray:
        i, j = node
        if not (0 <= i < self.geometry.nx and 0 <= j < self.geometry.ny):
            raise DomainError(f"node {tuple(node)} outside the grid")
        return self.rss[:, i, j]


@dataclass
class SirMap:
    sir_linear: np.ndarray
    association: np.ndarray
    geometry: MapGeometry

    @property
    def sir_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.sir_linear)

    def at(self, node) -> float:
        i, j = node
        if not (0 <= i < self.geometry.nx and 0 <= j < self.geometry.ny):
            raise DomainError(f"node {tuple(node)} outside the grid")
        return float(self.sir_linear[i, j])


# ---------------------------------------------------------------- construction


def slice_profile(scenario: Scenario, bs: BaseStation, max_range: float):
    """Complex field at the flight altitude versus horizontal range for one slice."""
    f = scenario.frequency
    dx = pwe.max_spacing(f, scenario.max_angle_deg)
    h = bs.position[2]
    n_steps = int(math.ceil(max_range / scenario.range_step))
    spread = pwe.beam_radius(bs.beam_waist, f, n_steps * scenario.range_step)
    half = abs(scenario.altitude - h) / 2.0 + scenario.domain_beam_radii * spread / 2.0
    half /= 1.0 - 2.0 * scenario.absorber_width
    n = pwe.next_pow2(int(math.ceil(2.0 * half / dx)))
    mid = 0.5 * (scenario.altitude + h)
    i_alt = int(round((scenario.altitude - (mid - n // 2 * dx)) / dx))
    origin = scenario.altitude - i_alt * dx  # altitude falls exactly on node i_alt
    grid = pwe.TransverseGrid((n,), dx, (origin,))
    grid.check_sampling(f, scenario.max_angle_deg)
    source = pwe.gaussian_beam(pwe.SourceSpec(bs.beam_waist, (h,), height=h), grid)

    if scenario.medium.rain_rate > 0:
        eps = medium.effective_permittivity(scenario.medium, f, scenario.polarizability)
        n_index = medium.refractive_index(eps)
    else:
        n_index = 1.0
    config = pwe.PropagationConfig(f, scenario.range_step, n_steps, scenario.absorber_width, n_index)
    result = pwe.propagate(source, config, probe=(i_alt,))
    return result.probe_ranges, result.probe_values


def polar_rss(scenario: Scenario, bs: BaseStation, max_range: float):
    """RSS on an ``(azimuth, range)`` grid for one base station.

    The medium is horizontally homogeneous and the ground is flat, so every
    azimuthal slice solves the same problem; it is solved once and shared.
    """
    ranges, values = slice_profile(scenario, bs, max_range)
    azimuths = 2.0 * np.pi * np.arange(scenario.azimuths) / scenario.azimuths
    rss = np.broadcast_to(np.abs(values) ** 2, (scenario.azimuths, ranges.size)).copy()
    return azimuths, ranges, rss


def interpolate_polar(azimuths, ranges, table, r, phi):
    """Bilinear interpolation in (azimuth, range), periodic in azimuth."""
    n_az = azimuths.size
    d_az = 2.0 * np.pi / n_az
    dr = ranges[1] - ranges[0]
    a = np.mod(phi, 2.0 * np.pi) / d_az
    a0 = np.floor(a).astype(int)
    ta = a - a0
    a0 %= n_az
    a1 = (a0 + 1) % n_az
    s = (np.asarray(r) - ranges[0]) / dr
    if np.any(s < -1e-9) or np.any(s > ranges.size - 1 + 1e-9):
        raise ConfigurationError("interpolation point beyond the propagated range")
    s = np.clip(s, 0, ranges.size - 1)
    r0 = np.minimum(np.floor(s).astype(int), ranges.size - 2)
    tr = s - r0
    v00 = table[a0, r0]
    v01 = table[a0, r0 + 1]
    v10 = table[a1, r0]
    v11 = table[a1, r0 + 1]
    return (1 - ta) * ((1 - tr) * v00 + tr * v01) + ta * ((1 - tr) * v10 + tr * v11)


def build_rss_map(scenario: Scenario) -> RssMap:
    """Per-base-station RSS grids on the flight plane."""
    geo = scenario.geometry
    xx, yy = np.meshgrid(geo.x, geo.y, indexing="ij")
    maps = []
    for bs in scenario.base_stations:
        dx = xx - bs.position[0]
        dy = yy - bs.position[1]
        r = np.hypot(dx, dy)
        phi = np.arctan2(dy, dx)
        azimuths, ranges, table = polar_rss(scenario, bs, float(r.max()) + scenario.range_step)
        maps.append(interpolate_polar(azimuths, ranges, table, r, phi))
    return RssMap(
        np.stack(maps),
        geo,
        scenario.frequency,
        scenario.medium_digest(),
        scenario.digest(),
        [list(bs.position) for bs in scenario.base_stations],
    )


# ------------------------------------------------------------------- SIR


def best_association(rss: RssMap, node) -> int:
    """Index of the strongest cell at ``node``; ties go to the lowest index."""
    return int(np.argmax(rss.at(node)))


def sir_at(rss: RssMap, node, b: int) -> float:
    """Serving power over summed interference, the latter floored at 1e-30."""
    power = rss.at(node)
    if not 0 <= b < power.size:
        raise DomainError(f"cell index {b} out of range")
    interference = power.sum() - power[b]
    return float(power[b] / max(interference, INTERFERENCE_FLOOR))


def sir_map(rss: RssMap) -> SirMap:
    """Best-association SIR at every node."""
    association = np.argmax(rss.rss, axis=0)
    serving = np.take_along_axis(rss.rss, association[None], axis=0)[0]
    interference = rss.rss.sum(axis=0) - serving
    sir = serving / np.maximum(interference, INTERFERENCE_FLOOR)
    return SirMap(sir, association, rss.geometry)


def path_sir_total(sir: SirMap, path) -> float:
    """Sum of best-association SIR (linear) over the nodes of ``path``."""
    return float(sum(sir.at(node) for node in path))


# ------------------------------------------------------------------ persistence


def write_sir_csv(path, sir: SirMap) -> None:
    """One row per node: x, y, sir_db, association."""
    geo = sir.geometry
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "sir_db", "association"])
        for i, x in enumerate(geo.x):
            for j, y in enumerate(geo.y):
                w.writerow([repr(float(x)), repr(float(y)), repr(float(sir.sir_db[i, j])), int(sir.association[i, j])])


def write_rss_csv(path, rss: RssMap) -> None:
    """One row per node: x, y and the RSS of every base station."""
    geo = rss.geometry
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"] + [f"rss_{m}" for m in range(rss.rss.shape[0])])
        for i, x in enumerate(geo.x):
            for j, y in enumerate(geo.y):
                w.writerow([repr(float(x)), repr(float(y))] + [repr(float(v)) for v in rss.rss[:, i, j]])


def save_map(path, rss: RssMap) -> None:
    """Write the map as magic line, length-prefixed JSON header, float64 payload."""
    payload = np.ascontiguousarray(rss.rss, dtype="<f8").tobytes()
    header = {
        "schema_version": SCHEMA_VERSION,
        "shape": list(rss.rss.shape),
        "dtype": "<f8",
        "geometry": asdict(rss.geometry),
        "frequency_ghz": rss.frequency,
        "medium_digest": rss.medium_digest,
        "scenario_digest": rss.scenario_digest,
        "base_stations": rss.base_stations,
    }
    write_container(path, MAGIC, header, payload)


def load_map(path, expected_medium_digest: str | None = None) -> RssMap:
    """Read a map written by ``save_map``.

    Raises ``FormatError`` on any corruption or schema mismatch; warns with
    ``MediumMismatchWarning`` when ``expected_medium_digest`` differs.
    """
    header, payload = read_container(path, MAGIC, SCHEMA_VERSION, "an RSS map")
    try:
        shape = tuple(int(s) for s in header["shape"])
        geometry = MapGeometry(**header["geometry"])
        if header["dtype"] != "<f8" or len(payload) != 8 * int(np.prod(shape)):
            raise FormatError(f"{path}: payload size does not match header")
        rss = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
        result = RssMap(
            rss, geometry, float(header["frequency_ghz"]), header["medium_digest"],
            header["scenario_digest"], header["base_stations"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: malformed header ({exc})") from exc
    if expected_medium_digest is not None and expected_medium_digest != result.medium_digest:
        warnings.warn(
            f"{path} was built for a different medium (digest {result.medium_digest[:12]}, "
            f"expected {expected_medium_digest[:12]})",
            MediumMismatchWarning,
            stacklevel=2,
        )
    return result
