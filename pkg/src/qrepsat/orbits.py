"""Circular equatorial orbits and the geometry of a satellite repeater chain.

Everything lives in the equatorial plane. Angles are central angles measured
from the midpoint between the two parties A and B, which sit symmetrically at
``-L/2`` and ``+L/2`` along the equator. Ground points rotate with the Earth;
satellites move rigidly along one orbit ("string of pearls"). Time ``t = 0`` is
the middle of the fly-by, when the chain is centred over the A-B arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .linkbudget import LinkGeometry, LinkType

EARTH_RADIUS = 6.371e6  # m
MU_EARTH = 3.986004418e14  # m^3 / s^2
EARTH_ROTATION = 7.2921159e-5  # rad / s
ELEVATION_THRESHOLD = math.radians(15.0)
LOS_MARGIN = 10e3  # m of atmosphere an inter-satellite chord must clear
SECONDS_PER_DAY = 86400.0

MIN_ALTITUDE = 200e3
MAX_ALTITUDE = 2000e3

SOURCE = "source"
REPEATER = "repeater"
PARTY = "party"


@dataclass(frozen=True)
class OrbitConfig:
    altitude: float = 500e3  # m
    direction: str = "prograde"
    phase0: float = 0.0

    def __post_init__(self):
        if not MIN_ALTITUDE <= self.altitude <= MAX_ALTITUDE:
            raise ValueError(
                f"altitude must be in [200, 2000] km, got {self.altitude / 1e3:g} km"
            )
        if self.direction not in ("prograde", "retrograde"):
            raise ValueError(f"direction must be prograde or retrograde, got {self.direction!r}")
        if not 0.0 <= self.phase0 < 2 * math.pi:
            raise ValueError(f"phase0 must be in [0, 2pi), got {self.phase0}")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "prograde" else -1.0


@dataclass(frozen=True)
class GroundStation:
    angle: float  # rad along the equator at t = 0
    role: str = PARTY


@dataclass(frozen=True)
class Satellite:
    phase: float  # rad, ground-track angle at t = 0
    role: str


@dataclass(frozen=True)
class ElementaryLink:
    """A source satellite and the two nodes it feeds.

    Each end is ``("sat", index)`` or ``("ground", index)`` into the
    constellation's satellite or ground-station tuples.
    """

    source: int
    left: tuple
    right: tuple


@dataclass(frozen=True)
class Constellation:
    altitude: float
    satellites: tuple
    ground_stations: tuple
    links: tuple

    @property
    def sources(self):
        return [s for s in self.satellites if s.role == SOURCE]

    @property
    def repeaters(self):
        return [s for s in self.satellites if s.role == REPEATER]


@dataclass(frozen=True)
class FlybyWindow:
    start: float
    end: float

    @property
    def duration(self) -> float:
        return max(0.0, self.end - self.start)

    @property
    def is_empty(self) -> bool:
        return not self.end > self.start


EMPTY_WINDOW = FlybyWindow(0.0, 0.0)


@dataclass(frozen=True)
class GeometrySnapshot:
    """All elementary-link arms at time ``t``: one ``(left, right)`` pair of
    :class:`LinkGeometry` per elementary link, in chain order A to B."""

    t: float
    links: tuple


# -- kinematics --------------------------------------------------------------

def angular_rate(altitude: float) -> float:
    """Inertial angular speed of a circular orbit, rad/s."""
    return math.sqrt(MU_EARTH / (EARTH_RADIUS + altitude) ** 3)


def orbital_period(altitude: float) -> float:
    return 2 * math.pi / angular_rate(altitude)


def orbits_per_day(altitude: float) -> float:
    return SECONDS_PER_DAY / orbital_period(altitude)


def relative_rate(config: OrbitConfig) -> float:
    """Angular speed of the satellites relative to the rotating ground."""
    return config.sign * angular_rate(config.altitude) - EARTH_ROTATION


def satellite_angle(config: OrbitConfig, phase: float, t: float) -> float:
    return config.phase0 + phase + config.sign * angular_rate(config.altitude) * t


def satellite_position(config: OrbitConfig, phase: float, t: float) -> np.ndarray:
    """Cartesian position (m) in the equatorial plane."""
    a = satellite_angle(config, phase, t)
    r = EARTH_RADIUS + config.altitude
    return np.array([r * math.cos(a), r * math.sin(a)])


def ground_station_angle(station: GroundStation, t: float) -> float:
    return station.angle + EARTH_ROTATION * t


# -- pointwise geometry ------------------------------------------------------

def slant_range(sat_angle: float, altitude: float, gs_angle: float) -> float:
    s = math.sin(0.5 * (sat_angle - gs_angle))
    return math.sqrt(altitude * altitude
                     + 4.0 * EARTH_RADIUS * (EARTH_RADIUS + altitude) * s * s)


def elevation(sat_angle: float, altitude: float, gs_angle: float) -> float:
    """Elevation of the satellite above the station's horizon, rad.

    Negative values mean the satellite is below the horizon.
    """
    delta = sat_angle - gs_angle
    r = EARTH_RADIUS + altitude
    s = math.sin(0.5 * delta)
    return math.atan2(altitude - 2.0 * r * s * s, r * abs(math.sin(delta)))


def zenith_angle(sat_angle: float, altitude: float, gs_angle: float) -> float:
    return 0.5 * math.pi - elevation(sat_angle, altitude, gs_angle)


def inter_satellite_distance(phase_a: float, phase_b: float, altitude: float) -> float:
    return 2.0 * (EARTH_RADIUS + altitude) * math.sin(0.5 * abs(phase_a - phase_b))


def has_line_of_sight(phase_a: float, phase_b: float, altitude: float) -> bool:
    """True if the chord between two satellites clears the atmosphere margin."""
    closest = (EARTH_RADIUS + altitude) * math.cos(0.5 * abs(phase_a - phase_b))
    return closest > EARTH_RADIUS + LOS_MARGIN


def max_central_angle(altitude: float, min_elevation: float = ELEVATION_THRESHOLD) -> float:
    """Largest satellite-station central angle with elevation >= ``min_elevation``."""
    r = EARTH_RADIUS + altitude
    return math.acos(EARTH_RADIUS * math.cos(min_elevation) / r) - min_elevation


def single_pass_duration(config: OrbitConfig,
                         min_elevation: float = ELEVATION_THRESHOLD) -> float:
    """Closed-form visibility time of one overhead pass above ``min_elevation``."""
    return 2.0 * max_central_angle(config.altitude, min_elevation) / abs(relative_rate(config))


# -- chain layout ------------------------------------------------------------

def _validate_chain(scheme, total_distance_km, n):
    if scheme not in ("OO", "OG"):
        raise ValueError(f"orbit geometry needs scheme OO or OG, got {scheme!r}")
    if not total_distance_km > 0:
        raise ValueError(f"total distance must be positive, got {total_distance_km}")
    if total_distance_km * 1e3 > math.pi * EARTH_RADIUS:
        raise ValueError(f"total distance {total_distance_km} km exceeds half the equator")
    if int(n) != n or n < 0:
        raise ValueError(f"nesting level must be a non-negative integer, got {n!r}")


def place_constellation(scenario) -> Constellation:
    """Satellites and ground stations for an OO or OG chain.

    OG, and OO with ``n = 0``: the A-B arc is cut into ``2**n`` equal segments;
    ground stations sit at the junctions and a source satellite above each
    segment midpoint.

    OO with ``n >= 1``: ``2**(n+1) - 1`` satellites, alternating source and
    repeater, equally spaced from directly above A to directly above B. The
    end sources therefore pass over their party in step, which keeps the
    fly-by independent of ``L``.
    """
    scheme = scenario.scheme
    n = scenario.nesting_level
    _validate_chain(scheme, scenario.total_distance_km, n)
    arc = scenario.total_distance_km * 1e3 / EARTH_RADIUS
    a_angle = -0.5 * arc
    segments = 2 ** int(n)
    altitude = scenario.orbit.altitude

    if scheme == "OG" or n == 0:
        ground = tuple(
            GroundStation(a_angle + k * arc / segments,
                          PARTY if k in (0, segments) else REPEATER)
            for k in range(segments + 1)
        )
        sats = tuple(Satellite(a_angle + (k + 0.5) * arc / segments, SOURCE)
                     for k in range(segments))
        links = tuple(ElementaryLink(k, ("ground", k), ("ground", k + 1))
                      for k in range(segments))
        return Constellation(altitude, sats, ground, links)

    count = 2 * segments - 1
    spacing = arc / (count - 1)
    sats = tuple(Satellite(a_angle + j * spacing, SOURCE if j % 2 == 0 else REPEATER)
                 for j in range(count))
    ground = (GroundStation(a_angle, PARTY), GroundStation(-a_angle, PARTY))
    links = []
    for k in range(segments):
        j = 2 * k
        left = ("ground", 0) if k == 0 else ("sat", j - 1)
        right = ("ground", 1) if k == segments - 1 else ("sat", j + 1)
        links.append(ElementaryLink(j, left, right))
    return Constellation(altitude, sats, ground, tuple(links))


def _downlink_pairs(constellation: Constellation):
    """(satellite phase, station angle) for every down-link arm, plus the
    (link, arm) slot each one fills."""
    sat_phase, gs_angle, slots = [], [], []
    for k, link in enumerate(constellation.links):
        for a, end in enumerate((link.left, link.right)):
            if end[0] == "ground":
                sat_phase.append(constellation.satellites[link.source].phase)
                gs_angle.append(constellation.ground_stations[end[1]].angle)
                slots.append((k, a))
    return np.array(sat_phase), np.array(gs_angle), slots


def _rates(orbit: OrbitConfig):
    return orbit.sign * angular_rate(orbit.altitude), EARTH_ROTATION


def _min_margin(orbit, sat0, gs0, times):
    sat_rate, gs_rate = _rates(orbit)
    _, elev = _kernels.station_geometry(np.ascontiguousarray(times, dtype=np.float64),
                                        sat0, gs0, sat_rate, gs_rate,
                                        EARTH_RADIUS, orbit.altitude)
    return elev.min(axis=1) - ELEVATION_THRESHOLD


def _edge(orbit, sat0, gs0, step, direction):
    """Time at which the visibility margin first drops below zero going
    away from t = 0 in ``direction`` (+1 or -1)."""
    horizon = math.pi / abs(relative_rate(orbit))
    grid = direction * np.arange(0.0, horizon + step, step)
    margin = _min_margin(orbit, sat0, gs0, grid)
    below = np.nonzero(margin < 0.0)[0]
    if below.size == 0:  # pragma: no cover - a satellite always sets within half a period
        raise RuntimeError("visibility never ends")
    i = int(below[0])

    def f(t):
        return float(_min_margin(orbit, sat0, gs0, np.array([t]))[0])

    return brentq(f, grid[i - 1], grid[i], xtol=1e-9, rtol=1e-15)


def flyby_window(scenario) -> FlybyWindow:
    """Interval around t = 0 during which every down-link of the chain is
    above the elevation threshold.

    For OG (and n = 0) that is every source seeing both of its ground
    stations; for OO it is the two end sources seeing A and B. Returns
    :data:`EMPTY_WINDOW` when the geometry never allows it.
    """
    constellation = place_constellation(scenario)
    sat0, gs0, _ = _downlink_pairs(constellation)
    orbit = scenario.orbit
    if _min_margin(orbit, sat0, gs0, np.array([0.0]))[0] < 0.0:
        return EMPTY_WINDOW
    step = scenario.time_step
    start = _edge(orbit, sat0, gs0, step, -1)
    end = _edge(orbit, sat0, gs0, step, +1)
    return FlybyWindow(start, end)


def sample_times(window: FlybyWindow, step: float) -> np.ndarray:
    """Fixed-step samples from the window start; includes the end point when
    the duration is a whole number of steps."""
    if window.is_empty:
        return np.empty(0)
    count = int(math.floor(window.duration / step + 1e-9)) + 1
    return window.start + step * np.arange(count)


@dataclass(frozen=True)
class LinkArrays:
    """Arm geometry over time in the layout the transmittance kernel expects.

    ``lengths`` and ``zeniths`` are (T, K, 2); ``kinds`` is (K, 2) with the
    ``_kernels.ARM_*`` codes; ``ground_receiver`` is (K, 2) and is True where
    the arm ends at a ground station.
    """

    times: np.ndarray
    lengths: np.ndarray
    zeniths: np.ndarray
    kinds: np.ndarray
    ground_receiver: np.ndarray


def link_arrays(scenario, times: np.ndarray) -> LinkArrays:
    constellation = place_constellation(scenario)
    orbit = scenario.orbit
    h = orbit.altitude
    nk = len(constellation.links)
    nt = len(times)
    lengths = np.zeros((nt, nk, 2))
    zeniths = np.zeros((nt, nk, 2))
    kinds = np.full((nk, 2), _kernels.ARM_ISL, dtype=np.int64)
    ground = np.zeros((nk, 2), dtype=bool)

    for k, link in enumerate(constellation.links):
        src = constellation.satellites[link.source].phase
        for a, end in enumerate((link.left, link.right)):
            if end[0] == "ground":
                kinds[k, a] = _kernels.ARM_DOWN
                ground[k, a] = True
            else:
                other = constellation.satellites[end[1]].phase
                lengths[:, k, a] = inter_satellite_distance(src, other, h)
                if not has_line_of_sight(src, other, h):
                    kinds[k, a] = _kernels.ARM_BLOCKED

    sat0, gs0, slots = _downlink_pairs(constellation)
    if slots and nt:
        sat_rate, gs_rate = _rates(orbit)
        rng, elev = _kernels.station_geometry(np.ascontiguousarray(times, dtype=np.float64),
                                              sat0, gs0, sat_rate, gs_rate,
                                              EARTH_RADIUS, h)
        for p, (k, a) in enumerate(slots):
            lengths[:, k, a] = rng[:, p]
            zeniths[:, k, a] = 0.5 * math.pi - elev[:, p]
    return LinkArrays(np.asarray(times, dtype=np.float64), lengths, zeniths, kinds, ground)


def geometry_series(scenario, time_step: float | None = None) -> list:
    """Arm geometry sampled at a fixed step across the fly-by window.

    An empty window gives an empty list.
    """
    step = scenario.time_step if time_step is None else time_step
    if not step > 0:
        raise ValueError(f"time step must be positive, got {step}")
    times = sample_times(flyby_window(scenario), step)
    arrays = link_arrays(scenario, times)
    snapshots = []
    for i, t in enumerate(times):
        links = []
        for k in range(arrays.kinds.shape[0]):
            arms = []
            for a in range(2):
                code = arrays.kinds[k, a]
                kind = LinkType.DOWN_LINK if code == _kernels.ARM_DOWN else LinkType.INTER_SATELLITE
                arms.append(LinkGeometry(kind, float(arrays.lengths[i, k, a]),
                                         float(arrays.zeniths[i, k, a]),
                                         blocked=bool(code == _kernels.ARM_BLOCKED)))
            links.append(tuple(arms))
        snapshots.append(GeometrySnapshot(float(t), tuple(links)))
    return snapshots
