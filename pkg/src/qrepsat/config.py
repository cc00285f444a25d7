"""Run configuration: an INI file read with :mod:`configparser`.

Sections and keys (all optional; missing hardware keys take the default
figures of :class:`qrepsat.chain.HardwareParams`)::

    [scenario]
    schemes = OO, GG, OG
    distance_min_km = 1000
    distance_max_km = 20000
    distance_step_km = 500
    # or an explicit list, which wins over the range:
    # distances_km = 2000, 5000
    nesting_levels = 0, 1, 2, 3
    altitude_km = 500
    direction = prograde
    time_step_s = 1
    bottleneck = min-then-average
    preset =                      ; city pair name, overrides distances

    [hardware]
    p_qnd = 0.5
    p_write = 0.9
    p_read = 0.9
    eta_d = 0.9
    p_dark = 1e-5
    source_rate_hz = 20e6
    direct_rate_hz = 1e9
    f0 = 0.98
    alpha_db_per_km = 0.17
    beta = 1.1
    beam_waist_m = 0.25
    m2 = 3
    wavelength_nm = 580
    receiver_radius_m = 0.5
    repeater_receiver_radius_m = 0.5
    fov_sr = 4e-10
    filter_bandwidth_nm = 0.5

    [noise]
    preset = full-moon            ; full-moon | daytime | dark
    sky_brightness = 1.5e-6       ; W m^-2 sr^-1 nm^-1, overrides the preset

    [output]
    path = results.csv
    format = csv                  ; csv | json
    passes_per_day = 1
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .chain import BOTTLENECK_MODES, HardwareParams, Scheme
from .linkbudget import AtmosphereParams, BeamParams, ReceiverParams
from .noise import SKY_PRESETS
from .orbits import OrbitConfig

OUTPUT_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class CityPairPreset:
    name: str
    distance_km: float
    ocean: bool


CITY_PAIRS = (
    CityPairPreset("New York - San Francisco", 4000.0, False),
    CityPairPreset("New York - Madrid", 5500.0, True),
    CityPairPreset("San Francisco - Tokyo", 8500.0, True),
    CityPairPreset("Tokyo - Beijing", 2000.0, False),
    CityPairPreset("Taipei - New Delhi", 4500.0, False),
    CityPairPreset("Hong Kong - Dubai", 6000.0, False),
    CityPairPreset("Beijing - Berlin", 7500.0, False),
    CityPairPreset("Montreal - Paris", 5500.0, True),
)


def list_presets() -> tuple:
    return CITY_PAIRS


def _preset_key(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def find_preset(name: str) -> CityPairPreset:
    key = _preset_key(name)
    for preset in CITY_PAIRS:
        if _preset_key(preset.name) == key:
            return preset
    raise ConfigError(
        f"unknown city preset {name!r}; known: {', '.join(p.name for p in CITY_PAIRS)}"
    )


@dataclass(frozen=True)
class RunConfig:
    schemes: tuple = (Scheme.OO, Scheme.GG, Scheme.OG)
    distances_km: tuple = ()
    nesting_levels: tuple = (0, 1, 2, 3)
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    hardware: HardwareParams = field(default_factory=HardwareParams)
    noise_preset: str = "full-moon"
    sky_brightness: float = SKY_PRESETS["full-moon"]
    time_step: float = 1.0
    bottleneck: str = "min-then-average"
    output_path: str | None = None
    output_format: str = "csv"
    passes_per_day: float = 1.0

    def scenario_kwargs(self) -> dict:
        return dict(orbit=self.orbit, sky_brightness=self.sky_brightness,
                    time_step=self.time_step, bottleneck=self.bottleneck,
                    passes_per_day=self.passes_per_day)


def distance_grid(start: float, stop: float, step: float) -> tuple:
    """Inclusive arithmetic grid ``start, start+step, ..., <= stop``."""
    if not step > 0:
        raise ConfigError(f"[scenario] distance_step_km: must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"[scenario] distance_max_km: {stop} is below distance_min_km {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


_SECTIONS = {
    "scenario": {"schemes", "distance_min_km", "distance_max_km", "distance_step_km",
                 "distances_km", "nesting_levels", "altitude_km", "direction",
                 "time_step_s", "bottleneck", "preset"},
    "hardware": {"p_qnd", "p_write", "p_read", "eta_d", "p_dark", "source_rate_hz",
                 "direct_rate_hz", "f0", "alpha_db_per_km", "beta", "beam_waist_m", "m2",
                 "wavelength_nm", "receiver_radius_m", "repeater_receiver_radius_m",
                 "fov_sr", "filter_bandwidth_nm"},
    "noise": {"preset", "sky_brightness"},
    "output": {"path", "format", "passes_per_day"},
}


class _Reader:
    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser

    def raw(self, section, key):
        if not self.parser.has_option(section, key):
            return None
        value = self.parser.get(section, key).strip()
        return value or None

    def float(self, section, key, default=None):
        value = self.raw(section, key)
        if value is None:
            return default
        try:
            out = float(value)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected a number, got {value!r}") from None
        if not math.isfinite(out):
            raise ConfigError(f"[{section}] {key}: must be finite, got {value!r}")
        return out

    def list(self, section, key, convert, default):
        value = self.raw(section, key)
        if value is None:
            return default
        items = [v.strip() for v in value.split(",") if v.strip()]
        if not items:
            raise ConfigError(f"[{section}] {key}: empty list")
        try:
            return tuple(convert(v) for v in items)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None


def _int_level(text: str) -> int:
    n = int(text)
    if n < 0:
        raise ValueError(f"nesting level must be >= 0, got {n}")
    return n


def _nm(value, default):
    # x / 1e9 is correctly rounded, so "580" gives the same double as 580e-9
    return default if value is None else value / 1e9


def _build(section: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from None

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"[{section}]: unknown section")
        unknown = set(parser.options(section)) - _SECTIONS[section]
        if unknown:
            raise ConfigError(f"[{section}] {sorted(unknown)[0]}: unknown key")

    r = _Reader(parser)
    d = HardwareParams()

    schemes = r.list("scenario", "schemes", lambda s: Scheme(s.upper()), RunConfig.schemes)
    levels = r.list("scenario", "nesting_levels", _int_level, RunConfig.nesting_levels)

    preset = r.raw("scenario", "preset")
    explicit = r.list("scenario", "distances_km", float, None)
    if preset is not None:
        distances = (find_preset(preset).distance_km,)
    elif explicit is not None:
        distances = explicit
    else:
        distances = distance_grid(r.float("scenario", "distance_min_km", 1000.0),
                                  r.float("scenario", "distance_max_km", 20000.0),
                                  r.float("scenario", "distance_step_km", 500.0))
    for L in distances:
        if not L > 0:
            raise ConfigError(f"[scenario] distances: must be positive, got {L}")

    orbit = _build("scenario", OrbitConfig,
                   altitude=r.float("scenario", "altitude_km", 500.0) * 1e3,
                   direction=r.raw("scenario", "direction") or "prograde")
    time_step = r.float("scenario", "time_step_s", 1.0)
    if not time_step > 0:
        raise ConfigError(f"[scenario] time_step_s: must be positive, got {time_step}")
    bottleneck = r.raw("scenario", "bottleneck") or "min-then-average"
    if bottleneck not in BOTTLENECK_MODES:
        raise ConfigError(
            f"[scenario] bottleneck: must be one of {sorted(BOTTLENECK_MODES)}, got {bottleneck!r}"
        )

    beam = _build("hardware", BeamParams,
                  w0=r.float("hardware", "beam_waist_m", d.beam.w0),
                  m2=r.float("hardware", "m2", d.beam.m2),
                  wavelength=_nm(r.float("hardware", "wavelength_nm"), d.beam.wavelength))
    receiver = _build("hardware", ReceiverParams,
                      radius=r.float("hardware", "receiver_radius_m", d.receiver.radius),
                      fov=r.float("hardware", "fov_sr", d.receiver.fov),
                      filter_bandwidth=_nm(r.float("hardware", "filter_bandwidth_nm"),
                                           d.receiver.filter_bandwidth))
    rep_radius = r.float("hardware", "repeater_receiver_radius_m")
    repeater_receiver = None
    if rep_radius is not None:
        repeater_receiver = _build("hardware", ReceiverParams, radius=rep_radius,
                                   fov=receiver.fov, filter_bandwidth=receiver.filter_bandwidth)
    atmosphere = _build("hardware", AtmosphereParams,
                        beta=r.float("hardware", "beta", d.atmosphere.beta),
                        alpha_fibre=r.float("hardware", "alpha_db_per_km", d.atmosphere.alpha_fibre))
    hardware = _build("hardware", HardwareParams,
                      p_qnd=r.float("hardware", "p_qnd", d.p_qnd),
                      p_write=r.float("hardware", "p_write", d.p_write),
                      p_read=r.float("hardware", "p_read", d.p_read),
                      eta_d=r.float("hardware", "eta_d", d.eta_d),
                      p_dark=r.float("hardware", "p_dark", d.p_dark),
                      source_rate=r.float("hardware", "source_rate_hz", d.source_rate),
                      direct_rate=r.float("hardware", "direct_rate_hz", d.direct_rate),
                      f0=r.float("hardware", "f0", d.f0),
                      beam=beam, receiver=receiver, repeater_receiver=repeater_receiver,
                      atmosphere=atmosphere)

    noise_preset = r.raw("noise", "preset") or "full-moon"
    if noise_preset not in SKY_PRESETS:
        raise ConfigError(
            f"[noise] preset: must be one of {sorted(SKY_PRESETS)}, got {noise_preset!r}"
        )
    sky = r.float("noise", "sky_brightness")
    sky = SKY_PRESETS[noise_preset] if sky is None else sky / 1e-9
    if sky < 0:
        raise ConfigError(f"[noise] sky_brightness: must be >= 0, got {sky * 1e-9}")

    fmt = (r.raw("output", "format") or "csv").lower()
    if fmt not in OUTPUT_FORMATS:
        raise ConfigError(f"[output] format: must be one of {list(OUTPUT_FORMATS)}, got {fmt!r}")
    passes = r.float("output", "passes_per_day", 1.0)
    if not passes > 0:
        raise ConfigError(f"[output] passes_per_day: must be positive, got {passes}")

    return RunConfig(schemes=schemes, distances_km=tuple(distances), nesting_levels=levels,
                     orbit=orbit, hardware=hardware, noise_preset=noise_preset,
                     sky_brightness=sky, time_step=time_step, bottleneck=bottleneck,
                     output_path=r.raw("output", "path"), output_format=fmt,
                     passes_per_day=passes)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from None
    return parse_config(text, source=str(path))


def default_config() -> RunConfig:
    return parse_config("")
