"""Secret key rate of a repeater chain.

A scenario fixes the architecture (OO: sources and repeaters in orbit; GG:
everything in fibre on the ground; OG: sources in orbit, repeaters on the
ground), the total A-B distance, the nesting level and the hardware. The
pipeline is

    bottleneck transmittance P0 -> repeater rate
    noisy elementary pair -> nested swapping -> error rates -> secret fraction

and the key rate is their product with the final detection probability.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .bellstate import BellDiagonalState, depolarized, error_rates, mix_white_noise, nest
from .linkbudget import AtmosphereParams, BeamParams, ReceiverParams, fibre_transmittance
from .noise import (
    FULL_MOON_SKY,
    SPEED_OF_LIGHT,
    NoiseEnvironment,
    background_photons,
    es_success_probability,
    signal_probability,
)
from .orbits import (
    SECONDS_PER_DAY,
    OrbitConfig,
    flyby_window,
    link_arrays,
    sample_times,
)

# Waiting-time factor for adjacent segments, small-P0 approximation.
WAIT_FACTOR = 2.0 / 3.0

BOTTLENECK_MODES = {
    "min-then-average": _kernels.MIN_THEN_AVERAGE,
    "average-then-min": _kernels.AVERAGE_THEN_MIN,
}


class Scheme(str, Enum):
    OO = "OO"
    GG = "GG"
    OG = "OG"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class HardwareParams:
    """Detector, memory and source figures plus the optics.

    ``repeater_receiver`` overrides the receiver on repeater satellites (the
    inter-satellite arms of scheme OO); by default it equals ``receiver``.
    """

    p_qnd: float = 0.5
    p_write: float = 0.9
    p_read: float = 0.9
    eta_d: float = 0.9
    p_dark: float = 1e-5
    source_rate: float = 20e6  # Hz
    direct_rate: float = 1e9  # Hz, used when n = 0
    f0: float = 0.98
    beam: BeamParams = field(default_factory=BeamParams)
    receiver: ReceiverParams = field(default_factory=ReceiverParams)
    repeater_receiver: ReceiverParams | None = None
    atmosphere: AtmosphereParams = field(default_factory=AtmosphereParams)

    def __post_init__(self):
        for name in ("p_qnd", "p_write", "p_read", "eta_d"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if not 0.0 <= self.p_dark <= 1.0:
            raise ValueError(f"p_dark must lie in [0, 1], got {self.p_dark}")
        for name in ("source_rate", "direct_rate"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.25 < self.f0 <= 1.0:
            raise ValueError(f"F0 must lie in (1/4, 1], got {self.f0}")

    @property
    def isl_receiver(self) -> ReceiverParams:
        return self.repeater_receiver or self.receiver


@dataclass(frozen=True)
class Scenario:
    scheme: Scheme
    total_distance_km: float
    nesting_level: int
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    hardware: HardwareParams = field(default_factory=HardwareParams)
    sky_brightness: float = FULL_MOON_SKY
    time_step: float = 1.0
    bottleneck: str = "min-then-average"
    passes_per_day: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not self.total_distance_km > 0:
            raise ValueError(f"total distance must be positive, got {self.total_distance_km}")
        if int(self.nesting_level) != self.nesting_level or self.nesting_level < 0:
            raise ValueError(
                f"nesting level must be a non-negative integer, got {self.nesting_level!r}"
            )
        object.__setattr__(self, "nesting_level", int(self.nesting_level))
        if not self.time_step > 0:
            raise ValueError(f"time step must be positive, got {self.time_step}")
        if self.bottleneck not in BOTTLENECK_MODES:
            raise ValueError(
                f"bottleneck must be one of {sorted(BOTTLENECK_MODES)}, got {self.bottleneck!r}"
            )
        if not self.passes_per_day > 0:
            raise ValueError(f"passes per day must be positive, got {self.passes_per_day}")

    @property
    def elementary_length_km(self) -> float:
        return self.total_distance_km / 2 ** self.nesting_level

    @property
    def repetition_rate(self) -> float:
        hw = self.hardware
        return hw.direct_rate if self.nesting_level == 0 else hw.source_rate

    @property
    def noise(self) -> NoiseEnvironment:
        hw = self.hardware
        return NoiseEnvironment(
            sky_brightness=self.sky_brightness,
            photon_frequency=SPEED_OF_LIGHT / hw.beam.wavelength,
            dark_prob=hw.p_dark,
            detector_efficiency=hw.eta_d,
        )

    def geometry_scenario(self) -> "Scenario":
        # With one elementary link OO is a plain double down-link, i.e. OG.
        if self.scheme is Scheme.OO and self.nesting_level == 0:
            return dataclasses.replace(self, scheme=Scheme.OG)
        return self


@dataclass(frozen=True)
class KeyRateResult:
    p0: float
    repeater_rate: float
    e_x: float
    e_z: float
    secret_fraction: float
    key_rate: float
    flyby_duration: float
    daily_key: float
    fidelity: float
    reason: str = ""


@dataclass(frozen=True)
class LinkBudget:
    """Fly-by averaged transmittances of a scenario."""

    p0: float
    flyby_duration: float
    arm_means: np.ndarray  # (K, 2)
    ground_receiver: np.ndarray  # (K, 2) bool


# -- security ----------------------------------------------------------------

def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def secret_fraction(e_x: float, e_z: float) -> float:
    """Asymptotic BB84 secret fraction, clamped at zero."""
    return max(0.0, 1.0 - binary_entropy(e_z) - binary_entropy(e_x))


# -- transmittance -----------------------------------------------------------

def link_budget(scenario: Scenario) -> LinkBudget:
    """Fly-by window, per-arm mean transmittances and bottleneck P0."""
    hw = scenario.hardware
    if scenario.scheme is Scheme.GG:
        p0 = fibre_transmittance(hw.atmosphere, scenario.elementary_length_km)
        half = fibre_transmittance(hw.atmosphere, 0.5 * scenario.elementary_length_km)
        k = 2 ** scenario.nesting_level
        return LinkBudget(p0, SECONDS_PER_DAY, np.full((k, 2), half), np.ones((k, 2), bool))

    geo = scenario.geometry_scenario()
    window = flyby_window(geo)
    arrays = link_arrays(geo, sample_times(window, scenario.time_step))
    apertures = np.where(arrays.ground_receiver, hw.receiver.radius, hw.isl_receiver.radius)
    beam = hw.beam
    eta = _kernels.arm_transmittance(arrays.lengths, arrays.zeniths, arrays.kinds,
                                     apertures.astype(np.float64), beam.w0, beam.m2,
                                     beam.wavelength, hw.atmosphere.beta,
                                     hw.atmosphere.alpha_fibre)
    p0 = float(_kernels.bottleneck(eta, BOTTLENECK_MODES[scenario.bottleneck]))
    means = eta.mean(axis=0) if eta.shape[0] else np.zeros(arrays.kinds.shape)
    return LinkBudget(p0, window.duration, means, arrays.ground_receiver)


def average_p0(scenario: Scenario) -> float:
    """Bottleneck elementary-link transmittance averaged over one fly-by.

    GG: fibre over the full elementary link. OO/OG: the double-link
    transmittance of each elementary link, minimum over links per time
    sample, averaged over the window (or the reverse order when the scenario
    asks for ``average-then-min``). Zero for an empty window.
    """
    return link_budget(scenario).p0


def repeater_rate(p0: float, hw: HardwareParams, n: int) -> float:
    """Entanglement distribution rate of the chain, Hz."""
    rate = hw.direct_rate if n == 0 else hw.source_rate
    p_es = es_success_probability(NoiseEnvironment(dark_prob=hw.p_dark,
                                                   detector_efficiency=hw.eta_d))
    return (rate * p0 * hw.p_qnd ** 2 * hw.p_write ** 2
            * (WAIT_FACTOR * p_es * hw.p_read ** 2) ** n)


# -- state -------------------------------------------------------------------

def signal_product(scenario: Scenario, arm_means: np.ndarray,
                   ground_receiver: np.ndarray) -> float:
    """Joint signal probability Ps1*Ps2 applied to every elementary pair.

    GG has no background light. OG takes the worst elementary link. OO
    applies the worst down-link's Ps at both ends of every pair.
    """
    if scenario.scheme is Scheme.GG:
        return 1.0
    hw = scenario.hardware
    n_noise = background_photons(scenario.noise, hw.receiver, 1.0 / scenario.repetition_rate)

    def ps(eta):
        if eta == 0.0 and n_noise == 0.0:
            return 1.0
        return signal_probability(float(eta), n_noise)

    geo = scenario.geometry_scenario()
    if geo.scheme is Scheme.OG:
        return min(ps(left) * ps(right) for left, right in arm_means)
    worst = min(ps(eta) for eta, g in zip(arm_means.ravel(), ground_receiver.ravel()) if g)
    return worst * worst


def final_state(scenario: Scenario, arm_means: np.ndarray | None = None,
                ground_receiver: np.ndarray | None = None) -> BellDiagonalState:
    """State shared by A and B after all swapping rounds.

    ``arm_means`` are fly-by averaged arm transmittances; they are computed
    from the scenario when omitted.
    """
    if arm_means is None:
        budget = link_budget(scenario)
        arm_means, ground_receiver = budget.arm_means, budget.ground_receiver
    p = signal_product(scenario, arm_means, ground_receiver)
    elementary = mix_white_noise(depolarized(scenario.hardware.f0), p)
    return nest(elementary, scenario.nesting_level)


# -- key ---------------------------------------------------------------------

def daily_key(scenario: Scenario, result: KeyRateResult) -> float:
    """Key bits per day: all day for GG, fly-by time per pass for OO/OG."""
    if scenario.scheme is Scheme.GG:
        return result.key_rate * SECONDS_PER_DAY
    return result.key_rate * result.flyby_duration * scenario.passes_per_day


def secret_key_rate(scenario: Scenario) -> KeyRateResult:
    hw = scenario.hardware
    budget = link_budget(scenario)
    if budget.flyby_duration == 0.0:
        return KeyRateResult(0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.25,
                             reason="no fly-by window")
    r_rep = repeater_rate(budget.p0, hw, scenario.nesting_level)
    state = final_state(scenario, budget.arm_means, budget.ground_receiver)
    e_x, e_z = error_rates(state)
    r_inf = secret_fraction(e_x, e_z)
    p_click = hw.eta_d ** 2
    key = r_rep * p_click * r_inf  # sifting ratio 1
    partial = KeyRateResult(budget.p0, r_rep, e_x, e_z, r_inf, key,
                            budget.flyby_duration, 0.0, state.fidelity)
    return dataclasses.replace(partial, daily_key=daily_key(scenario, partial))


@dataclass(frozen=True)
class SweepRow:
    scheme: Scheme
    total_distance_km: float
    nesting_level: int
    result: KeyRateResult


def failed_result(reason: str) -> KeyRateResult:
    return KeyRateResult(0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.25, reason=reason)


def compare_schemes(distances_km, nesting_levels, hardware: HardwareParams | None = None,
                    schemes=(Scheme.OO, Scheme.GG, Scheme.OG), **scenario_kwargs) -> list:
    """Key rate for every (scheme, L, n), ordered by scheme, then L, then n.

    A cell whose scenario is invalid is recorded as a zero result carrying
    the error message in ``reason``.
    """
    hardware = hardware or HardwareParams()
    rows = []
    for scheme in schemes:
        for L in distances_km:
            for n in nesting_levels:
                try:
                    sc = Scenario(Scheme(scheme), L, n, hardware=hardware, **scenario_kwargs)
                    result = secret_key_rate(sc)
                except ValueError as exc:
                    result = failed_result(str(exc))
                rows.append(SweepRow(Scheme(scheme), float(L), int(n), result))
    return rows
