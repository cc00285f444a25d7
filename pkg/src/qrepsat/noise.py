"""Background light at ground receivers and detector imperfections.

Sky brightness is carried in SI per unit wavelength, W m^-2 sr^-1 m^-1, and
the spectral filter width in metres of wavelength, so their product is a
plain radiance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .linkbudget import ReceiverParams

PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s

# 1.5 uW m^-2 sr^-1 nm^-1, full-Moon night
FULL_MOON_SKY = 1.5e-6 / 1e-9
# 1 W m^-2 sr^-1 um^-1, clear day
DAYTIME_SKY = 1.0 / 1e-6
SKY_PRESETS = {
    "full-moon": FULL_MOON_SKY,
    "daytime": DAYTIME_SKY,
    "dark": 0.0,
}


@dataclass(frozen=True)
class NoiseEnvironment:
    sky_brightness: float = FULL_MOON_SKY
    photon_frequency: float = SPEED_OF_LIGHT / 580e-9
    dark_prob: float = 1e-5
    detector_efficiency: float = 0.9

    def __post_init__(self):
        if not self.sky_brightness >= 0:
            raise ValueError(f"sky brightness must be >= 0, got {self.sky_brightness}")
        if not self.photon_frequency > 0:
            raise ValueError(f"photon frequency must be positive, got {self.photon_frequency}")
        if not 0.0 <= self.dark_prob <= 1.0:
            raise ValueError(f"dark count probability must be in [0, 1], got {self.dark_prob}")
        if not 0.0 <= self.detector_efficiency <= 1.0:
            raise ValueError(
                f"detector efficiency must be in [0, 1], got {self.detector_efficiency}"
            )

    @classmethod
    def preset(cls, name: str, **kwargs) -> "NoiseEnvironment":
        try:
            sky = SKY_PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown noise preset {name!r}; choose from {sorted(SKY_PRESETS)}"
            ) from None
        return cls(sky_brightness=sky, **kwargs)


def background_photons(env: NoiseEnvironment, receiver: ReceiverParams,
                       time_window: float) -> float:
    """Expected sky photons collected in one detection window."""
    power = (env.sky_brightness * receiver.fov * math.pi * receiver.radius ** 2
             * receiver.filter_bandwidth)
    return power / (PLANCK * env.photon_frequency) * time_window


def signal_probability(n_signal: float, n_noise: float) -> float:
    """Probability that a click came from the source rather than the sky."""
    if n_signal < 0 or n_noise < 0:
        raise ValueError(f"photon counts must be >= 0, got {n_signal}, {n_noise}")
    if n_signal == 0 and n_noise == 0:
        raise ValueError("signal and noise counts are both zero")
    return n_signal / (n_signal + n_noise)


def effective_fidelity(f0: float, ps1: float, ps2: float) -> float:
    for name, v in (("F0", f0), ("Ps1", ps1), ("Ps2", ps2)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    p = ps1 * ps2
    return p * f0 + (1.0 - p) / 4.0


def es_success_probability(env: NoiseEnvironment) -> float:
    """Success probability of a linear-optics Bell measurement with dark
    counts; at most 1/2."""
    p = env.dark_prob
    eta = env.detector_efficiency
    return 0.5 * ((1.0 - p) * (eta + 2.0 * p * (1.0 - eta))) ** 2
