"""Optical channel transmittance.

Free-space arms use an imperfect Gaussian beam clipped by a circular
receiver; down-links additionally pay a secant-law atmospheric extinction;
ground links are attenuated fibre. Lengths are in metres except fibre
lengths, which follow the dB/km convention and are given in km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class BeamParams:
    """Transmitter beam.

    Attributes
    ----------
    w0 : float
        Beam waist at the transmitter, m.
    m2 : float
        Beam quality factor, >= 1.
    wavelength : float
        Wavelength, m.
    """

    w0: float = 0.25
    m2: float = 3.0
    wavelength: float = 580e-9

    def __post_init__(self):
        if not self.w0 > 0:
            raise ValueError(f"beam waist must be positive, got {self.w0}")
        if not self.m2 >= 1:
            raise ValueError(f"M^2 must be >= 1, got {self.m2}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")


@dataclass(frozen=True)
class ReceiverParams:
    """Receiving telescope: aperture radius (m), field of view (sr) and
    spectral filter width (m of wavelength)."""

    radius: float = 0.5
    fov: float = (20e-6) ** 2
    filter_bandwidth: float = 0.5e-9

    def __post_init__(self):
        for name in ("radius", "fov", "filter_bandwidth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"receiver {name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class AtmosphereParams:
    beta: float = 1.1
    alpha_fibre: float = 0.17  # dB/km

    def __post_init__(self):
        if not self.beta >= 0:
            raise ValueError(f"extinction parameter must be >= 0, got {self.beta}")
        if not self.alpha_fibre >= 0:
            raise ValueError(f"fibre loss must be >= 0, got {self.alpha_fibre}")


class LinkType(str, Enum):
    INTER_SATELLITE = "inter-satellite"
    DOWN_LINK = "down-link"
    FIBRE = "fibre"


@dataclass(frozen=True)
class LinkGeometry:
    """One arm: its type, path length (m; km for fibre) and, for down-links,
    the zenith angle at the ground station (rad). ``blocked`` marks an
    inter-satellite arm without line of sight."""

    kind: LinkType
    length: float
    zenith: float = 0.0
    blocked: bool = False


def rayleigh_range(beam: BeamParams) -> float:
    return math.pi * beam.w0 ** 2 / beam.wavelength


def beam_waist(beam: BeamParams, z: float) -> float:
    """Beam radius after propagating ``z`` metres in vacuum."""
    if z < 0:
        raise ValueError(f"propagation distance must be >= 0, got {z}")
    q = z * beam.m2 / rayleigh_range(beam)
    return beam.w0 * math.sqrt(1.0 + q * q)


def diffraction_transmittance(beam: BeamParams, aperture_radius: float, z: float) -> float:
    """Fraction of a centred Gaussian beam collected by a circular aperture.

    Encircled power of a Gaussian of radius W inside radius R is
    ``1 - exp(-2 R^2 / W^2)``.
    """
    if not aperture_radius > 0:
        raise ValueError(f"aperture radius must be positive, got {aperture_radius}")
    w = beam_waist(beam, z)
    return -math.expm1(-2.0 * aperture_radius ** 2 / w ** 2)


def atmospheric_extinction(atmosphere: AtmosphereParams, zenith_angle: float) -> float:
    """``exp(-beta sec(zenith))`` for a zenith angle in radians."""
    if not 0 <= zenith_angle < math.pi / 2:
        raise ValueError(
            f"zenith angle must be in [0, 90) deg, got {math.degrees(zenith_angle)} deg"
        )
    return math.exp(-atmosphere.beta / math.cos(zenith_angle))


def fibre_transmittance(atmosphere: AtmosphereParams, length_km: float) -> float:
    if length_km < 0:
        raise ValueError(f"fibre length must be >= 0, got {length_km}")
    return 10.0 ** (-atmosphere.alpha_fibre * length_km / 10.0)


def link_transmittance(beam: BeamParams, receiver: ReceiverParams,
                       atmosphere: AtmosphereParams, geometry: LinkGeometry) -> float:
    if geometry.kind is LinkType.FIBRE:
        return fibre_transmittance(atmosphere, geometry.length)
    if geometry.blocked:
        return 0.0
    eta = diffraction_transmittance(beam, receiver.radius, geometry.length)
    if geometry.kind is LinkType.DOWN_LINK:
        eta *= atmospheric_extinction(atmosphere, geometry.zenith)
    return eta
