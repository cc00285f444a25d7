"""Secret key rates of quantum repeater chains with satellite and fibre links."""

from .bellstate import BellDiagonalState, depolarized, error_rates, mix_white_noise, nest, swap
from .chain import (
    HardwareParams,
    KeyRateResult,
    Scenario,
    Scheme,
    compare_schemes,
    secret_key_rate,
)
from .orbits import OrbitConfig

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalState",
    "HardwareParams",
    "KeyRateResult",
    "OrbitConfig",
    "Scenario",
    "Scheme",
    "compare_schemes",
    "depolarized",
    "error_rates",
    "mix_white_noise",
    "nest",
    "secret_key_rate",
    "swap",
]
