"""Bell-diagonal two-qubit states and entanglement swapping.

A Bell-diagonal state is stored as its four Bell-basis weights in the order
``(phi+, phi-, psi+, psi-)``. The target state is ``phi+``; its weight is the
fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

NORM_ATOL = 1e-12
CLAMP_ATOL = 1e-15


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class BellDiagonalState:
    """Bell-basis weights of a two-qubit pair.

    Construction validates the weights: each must be in [0, 1] and their sum
    must be 1 within ``NORM_ATOL``. Use :meth:`from_weights` for vectors
    produced by arithmetic, which clamps rounding-level negatives.
    """

    p_phi_plus: float
    p_phi_minus: float
    p_psi_plus: float
    p_psi_minus: float

    def __post_init__(self):
        w = self.weights
        if not np.all(np.isfinite(w)):
            raise ValueError(f"non-finite Bell weights {tuple(w)}")
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError(f"Bell weights must lie in [0, 1], got {tuple(w)}")
        if abs(w.sum() - 1.0) > NORM_ATOL:
            raise ValueError(f"Bell weights sum to {w.sum()!r}, expected 1")

    @classmethod
    def from_weights(cls, weights) -> "BellDiagonalState":
        """Build a state from a length-4 vector, repairing rounding noise.

        Negatives no larger than ``CLAMP_ATOL`` in magnitude are set to zero
        and the vector renormalised; larger negatives raise ``ValueError``.
        """
        w = np.array(weights, dtype=np.float64)
        if w.shape != (4,):
            raise ValueError(f"expected 4 Bell weights, got shape {w.shape}")
        if np.any(w < -CLAMP_ATOL):
            raise ValueError(f"negative Bell weight in {tuple(w)}")
        if np.any(w < 0.0):
            w = np.clip(w, 0.0, None)
            w = w / w.sum()
        if np.any(w > 1.0) and np.all(w <= 1.0 + CLAMP_ATOL):
            w = np.minimum(w, 1.0)
        return cls(float(w[0]), float(w[1]), float(w[2]), float(w[3]))

    @property
    def weights(self) -> np.ndarray:
        return np.array(
            [self.p_phi_plus, self.p_phi_minus, self.p_psi_plus, self.p_psi_minus],
            dtype=np.float64,
        )

    @property
    def fidelity(self) -> float:
        return self.p_phi_plus


PHI_PLUS = BellDiagonalState(1.0, 0.0, 0.0, 0.0)
MAXIMALLY_MIXED = BellDiagonalState(0.25, 0.25, 0.25, 0.25)


def depolarized(fidelity: float) -> BellDiagonalState:
    """Werner-type state: ``fidelity`` on phi+, the rest spread evenly."""
    f = _check_probability(fidelity, "fidelity")
    q = (1.0 - f) / 3.0
    return BellDiagonalState(f, q, q, q)


def mix_white_noise(state: BellDiagonalState, p: float) -> BellDiagonalState:
    """Mix with the identity: each weight ``w`` becomes ``p*w + (1-p)/4``."""
    p = _check_probability(p, "signal probability")
    w = p * state.weights + (1.0 - p) / 4.0
    return BellDiagonalState.from_weights(w)


def swap(a: BellDiagonalState, b: BellDiagonalState) -> BellDiagonalState:
    """State of the outer qubits after an ideal Bell measurement on the inner
    ones followed by the Pauli correction for the observed outcome."""
    return BellDiagonalState.from_weights(_kernels.klein_convolve(a.weights, b.weights))


def nest(elementary: BellDiagonalState, n: int) -> BellDiagonalState:
    """Swap ``n`` nesting levels of identical pairs: s_{k+1} = swap(s_k, s_k)."""
    if int(n) != n or n < 0:
        raise ValueError(f"nesting level must be a non-negative integer, got {n!r}")
    if n == 0:
        return elementary
    return BellDiagonalState.from_weights(_kernels.nest(elementary.weights, int(n)))


def error_rates(state: BellDiagonalState) -> tuple[float, float]:
    """Return ``(e_x, e_z)``, the BB84 error rates in the X and Z bases."""
    e_x = state.p_phi_minus + state.p_psi_minus
    e_z = state.p_psi_plus + state.p_psi_minus
    return e_x, e_z
