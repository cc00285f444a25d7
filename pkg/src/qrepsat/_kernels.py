"""Hot numeric kernels.

Each kernel exists twice: an explicit-loop version compiled with numba
``@njit`` and a vectorised pure-numpy version. The exported names point at
the numba versions unless numba is missing or the environment variable
``QREPSAT_DISABLE_JIT`` is set to a non-empty value other than ``0``.

Both paths must agree to rounding; ``tests/test_kernels.py`` checks this and
``benchmarks/bench_kernels.py`` times them against each other.
"""

import os

import numpy as np

ARM_ISL = 0
ARM_DOWN = 1
ARM_FIBRE = 2
ARM_BLOCKED = 3

MIN_THEN_AVERAGE = 0
AVERAGE_THEN_MIN = 1


def _jit_requested():
    flag = os.environ.get("QREPSAT_DISABLE_JIT", "")
    return flag in ("", "0")


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


# --------------------------------------------------------------------------
# Bell-diagonal convolution
#
# Weight vectors are in (phi+, phi-, psi+, psi-) order. phi+ is the identity
# of the Klein four-group and every relabelling of the other three elements is
# a group automorphism, so the output index is simply i ^ j.
#
# Output k is summed as (a0*bk + ak*b0) + (ai*bj + aj*bi) with {i, j} the
# remaining labels. Each bracket is symmetric under a <-> b, so swap(a, b) and
# swap(b, a) are bit-identical, and inputs with equal off-fidelity weights
# give bit-identical off-fidelity outputs.
# --------------------------------------------------------------------------

def _klein_convolve_py(a, b):
    out = np.empty(4)
    out[0] = (a[0] * b[0] + a[1] * b[1]) + (a[2] * b[2] + a[3] * b[3])
    out[1] = (a[0] * b[1] + a[1] * b[0]) + (a[2] * b[3] + a[3] * b[2])
    out[2] = (a[0] * b[2] + a[2] * b[0]) + (a[1] * b[3] + a[3] * b[1])
    out[3] = (a[0] * b[3] + a[3] * b[0]) + (a[1] * b[2] + a[2] * b[1])
    return out


def _nest_py(w, n):
    s = w.copy()
    for _ in range(n):
        s = _klein_convolve_py(s, s)
    return s


_klein_convolve_nb = njit(cache=True)(_klein_convolve_py)


@njit(cache=True)
def _nest_nb(w, n):
    s = w.copy()
    for _ in range(n):
        s = _klein_convolve_nb(s, s)
    return s


# The convolution is four lines either way; the numpy path keeps the same
# arithmetic so both paths are bit-identical.
_klein_convolve_np = _klein_convolve_py
_nest_np = _nest_py


# --------------------------------------------------------------------------
# Ground-station geometry over a time grid
#
# Equatorial plane, spherical Earth. For a satellite at orbital radius
# r = re + h and central angle delta from the station:
#   horizontal = r |sin delta|
#   vertical   = h - 2 r sin^2(delta / 2)        (= r cos delta - re)
#   elevation  = atan2(vertical, horizontal)
#   range      = sqrt(h^2 + 4 re r sin^2(delta / 2))
# These forms are exact at delta = 0 (range == h, elevation == pi/2).
# --------------------------------------------------------------------------

@njit(cache=True)
def _station_geometry_nb(times, sat0, gs0, sat_rate, gs_rate, re, h):
    nt = times.shape[0]
    npair = sat0.shape[0]
    r = re + h
    rng = np.empty((nt, npair))
    elev = np.empty((nt, npair))
    for i in range(nt):
        t = times[i]
        for p in range(npair):
            delta = (sat0[p] + sat_rate * t) - (gs0[p] + gs_rate * t)
            s_half = np.sin(0.5 * delta)
            s2 = s_half * s_half
            elev[i, p] = np.arctan2(h - 2.0 * r * s2, r * abs(np.sin(delta)))
            rng[i, p] = np.sqrt(h * h + 4.0 * re * r * s2)
    return rng, elev


def _station_geometry_np(times, sat0, gs0, sat_rate, gs_rate, re, h):
    r = re + h
    t = np.asarray(times, dtype=np.float64)[:, None]
    delta = (sat0[None, :] + sat_rate * t) - (gs0[None, :] + gs_rate * t)
    s2 = np.sin(0.5 * delta) ** 2
    elev = np.arctan2(h - 2.0 * r * s2, r * np.abs(np.sin(delta)))
    rng = np.sqrt(h * h + 4.0 * re * r * s2)
    return rng, elev


# --------------------------------------------------------------------------
# Arm transmittance and bottleneck averaging
#
# lengths, zeniths: (T, K, 2) per time sample, elementary link, arm.
# kinds, apertures: (K, 2), fixed over the fly-by.
# --------------------------------------------------------------------------

@njit(cache=True)
def _arm_transmittance_nb(lengths, zeniths, kinds, apertures,
                          w0, m2, lam, beta, alpha_db_per_km):
    nt, nk, na = lengths.shape
    out = np.empty((nt, nk, na))
    z_r = np.pi * w0 * w0 / lam
    for i in range(nt):
        for k in range(nk):
            for a in range(na):
                kind = kinds[k, a]
                z = lengths[i, k, a]
                if kind == ARM_BLOCKED:
                    out[i, k, a] = 0.0
                elif kind == ARM_FIBRE:
                    out[i, k, a] = 10.0 ** (-alpha_db_per_km * (z / 1000.0) / 10.0)
                else:
                    q = z * m2 / z_r
                    w2 = w0 * w0 * (1.0 + q * q)
                    rad = apertures[k, a]
                    eta = -np.expm1(-2.0 * rad * rad / w2)
                    if kind == ARM_DOWN:
                        eta *= np.exp(-beta / np.cos(zeniths[i, k, a]))
                    out[i, k, a] = eta
    return out


def _arm_transmittance_np(lengths, zeniths, kinds, apertures,
                          w0, m2, lam, beta, alpha_db_per_km):
    z_r = np.pi * w0 * w0 / lam
    q = lengths * m2 / z_r
    w2 = w0 * w0 * (1.0 + q * q)
    rad = apertures[None, :, :]
    free = -np.expm1(-2.0 * rad * rad / w2)
    with np.errstate(divide="ignore", over="ignore"):
        ext = np.exp(-beta / np.cos(zeniths))
    fibre = 10.0 ** (-alpha_db_per_km * (lengths / 1000.0) / 10.0)
    kinds_b = np.broadcast_to(kinds[None, :, :], lengths.shape)
    out = np.where(kinds_b == ARM_DOWN, free * ext, free)
    out = np.where(kinds_b == ARM_FIBRE, fibre, out)
    out = np.where(kinds_b == ARM_BLOCKED, 0.0, out)
    return out


@njit(cache=True)
def _bottleneck_nb(eta, mode):
    nt, nk, _ = eta.shape
    if nt == 0:
        return 0.0
    if mode == MIN_THEN_AVERAGE:
        total = 0.0
        for i in range(nt):
            worst = np.inf
            for k in range(nk):
                d = eta[i, k, 0] * eta[i, k, 1]
                if d < worst:
                    worst = d
            total += worst
        return total / nt
    worst = np.inf
    for k in range(nk):
        total = 0.0
        for i in range(nt):
            total += eta[i, k, 0] * eta[i, k, 1]
        mean = total / nt
        if mean < worst:
            worst = mean
    return worst


def _bottleneck_np(eta, mode):
    if eta.shape[0] == 0:
        return 0.0
    double = eta[:, :, 0] * eta[:, :, 1]
    if mode == MIN_THEN_AVERAGE:
        return float(double.min(axis=1).mean())
    return float(double.mean(axis=0).min())


NUMBA_KERNELS = {
    "klein_convolve": _klein_convolve_nb,
    "nest": _nest_nb,
    "station_geometry": _station_geometry_nb,
    "arm_transmittance": _arm_transmittance_nb,
    "bottleneck": _bottleneck_nb,
}

NUMPY_KERNELS = {
    "klein_convolve": _klein_convolve_np,
    "nest": _nest_np,
    "station_geometry": _station_geometry_np,
    "arm_transmittance": _arm_transmittance_np,
    "bottleneck": _bottleneck_np,
}

USE_NUMBA = HAVE_NUMBA and _jit_requested()
_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS

klein_convolve = _ACTIVE["klein_convolve"]
nest = _ACTIVE["nest"]
station_geometry = _ACTIVE["station_geometry"]
arm_transmittance = _ACTIVE["arm_transmittance"]
bottleneck = _ACTIVE["bottleneck"]
