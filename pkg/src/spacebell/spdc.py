"""Closed-form SPDC two-photon coincidence rate and its large-distance behaviour.

Units: lengths in micrometers, wave numbers in rad/um, angles in radians.
Rates are in arbitrary units fixed by `a_p` and `abs_a_sq`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class ConvergenceError(RuntimeError):
    """z * R(z) failed to settle within the allowed number of doublings."""


@dataclass(frozen=True)
class SPDCParams:
    k_p: float = 8.06  # 780 nm pump
    sigma_0: float = 1000.0
    ell_c: float = 100.0
    c1: float = 1.0
    c2: float = 1.0
    a_p: float = 1.0
    abs_a_sq: float = 1.0

    def __post_init__(self) -> None:
        for name in ("k_p", "sigma_0", "ell_c", "a_p", "abs_a_sq"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        for name in ("c1", "c2"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {v!r}")


@dataclass(frozen=True)
class SpdcEvaluation:
    z: float
    theta_s: float
    theta_i: float
    rate: float
    sigma_z: float
    delta: float


class AsymptoticLimit(NamedTuple):
    constant: float
    onset: float | None  # z at which z*R(z) settled; None when the constant vanishes identically
    doublings: int


def _check_z(z, *, allow_zero: bool = False) -> None:
    zz = np.asarray(z, dtype=float)
    bad = zz < 0 if allow_zero else zz <= 0
    if np.any(bad) or np.any(np.isnan(zz)):
        raise ValueError(f"propagation distance must be {'>= 0' if allow_zero else '> 0'}, got {z!r}")


def _sin2(theta: float) -> float:
    """sin(2 theta), exactly zero at integer multiples of pi/2."""
    r = math.remainder(2.0 * theta, math.pi)
    if abs(r) <= 4.0 * np.finfo(float).eps * max(1.0, abs(2.0 * theta)):
        return 0.0
    return math.sin(2.0 * theta)


def beam_size_at(p: SPDCParams, z):
    """sigma_z = z sqrt(ell_c^2 + 4 sigma_0^2) / (2 k_p sigma_0 ell_c)."""
    _check_z(z, allow_zero=True)
    return z * math.sqrt(p.ell_c**2 + 4.0 * p.sigma_0**2) / (2.0 * p.k_p * p.sigma_0 * p.ell_c)


def spectral_width(p: SPDCParams, z):
    """delta = 2 ell_c sigma_z / sqrt(4 sigma_z^2 + ell_c^2); tends to ell_c as z grows."""
    _check_z(z)
    sz = beam_size_at(p, z)
    return 2.0 * p.ell_c * sz / np.sqrt(4.0 * sz**2 + p.ell_c**2)


def _rate(p: SPDCParams, theta_s: float, theta_i: float, z):
    """Vectorized in z; the unit-modulus propagation phase is dropped."""
    sz = beam_size_at(p, z)
    delta = spectral_width(p, z)
    envelope = (p.a_p * math.pi * p.ell_c * p.sigma_0**2 / (z * math.sqrt(4.0 * p.sigma_0**2 + p.ell_c**2))) ** 2
    cs, ss = math.cos(theta_s), math.sin(theta_s)
    ci, si = math.cos(theta_i), math.sin(theta_i)
    cross = p.c1 * p.c2 * math.pi * z**2 / (2.0 * p.k_p**2 * sz * delta) * _sin2(theta_s) * _sin2(theta_i)
    direct = np.sqrt(2.0 * math.pi / (p.k_p**2 * delta**2)) * (
        p.c1**2 * cs**2 * si**2 + p.c2**2 * ss**2 * ci**2
    )
    return np.abs(p.abs_a_sq * envelope * (cross + direct)), sz, delta


def coincidence_rate(p: SPDCParams, theta_s: float, theta_i: float, z: float) -> SpdcEvaluation:
    """Coincidence count rate for polarizer angles (theta_s, theta_i) at distance z."""
    _check_z(z)
    rate, sz, delta = _rate(p, theta_s, theta_i, float(z))
    return SpdcEvaluation(float(z), theta_s, theta_i, float(rate), float(sz), float(delta))


def rate_curve(p: SPDCParams, theta_s: float, theta_i: float, z) -> np.ndarray:
    """coincidence_rate over an array of distances."""
    z = np.asarray(z, dtype=float)
    _check_z(z)
    return _rate(p, theta_s, theta_i, z)[0]


def asymptotic_limit(
    p: SPDCParams,
    theta_s: float,
    theta_i: float,
    z_start: float = 1e3,
    rtol: float = 1e-4,
    max_doublings: int = 60,
) -> AsymptoticLimit:
    """Limit of z * R(z) from doubling z until consecutive values agree to `rtol`."""
    if _sin2(theta_s) * _sin2(theta_i) == 0.0:
        # only the 1/z^2 term survives
        return AsymptoticLimit(0.0, None, 0)
    _check_z(z_start)
    z = float(z_start)
    prev = z * coincidence_rate(p, theta_s, theta_i, z).rate
    for k in range(1, max_doublings + 1):
        z *= 2.0
        cur = z * coincidence_rate(p, theta_s, theta_i, z).rate
        if abs(cur - prev) <= rtol * abs(cur):
            return AsymptoticLimit(cur, z, k)
        prev = cur
    raise ConvergenceError(
        f"z*R(z) did not converge to rtol={rtol} after {max_doublings} doublings from z={z_start} "
        f"(last value {cur!r}); parameters are pathological"
    )


def asymptotic_constant(p: SPDCParams, theta_s: float, theta_i: float, **kwargs) -> float:
    """K in R(z) = K / z + o(1 / z)."""
    return asymptotic_limit(p, theta_s, theta_i, **kwargs).constant


def chsh_rates(p: SPDCParams, theta_s: float, theta_s_prime: float, theta_i: float, theta_i_prime: float, z):
    """The four rates in CHSH order; shape (4,) or (4, len(z))."""
    pairs = ((theta_s, theta_i), (theta_s, theta_i_prime), (theta_s_prime, theta_i), (theta_s_prime, theta_i_prime))
    z = np.asarray(z, dtype=float)
    _check_z(z)
    return np.stack([_rate(p, ts, ti, z)[0] for ts, ti in pairs])


def bell_value_space(
    p: SPDCParams, theta_s: float, theta_s_prime: float, theta_i: float, theta_i_prime: float, z
):
    """|R(s,i) - R(s,i') + R(s',i) + R(s',i')| with all four rates at a common z.

    Dimensionful, in the units of the rate.
    """
    r = chsh_rates(p, theta_s, theta_s_prime, theta_i, theta_i_prime, z)
    s = np.abs(r[0] - r[1] + r[2] + r[3])
    return float(s) if s.ndim == 0 else s
