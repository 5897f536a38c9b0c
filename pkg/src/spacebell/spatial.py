"""Detector regions, the Gaussian pair wavefunction and the spatial overlap factor g.

Lengths are in micrometers. Regions are axis-aligned boxes; any face may sit
at infinity, which makes half-spaces and slabs ordinary regions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import erf, erfc

from .spin import ChshSettings, Correlators, TwoQubitState, UnitVector3, chsh_value, correlation_spin

QUAD_RTOL = 1e-9
_SQRT2 = math.sqrt(2.0)


def _vec3(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"{name} must have 3 components, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DetectorRegion:
    """Axis-aligned box [lower, upper] per axis; bounds may be infinite."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lo, hi = _vec3(self.lower, "lower"), _vec3(self.upper, "upper")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("region bounds must not be NaN")
        if np.any(hi < lo):
            raise ValueError(f"region has upper < lower: {lo} .. {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, center: Sequence[float], half_widths: Sequence[float] | float) -> "DetectorRegion":
        """Box around `center`; a half-width of inf leaves that axis unbounded."""
        c = np.asarray(center, dtype=float)
        h = np.broadcast_to(np.asarray(half_widths, dtype=float), (3,))
        if np.any(h < 0) or np.any(np.isnan(h)):
            raise ValueError(f"half-widths must be nonnegative, got {h}")
        with np.errstate(invalid="ignore"):
            lo = np.where(np.isinf(h), -np.inf, c - h)
            hi = np.where(np.isinf(h), np.inf, c + h)
        return cls(lo, hi)

    @classmethod
    def unbounded(cls) -> "DetectorRegion":
        return cls(np.full(3, -np.inf), np.full(3, np.inf))

    @classmethod
    def half_space(cls, axis: int, boundary: float, upper: bool = True) -> "DetectorRegion":
        """{r : r[axis] >= boundary} if `upper`, else {r : r[axis] <= boundary}."""
        lo, hi = np.full(3, -np.inf), np.full(3, np.inf)
        if upper:
            lo[axis] = boundary
        else:
            hi[axis] = boundary
        return cls(lo, hi)

    @property
    def center(self) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            c = 0.5 * (self.lower + self.upper)
        return np.where(np.isfinite(c), c, 0.0)

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @property
    def is_degenerate(self) -> bool:
        return bool(np.any(self.upper == self.lower))

    def shifted(self, offset: Sequence[float]) -> "DetectorRegion":
        off = np.asarray(offset, dtype=float)
        return DetectorRegion(self.lower + off, self.upper + off)

    def contains(self, other: "DetectorRegion") -> bool:
        return bool(np.all(self.lower <= other.lower) and np.all(other.upper <= self.upper))


@dataclass(frozen=True, eq=False)
class GaussianPairState:
    """Factorized spatial wavefunction: |phi|^2 is a product of two isotropic normals.

    `width_a`, `width_b` are the standard deviations of the position density.
    """

    center_a: np.ndarray
    center_b: np.ndarray
    width_a: float
    width_b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center_a", _vec3(self.center_a, "center_a"))
        object.__setattr__(self, "center_b", _vec3(self.center_b, "center_b"))
        for name in ("width_a", "width_b"):
            w = getattr(self, name)
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"{name} must be positive and finite, got {w!r}")

    def total_probability(self) -> float:
        """Closed-form integral of |phi|^2 over all space."""
        return float(np.prod(_axis_mass(np.full(3, -np.inf), np.full(3, np.inf), self.center_a, self.width_a))) * float(
            np.prod(_axis_mass(np.full(3, -np.inf), np.full(3, np.inf), self.center_b, self.width_b))
        )

    def shifted(self, offset: Sequence[float]) -> "GaussianPairState":
        off = np.asarray(offset, dtype=float)
        return GaussianPairState(self.center_a + off, self.center_b + off, self.width_a, self.width_b)


class OverlapMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class OverlapResult:
    g: float
    method: OverlapMethod
    degenerate: bool = field(default=False)


def _axis_mass(lo, hi, c, w) -> np.ndarray:
    """Normal(c, w) mass of [lo, hi] per axis.

    Intervals lying entirely on one side of the mean use erfc so far tails keep
    their relative precision instead of cancelling to zero.
    """
    lo, hi, c = np.asarray(lo, float), np.asarray(hi, float), np.asarray(c, float)
    with np.errstate(invalid="ignore"):
        u_lo = (lo - c) / (_SQRT2 * w)
        u_hi = (hi - c) / (_SQRT2 * w)
    right = u_lo >= 0
    left = u_hi <= 0
    mass = np.where(
        right,
        0.5 * (erfc(u_lo) - erfc(u_hi)),
        np.where(left, 0.5 * (erfc(-u_hi) - erfc(-u_lo)), 0.5 * (erf(u_hi) - erf(u_lo))),
    )
    return np.clip(mass, 0.0, 1.0)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL_NODES_HI, _GL_WEIGHTS_HI = np.polynomial.legendre.leggauss(21)
_TAIL_WIDTHS = 40.0
_MAX_DEPTH = 50


def _gauss_legendre(f, a: float, b: float, nodes, weights) -> float:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.dot(weights, f(mid + half * nodes)))


def adaptive_gauss_legendre(f, a: float, b: float, rtol: float = QUAD_RTOL, atol: float = 1e-300) -> float:
    """Integrate a vectorized `f` over a finite [a, b] by bisection on a 10/21-point error estimate."""
    if b <= a:
        return 0.0
    total = 0.0
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        coarse = _gauss_legendre(f, lo, hi, _GL_NODES, _GL_WEIGHTS)
        fine = _gauss_legendre(f, lo, hi, _GL_NODES_HI, _GL_WEIGHTS_HI)
        if abs(fine - coarse) <= max(rtol * abs(fine), atol) or depth >= _MAX_DEPTH:
            total += fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((mid, hi, depth + 1))
            stack.append((lo, mid, depth + 1))
    return total


def _axis_mass_quadrature(lo: float, hi: float, c: float, w: float) -> float:
    # Beyond 40 widths the density underflows relative to any retained mass.
    a = max(lo, c - _TAIL_WIDTHS * w)
    b = min(hi, c + _TAIL_WIDTHS * w)
    if b <= a:
        return 0.0
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * w)

    def density(x):
        return norm * np.exp(-0.5 * ((x - c) / w) ** 2)

    # Break at the mean and at +-1, 2, 4, 8, 16 widths so the peak is never stepped over.
    marks = [c + s * k * w for k in (0.0, 1.0, 2.0, 4.0, 8.0, 16.0) for s in (-1.0, 1.0)]
    cuts = sorted({a, b, *(m for m in marks if a < m < b)})
    return sum(adaptive_gauss_legendre(density, x0, x1) for x0, x1 in zip(cuts[:-1], cuts[1:]))


def overlap_probability(
    phi: GaussianPairState, oa: DetectorRegion, ob: DetectorRegion, method: str | OverlapMethod = "closed_form"
) -> OverlapResult:
    """Probability that particle A lies in `oa` and particle B in `ob`.

    Zero-volume regions give g = 0 with `degenerate=True`.
    """
    method = OverlapMethod(method)
    if oa.is_degenerate or ob.is_degenerate:
        return OverlapResult(0.0, method, degenerate=True)
    if method is OverlapMethod.CLOSED_FORM:
        g = float(np.prod(_axis_mass(oa.lower, oa.upper, phi.center_a, phi.width_a)))
        g *= float(np.prod(_axis_mass(ob.lower, ob.upper, phi.center_b, phi.width_b)))
    else:
        g = 1.0
        for region, c, w in ((oa, phi.center_a, phi.width_a), (ob, phi.center_b, phi.width_b)):
            for k in range(3):
                g *= _axis_mass_quadrature(region.lower[k], region.upper[k], c[k], w)
    return OverlapResult(float(min(max(g, 0.0), 1.0)), method)


def correlation_spin_space(
    state: TwoQubitState,
    phi: GaussianPairState,
    a: UnitVector3,
    oa: DetectorRegion,
    b: UnitVector3,
    ob: DetectorRegion,
) -> float:
    """Spin correlator with both detectors restricted to their regions: g(oa, ob) * E(a, b)."""
    return overlap_probability(phi, oa, ob).g * correlation_spin(state, a, b)


def spin_space_correlators(
    state: TwoQubitState,
    phi: GaussianPairState,
    settings: ChshSettings,
    regions: Sequence[DetectorRegion],
) -> Correlators:
    """Region-projected correlators; `regions` is (O_A, O_A', O_B, O_B')."""
    oa, oap, ob, obp = regions
    s = settings
    values = [
        correlation_spin_space(state, phi, s.a, oa, s.b, ob),
        correlation_spin_space(state, phi, s.a, oa, s.b_prime, obp),
        correlation_spin_space(state, phi, s.a_prime, oap, s.b, ob),
        correlation_spin_space(state, phi, s.a_prime, oap, s.b_prime, obp),
    ]
    return Correlators.from_array(np.clip(values, -1.0, 1.0))


def chsh_spin_space(
    state: TwoQubitState,
    phi: GaussianPairState,
    settings: ChshSettings,
    regions: Sequence[DetectorRegion],
) -> float:
    return chsh_value(spin_space_correlators(state, phi, settings, regions))
