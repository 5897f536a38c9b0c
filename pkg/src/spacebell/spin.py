"""Two-qubit spin algebra: states, Pauli observables, correlators and CHSH values."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

UNIT_TOL = 1e-12
CORRELATOR_TOL = 1e-9
TSIRELSON = 2.0 * math.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class UnitVector3:
    """A measurement direction on the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        norm_sq = self.x * self.x + self.y * self.y + self.z * self.z
        if not abs(norm_sq - 1.0) <= UNIT_TOL:
            raise ValueError(f"not a unit vector: ({self.x}, {self.y}, {self.z}), |v|^2={norm_sq!r}")

    @classmethod
    def from_angles(cls, polar: float, azimuth: float = 0.0) -> "UnitVector3":
        s = math.sin(polar)
        return cls(s * math.cos(azimuth), s * math.sin(azimuth), math.cos(polar))

    @classmethod
    def in_plane(cls, angle: float) -> "UnitVector3":
        """Direction at `angle` from +z, rotating towards +x (the x-z plane)."""
        return cls.from_angles(angle, 0.0)

    @classmethod
    def normalized(cls, v) -> "UnitVector3":
        arr = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(arr))
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        x, y, z = arr / n
        return cls(float(x), float(y), float(z))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "UnitVector3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Pure two-qubit state in the basis (up-up, up-down, down-up, down-down)."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got shape {amps.shape}")
        norm_sq = float(np.vdot(amps, amps).real)
        if not abs(norm_sq - 1.0) <= UNIT_TOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, amps) -> "TwoQubitState":
        amps = np.asarray(amps, dtype=complex)
        return cls(amps / np.linalg.norm(amps))

    @classmethod
    def up_up(cls) -> "TwoQubitState":
        return cls(np.array([1, 0, 0, 0], dtype=complex))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "TwoQubitState":
        """Haar-random pure state."""
        return cls.from_unnormalized(rng.normal(size=4) + 1j * rng.normal(size=4))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TwoQubitState):
            return NotImplemented
        return bool(np.array_equal(self.amplitudes, other.amplitudes))

    def __hash__(self) -> int:
        return hash(self.amplitudes.tobytes())


@dataclass(frozen=True)
class Correlators:
    """The four CHSH expectation values E(a,b), E(a,b'), E(a',b), E(a',b')."""

    e_ab: float
    e_abp: float
    e_apb: float
    e_apbp: float

    def __post_init__(self) -> None:
        for name in ("e_ab", "e_abp", "e_apb", "e_apbp"):
            v = getattr(self, name)
            if not abs(v) <= 1.0 + CORRELATOR_TOL:
                raise ValueError(f"correlator {name}={v!r} outside [-1, 1]")

    @classmethod
    def from_array(cls, values) -> "Correlators":
        a, b, c, d = (float(v) for v in values)
        return cls(a, b, c, d)

    def as_array(self) -> np.ndarray:
        return np.array([self.e_ab, self.e_abp, self.e_apb, self.e_apbp])

    def __iter__(self) -> Iterator[float]:
        return iter((self.e_ab, self.e_abp, self.e_apb, self.e_apbp))


@dataclass(frozen=True)
class ChshSettings:
    a: UnitVector3
    a_prime: UnitVector3
    b: UnitVector3
    b_prime: UnitVector3

    @classmethod
    def in_plane(cls, a: float, a_prime: float, b: float, b_prime: float) -> "ChshSettings":
        return cls(*(UnitVector3.in_plane(t) for t in (a, a_prime, b, b_prime)))

    @classmethod
    def optimal_singlet(cls) -> "ChshSettings":
        """x-z plane angles 0, 90, 45, 135 degrees, reaching 2*sqrt(2) on the singlet."""
        return cls.in_plane(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)

    def pairs(self) -> tuple[tuple[UnitVector3, UnitVector3], ...]:
        """Setting pairs in correlator order (a,b), (a,b'), (a',b), (a',b')."""
        return ((self.a, self.b), (self.a, self.b_prime), (self.a_prime, self.b), (self.a_prime, self.b_prime))


def singlet_state() -> TwoQubitState:
    s = 1.0 / math.sqrt(2.0)
    return TwoQubitState(np.array([0.0, s, -s, 0.0], dtype=complex))


def spin_observable(a: UnitVector3) -> np.ndarray:
    """Return the 2x2 matrix a . sigma."""
    if not isinstance(a, UnitVector3):
        # raises for non-unit input
        a = UnitVector3(*(float(c) for c in a))
    return a.x * PAULI_X + a.y * PAULI_Y + a.z * PAULI_Z


def correlation_spin(state: TwoQubitState, a: UnitVector3, b: UnitVector3) -> float:
    amps = state.amplitudes
    op = np.kron(spin_observable(a), spin_observable(b))
    return float(np.vdot(amps, op @ amps).real)


def correlation_matrix(state: TwoQubitState) -> np.ndarray:
    """T[i, j] = <sigma_i (x) sigma_j>, so that E(a, b) = a^T T b."""
    amps = state.amplitudes
    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = np.vdot(amps, np.kron(si, sj) @ amps).real
    return t


def chsh_value(e: Correlators) -> float:
    return abs(e.e_ab - e.e_abp + e.e_apb + e.e_apbp)


def correlators_from_state(state: TwoQubitState, settings: ChshSettings) -> Correlators:
    values = [correlation_spin(state, x, y) for x, y in settings.pairs()]
    return Correlators.from_array(np.clip(values, -1.0, 1.0))


GRID_STEP_DEG = 5.0
REFINE_TOL = 1e-7


def _settings_from_params(params: np.ndarray) -> np.ndarray:
    """(..., 8) polar/azimuth pairs -> (..., 4, 3) unit vectors."""
    polar, azimuth = params[..., 0::2], params[..., 1::2]
    s = np.sin(polar)
    return np.stack([s * np.cos(azimuth), s * np.sin(azimuth), np.cos(polar)], axis=-1)


def _chsh_from_params(t: np.ndarray, params: np.ndarray) -> np.ndarray:
    v = _settings_from_params(params)
    a, ap, b, bp = v[..., 0, :], v[..., 1, :], v[..., 2, :], v[..., 3, :]
    ta, tap = a @ t, ap @ t
    return np.abs(np.sum(ta * (b - bp), axis=-1) + np.sum(tap * (b + bp), axis=-1))


_MOVES = np.concatenate([np.eye(8), -np.eye(8)])


def optimize_chsh(state: TwoQubitState) -> tuple[ChshSettings, float]:
    """Maximize the CHSH value over measurement directions for a fixed state.

    A 5 degree grid over the x-z plane angles of all four settings seeds a
    compass search over (polar, azimuth) of each setting; the search halves
    its step when no coordinate move improves and stops below 1e-7 rad.
    The returned value is evaluated at the returned settings, so it is a
    lower bound on the true maximum.
    """
    t = correlation_matrix(state)
    angles = np.deg2rad(np.arange(0.0, 360.0, GRID_STEP_DEG))
    dirs = np.stack([np.sin(angles), np.zeros_like(angles), np.cos(angles)], axis=1)
    m = dirs @ t @ dirs.T  # m[i, j] = E(dir_i, dir_j)

    # S[i, i', j, j'] = |X[j] + Y[j']| with X = m[i] + m[i'], Y = m[i'] - m[i]; the max over
    # (j, j') is max(max X + max Y, -(min X + min Y)). First-occurrence argmax/argmin keeps
    # the lowest lexicographic grid index on ties.
    x = m[:, None, :] + m[None, :, :]
    y = m[None, :, :] - m[:, None, :]
    jx_hi, jy_hi = np.argmax(x, axis=-1), np.argmax(y, axis=-1)
    jx_lo, jy_lo = np.argmin(x, axis=-1), np.argmin(y, axis=-1)
    hi = np.take_along_axis(x, jx_hi[..., None], -1)[..., 0] + np.take_along_axis(y, jy_hi[..., None], -1)[..., 0]
    lo = -(np.take_along_axis(x, jx_lo[..., None], -1)[..., 0] + np.take_along_axis(y, jy_lo[..., None], -1)[..., 0])
    use_hi = (hi > lo) | ((hi == lo) & ((jx_hi < jx_lo) | ((jx_hi == jx_lo) & (jy_hi <= jy_lo))))
    best_pair = np.where(use_hi, hi, lo)
    i, ip = np.unravel_index(int(np.argmax(best_pair)), best_pair.shape)
    if use_hi[i, ip]:
        best_idx = (i, ip, jx_hi[i, ip], jy_hi[i, ip])
    else:
        best_idx = (i, ip, jx_lo[i, ip], jy_lo[i, ip])

    params = np.zeros(8)
    params[0::2] = angles[list(best_idx)]
    value = float(_chsh_from_params(t, params))
    step = np.deg2rad(GRID_STEP_DEG)
    while step >= REFINE_TOL:
        trials = params + step * _MOVES
        values = _chsh_from_params(t, trials)
        k = int(np.argmax(values))
        if values[k] > value:
            params, value = trials[k], float(values[k])
        else:
            step *= 0.5

    vecs = _settings_from_params(params)
    settings = ChshSettings(*(UnitVector3.normalized(v) for v in vecs))
    return settings, chsh_value(correlators_from_state(state, settings))
