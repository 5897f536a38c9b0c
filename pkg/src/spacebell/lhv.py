"""Local-hidden-variable models for the four CHSH correlators.

A model is a probability vector over the 16 deterministic strategies that
assign a fixed outcome of +1 or -1 to each of the settings a, a', b, b'.
Only products of outcomes are constrained (no marginals), so the reachable
correlators form the 8-vertex CHSH polytope.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .simplex import linprog_eq
from .spin import CORRELATOR_TOL, Correlators

WEIGHT_TOL = 1e-12
SUM_TOL = 1e-10
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DeterministicStrategy:
    xi_a: int
    xi_ap: int
    eta_b: int
    eta_bp: int

    def correlators(self) -> np.ndarray:
        return np.array(
            [self.xi_a * self.eta_b, self.xi_a * self.eta_bp, self.xi_ap * self.eta_b, self.xi_ap * self.eta_bp],
            dtype=float,
        )


def enumerate_strategies() -> list[DeterministicStrategy]:
    return [DeterministicStrategy(*signs) for signs in itertools.product((-1, 1), repeat=4)]


STRATEGIES = tuple(enumerate_strategies())
# column k holds the correlators produced by strategy k
STRATEGY_MATRIX = np.stack([s.correlators() for s in STRATEGIES], axis=1)


@dataclass(frozen=True, eq=False)
class LHVModel:
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape != (16,):
            raise ValueError(f"expected 16 weights, got {w.shape}")
        if np.any(w < -WEIGHT_TOL):
            raise ValueError(f"negative weight {w.min()!r}")
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "LHVModel":
        return cls(np.full(16, 1.0 / 16))

    @classmethod
    def point_mass(cls, strategy: DeterministicStrategy) -> "LHVModel":
        w = np.zeros(16)
        w[STRATEGIES.index(strategy)] = 1.0
        return cls(w)

    def correlators(self) -> np.ndarray:
        return STRATEGY_MATRIX @ self.weights


@dataclass
class LHVDecomposition:
    feasible: bool
    model: LHVModel | None
    # Infeasible only: (c0, c) with c0 + c @ v <= 0 on every strategy vertex v but > 0 at the
    # target, i.e. a Bell inequality c @ E <= -c0 that the target violates.
    certificate: np.ndarray | None = None
    residual: float | None = None


def _as_correlator_array(e) -> np.ndarray:
    arr = e.as_array() if isinstance(e, Correlators) else np.asarray(e, dtype=float).reshape(-1)
    if arr.shape != (4,):
        raise ValueError(f"expected 4 correlators, got shape {arr.shape}")
    if np.any(~(np.abs(arr) <= 1.0 + CORRELATOR_TOL)):
        raise ValueError(f"correlators outside [-1, 1]: {arr}")
    return arr


def lhv_decompose(e) -> LHVDecomposition:
    """Find weights w >= 0, sum(w) = 1 reproducing the correlators, or prove none exist."""
    target = _as_correlator_array(e)
    a_eq = np.vstack([np.ones(16), STRATEGY_MATRIX])
    b_eq = np.concatenate([[1.0], target])
    res = linprog_eq(np.zeros(16), a_eq, b_eq)
    if not res.success:
        return LHVDecomposition(False, None, certificate=res.farkas)
    w = np.where((res.x < 0) & (res.x > -WEIGHT_TOL), 0.0, res.x)
    model = LHVModel(w)
    return LHVDecomposition(True, model, residual=verify_model(model, target))


def all_chsh_variants(e) -> float:
    """Largest |+-E_ab +- E_ab' +- E_a'b +- E_a'b'| over sign patterns with an odd number of minuses."""
    arr = e.as_array() if isinstance(e, Correlators) else np.asarray(e, dtype=float)
    return float(np.max(np.abs(CHSH_SIGNS @ arr)))


CHSH_SIGNS = np.array([s for s in itertools.product((1, -1), repeat=4) if s.count(-1) % 2 == 1], dtype=float)


def verify_model(m: LHVModel, e) -> float:
    """Max absolute difference between the model's correlators and `e`."""
    target = e.as_array() if isinstance(e, Correlators) else np.asarray(e, dtype=float)
    return float(np.max(np.abs(m.correlators() - target)))
