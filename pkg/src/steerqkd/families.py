"""Parametrized two-qubit state families and their closed-form predicates.

Three families appear throughout the package:

* Bell-diagonal mixtures of the four Bell projectors, weights
  (w1, w2, w3, w4) on (psi-, phi+, phi-, psi+) in that order;
* Werner states omega |psi-><psi-| + (1-omega) I/4;
* the gamma family q |phi><phi| + (1-q) |00><00| with
  |phi> = cos(alpha)|10> + sin(alpha)|01>, alpha in [0, pi/4].

Each generator has a closed-form correlation tensor and closed-form
steerability/usefulness predicates; both are cross-checked against the
generic Bloch pipeline in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import steering
from .errors import BadParam, BadWeights
from .qstate import DensityMatrix

SQRT3 = math.sqrt(3.0)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Bell kets in the computational basis (|00>, |01>, |10>, |11>).
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) * _INV_SQRT2
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) * _INV_SQRT2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) * _INV_SQRT2
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) * _INV_SQRT2

#: Bell kets in the weight order used by BellDiagonalParams.
BELL_KETS = (PSI_MINUS, PHI_PLUS, PHI_MINUS, PSI_PLUS)

_BELL_PROJECTORS = tuple(np.outer(k, k.conj()) for k in BELL_KETS)


class FamilyPredicates(NamedTuple):
    steerable: bool
    useful: bool


def _check_range(name: str, value: float, lo: float, hi: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < lo or value > hi:
        raise BadParam(f"{name} must lie in [{lo:g}, {hi:g}], got {value!r}")
    return value


@dataclass(frozen=True)
class BellDiagonalParams:
    """Mixing weights on (psi-, phi+, phi-, psi+); a probability simplex point."""

    w1: float
    w2: float
    w3: float
    w4: float

    def __post_init__(self) -> None:
        ws = (self.w1, self.w2, self.w3, self.w4)
        ws = tuple(float(x) for x in ws)
        if any(not math.isfinite(x) for x in ws):
            raise BadWeights("weights must be finite")
        if any(x < -1e-10 or x > 1.0 + 1e-10 for x in ws):
            raise BadWeights(f"weights outside [0, 1]: {ws}")
        if abs(sum(ws) - 1.0) > 1e-10:
            raise BadWeights(f"weights sum to {sum(ws)!r}, expected 1")
        for name, val in zip(("w1", "w2", "w3", "w4"), ws):
            object.__setattr__(self, name, val)

    @property
    def weights(self) -> tuple[float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4)

    @classmethod
    def from_werner(cls, omega: float) -> "BellDiagonalParams":
        """Werner state embedding: w1 = (1+3 omega)/4, the rest (1-omega)/4."""
        omega = _check_range("omega", omega, 0.0, 1.0)
        rest = (1.0 - omega) / 4.0
        return cls((1.0 + 3.0 * omega) / 4.0, rest, rest, rest)


@dataclass(frozen=True)
class WernerParams:
    omega: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega", _check_range("omega", self.omega, 0.0, 1.0))


@dataclass(frozen=True)
class GammaParams:
    """Parameters (q, alpha) with q in [0, 1] and alpha in [0, pi/4] radians.

    alpha values outside the stated domain are rejected, not wrapped.
    """

    q: float
    alpha: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", _check_range("q", self.q, 0.0, 1.0))
        object.__setattr__(
            self, "alpha", _check_range("alpha", self.alpha, 0.0, math.pi / 4.0))


def make_bell_diagonal(p: BellDiagonalParams) -> DensityMatrix:
    """Convex mixture of the four Bell projectors with weights ``p``.

    The resulting state has vanishing local Bloch vectors and a diagonal
    correlation tensor whose entries (XX, YY, ZZ) are

        (1 - 2(w1+w3), 1 - 2(w1+w2), 1 - 2(w1+w4)).

    As an unordered magnitude multiset this coincides with
    {|1-2(w1+w3)|, |1-2(w2+w3)|, |1-2(w1+w2)|}, the triple used by the
    closed-form predicates; see :func:`belldiag_reference_triple`.
    """
    mat = sum(w * proj for w, proj in zip(p.weights, _BELL_PROJECTORS))
    return DensityMatrix(mat)


def make_werner(p: WernerParams) -> DensityMatrix:
    """omega |psi-><psi-| + (1-omega) I/4; correlation tensor -omega I."""
    mat = p.omega * _BELL_PROJECTORS[0] + (1.0 - p.omega) * np.eye(4) / 4.0
    return DensityMatrix(mat)


def make_gamma(p: GammaParams) -> DensityMatrix:
    """q |phi><phi| + (1-q) |00><00| with |phi> = cos(a)|10> + sin(a)|01>.

    Correlation tensor: diag(q sin 2a, q sin 2a, 1-2q).
    """
    phi = np.array([0.0, math.sin(p.alpha), math.cos(p.alpha), 0.0], dtype=complex)
    ground = np.zeros((4, 4), dtype=complex)
    ground[0, 0] = 1.0
    mat = p.q * np.outer(phi, phi.conj()) + (1.0 - p.q) * ground
    return DensityMatrix(mat)


def werner_correlation_diag(p: WernerParams) -> np.ndarray:
    """Closed-form correlation diagonal (-omega, -omega, -omega)."""
    return np.full(3, -p.omega)


def gamma_correlation_diag(p: GammaParams) -> np.ndarray:
    """Closed-form correlation diagonal (q sin 2a, q sin 2a, 1-2q)."""
    s = p.q * math.sin(2.0 * p.alpha)
    return np.array([s, s, 1.0 - 2.0 * p.q])


def belldiag_reference_triple(p: BellDiagonalParams) -> np.ndarray:
    """Diagonal correlation triple in the family's reference labeling.

    Returns (1-2(w1+w3), 1-2(w2+w3), 1-2(w1+w2)).  The generated state's
    tensor equals this triple up to an axis swap and a sign flip on one
    axis (both are local-frame conventions); the singular values agree
    exactly, which is what every predicate in this package consumes.
    """
    w1, w2, w3, _ = p.weights
    return np.array([
        1.0 - 2.0 * (w1 + w3),
        1.0 - 2.0 * (w2 + w3),
        1.0 - 2.0 * (w1 + w2),
    ])


def gamma_predicates(p: GammaParams) -> FamilyPredicates:
    """Closed-form steerability and usefulness tests for the gamma family.

    steerable iff 2 q^2 sin^2(2a) + (1-2q)^2 > 1;
    useful    iff 2 q sin(2a) + |1-2q| > sqrt(3).
    """
    s2a = math.sin(2.0 * p.alpha)
    steer = 2.0 * p.q ** 2 * s2a ** 2 + (1.0 - 2.0 * p.q) ** 2 > 1.0
    useful = 2.0 * p.q * s2a + abs(1.0 - 2.0 * p.q) > SQRT3
    return FamilyPredicates(steer, useful)


def belldiag_predicates(p: BellDiagonalParams) -> FamilyPredicates:
    """Closed-form steerability and usefulness tests for Bell-diagonal states.

    Steerability delegates to the weight-space form of the steering bound;
    usefulness sums |1-2(w_i+w_j)| over the three index pairs drawn from
    the first three weights and compares against sqrt(3).
    """
    w1, w2, w3, _ = p.weights
    steer = steering.belldiag_f3_steerable(p.weights)
    total = (abs(1.0 - 2.0 * (w1 + w2))
             + abs(1.0 - 2.0 * (w1 + w3))
             + abs(1.0 - 2.0 * (w2 + w3)))
    return FamilyPredicates(steer, total > SQRT3)
