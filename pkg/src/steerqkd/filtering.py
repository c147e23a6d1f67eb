"""Local filtering of two-qubit states and post-filter usefulness.

Each party applies the non-unitary local operation M = eps|0><0| + |1><1|
(success branch); with probability p_succ both filters click and the
shared state is replaced by the renormalised success branch

    rho' = (M_A x M_B) rho (M_A x M_B)^dagger / p_succ.

Filtering can pull initially useless (even unsteerable) states below the
critical error rate at the price of discarding the failed rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParam, FilterAnnihilates
from .qber import critical_qber, qber_min
from .qstate import DensityMatrix, bloch_decompose, tensor_spectrum

#: Success probabilities below this cannot be renormalised meaningfully.
ANNIHILATION_THRESHOLD = 1e-12


@dataclass(frozen=True)
class FilterPair:
    """Filter strengths (eps1 for Alice, eps2 for Bob), both in [0, 1]."""

    eps1: float
    eps2: float

    def __post_init__(self) -> None:
        for name in ("eps1", "eps2"):
            val = float(getattr(self, name))
            if not math.isfinite(val) or val < 0.0 or val > 1.0:
                raise BadParam(f"{name} must lie in [0, 1], got {val!r}")
            object.__setattr__(self, name, val)

    def success_operator(self) -> np.ndarray:
        """The two-party success branch M_A x M_B = diag(e1 e2, e1, e2, 1)."""
        return np.diag([self.eps1 * self.eps2, self.eps1, self.eps2, 1.0]).astype(complex)


@dataclass(frozen=True)
class FilterOutcome:
    """Result of a successful filter application.

    ``q_min_filtered`` is the minimal three-setting error rate of the
    filtered state and is the canonical post-filter QBER.
    ``literal_keyn_product`` is the product p_succ * q_min(pre-filter
    state), exposed for transparency; it is not used by any decision in
    this package (it disagrees with the worked post-filter error rate).
    """

    filtered_state: DensityMatrix
    p_succ: float
    q_min_filtered: float
    literal_keyn_product: float


def filter_branch_probabilities(rho: DensityMatrix, f: FilterPair) -> np.ndarray:
    """Probabilities of the four success/failure branch combinations.

    Index [i, j]: i is Alice's branch, j Bob's, 0 = filter clicked
    (M1 = diag(eps, 1)), 1 = it did not (M2 = diag(sqrt(1 - eps^2), 0)).
    The four probabilities sum to 1: the two branches per party form a
    complete measurement, M1^dag M1 + M2^dag M2 = I.
    """
    branches_a = (np.diag([f.eps1, 1.0]), np.diag([math.sqrt(1.0 - f.eps1 ** 2), 0.0]))
    branches_b = (np.diag([f.eps2, 1.0]), np.diag([math.sqrt(1.0 - f.eps2 ** 2), 0.0]))
    probs = np.empty((2, 2))
    for i, ma in enumerate(branches_a):
        for j, mb in enumerate(branches_b):
            m = np.kron(ma, mb).astype(complex)
            probs[i, j] = np.trace(m @ rho.matrix @ m.conj().T).real
    return probs


def apply_local_filters(rho: DensityMatrix, f: FilterPair) -> FilterOutcome:
    """Apply the success branch of both parties' filters and renormalise.

    Raises
    ------
    FilterAnnihilates
        If the success probability falls below 1e-12, i.e. the filters
        remove the state's entire support.
    """
    m = f.success_operator()
    unnormalised = m @ rho.matrix @ m.conj().T
    p_succ = float(np.trace(unnormalised).real)
    if p_succ < ANNIHILATION_THRESHOLD:
        raise FilterAnnihilates(
            f"filter ({f.eps1}, {f.eps2}) succeeds with probability {p_succ:.3e}")
    filtered = DensityMatrix(unnormalised / p_succ)
    q_before = qber_min(tensor_spectrum(bloch_decompose(rho)))
    q_after = qber_min(tensor_spectrum(bloch_decompose(filtered)))
    return FilterOutcome(
        filtered_state=filtered,
        p_succ=p_succ,
        q_min_filtered=q_after,
        literal_keyn_product=p_succ * q_before,
    )


def modified_protocol_useful(rho: DensityMatrix, f: FilterPair) -> bool:
    """True iff the filtered state's minimal error rate beats the critical rate."""
    return apply_local_filters(rho, f).q_min_filtered < critical_qber()


def filter_search(rho: DensityMatrix, grid_step: float) -> list[FilterPair]:
    """Scan a (eps1, eps2) grid for filters that make ``rho`` useful.

    The grid covers (0, 1]^2 at spacing ``grid_step`` (which must lie in
    (0, 0.5]), in row-major ascending order with eps1 outermost.  Grid
    points whose filters annihilate the state are skipped.  An empty list
    is a valid result.
    """
    grid_step = float(grid_step)
    if not math.isfinite(grid_step) or grid_step <= 0.0 or grid_step > 0.5:
        raise BadParam(f"grid_step must lie in (0, 0.5], got {grid_step!r}")
    count = int(math.floor(1.0 / grid_step + 1e-9))
    values = [grid_step * (i + 1) for i in range(count)]
    found = []
    for e1 in values:
        for e2 in values:
            pair = FilterPair(min(e1, 1.0), min(e2, 1.0))
            try:
                if modified_protocol_useful(rho, pair):
                    found.append(pair)
            except FilterAnnihilates:
                continue
    return found
