"""Shared random-object generators for the test suite.

All helpers take an explicit numpy Generator so each test controls its
own seed and stays reproducible in isolation.
"""

import numpy as np

from steerqkd import DensityMatrix, MeasurementTriad


def random_density_matrix(rng: np.random.Generator) -> DensityMatrix:
    """Random full-rank two-qubit state from the Ginibre ensemble."""
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(rng: np.random.Generator) -> DensityMatrix:
    ket = rng.normal(size=4) + 1j * rng.normal(size=4)
    return DensityMatrix.from_ket(ket)


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    """Haar-ish unitary via QR of a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # normalize the R diagonal phases so the distribution is phase-balanced
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform-ish element of SO(3)."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diagonal(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_triad(rng: np.random.Generator) -> MeasurementTriad:
    return MeasurementTriad(random_rotation(rng))
