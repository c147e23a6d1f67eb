"""Two-qubit states, Bloch decompositions and correlation spectra.

Conventions used throughout the package:

* Pauli operators are ordered (X, Y, Z), indexed 1..3 in formulas and
  0..2 in code.
* A two-qubit density matrix decomposes as

      rho = 1/4 ( I + a.sigma x I + I x b.sigma + sum_jk w_jk sigma_j x sigma_k )

  where ``a`` and ``b`` are the local Bloch vectors and ``w`` is the real
  3x3 correlation tensor with entries ``w_jk = Tr[rho sigma_j x sigma_k]``.
* Measurement outcomes are bits: outcome 0 projects onto (I + n.sigma)/2
  for measurement direction ``n``, outcome 1 onto (I - n.sigma)/2.

All matrices are handled as ``numpy`` arrays.  Equality of matrices is
always tolerance-based; use :func:`matrices_close` rather than ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDirection, InvalidState, NotAState

# Absolute tolerance for matrix equality comparisons.
DEFAULT_TOL = 1e-10

# Tolerance for Hermiticity / trace validation of density matrices.
STATE_TOL = 1e-10

# Eigenvalues of a density matrix may dip this far below zero before the
# matrix is rejected as non-positive.
PSD_FLOOR = -1e-9

# Measurement directions must be unit length / orthogonal within this.
DIRECTION_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: Pauli operators stacked in (X, Y, Z) order, shape (3, 2, 2).
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def matrices_close(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Entrywise equality of two complex matrices within absolute ``tol``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b)) <= tol) if a.size else True


def _frozen_array(values, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise InvalidState(f"expected array of shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidState("array contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """A validated 4x4 two-qubit density matrix.

    Construction symmetrises the input and enforces, within tolerance:
    Hermiticity (max deviation 1e-10), unit trace (1e-10) and positive
    semidefiniteness (eigenvalues >= -1e-9).  Violations raise
    :class:`~steerqkd.errors.InvalidState`.  The stored array is marked
    read-only, so instances are safe to share between threads.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.matrix, dtype=complex)
        if mat.shape != (4, 4):
            raise InvalidState(f"expected a 4x4 matrix, got shape {mat.shape}")
        if not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
            raise InvalidState("matrix contains non-finite entries")
        herm_dev = float(np.max(np.abs(mat - mat.conj().T)))
        if herm_dev > STATE_TOL:
            raise InvalidState(f"matrix is not Hermitian (deviation {herm_dev:.3e})")
        mat = (mat + mat.conj().T) / 2
        trace_dev = abs(mat.trace() - 1.0)
        if trace_dev > STATE_TOL:
            raise InvalidState(f"trace differs from 1 by {trace_dev:.3e}")
        lo = float(np.linalg.eigvalsh(mat).min())
        if lo < PSD_FLOOR:
            raise InvalidState(f"matrix has negative eigenvalue {lo:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_ket(cls, ket: np.ndarray) -> "DensityMatrix":
        """Pure state |k><k| from a (not necessarily normalised) 4-vector."""
        k = np.asarray(ket, dtype=complex).reshape(4)
        norm = np.linalg.norm(k)
        if norm < 1e-12:
            raise InvalidState("zero ket cannot define a state")
        k = k / norm
        return cls(np.outer(k, k.conj()))

    def isclose(self, other: "DensityMatrix", tol: float = DEFAULT_TOL) -> bool:
        return matrices_close(self.matrix, other.matrix, tol)


@dataclass(frozen=True)
class BlochForm:
    """Bloch decomposition of a two-qubit state: vectors ``a``, ``b`` and
    the 3x3 correlation tensor ``w``.

    Entries are correlators, so every component must lie in [-1, 1] and the
    local vectors inside the unit ball (all within 1e-9).  A hand-built
    ``BlochForm`` may still fail to describe a physical state; that is only
    detected by :func:`reconstruct_state`.
    """

    a_vec: np.ndarray
    b_vec: np.ndarray
    w: np.ndarray

    def __post_init__(self) -> None:
        a = _frozen_array(self.a_vec, (3,))
        b = _frozen_array(self.b_vec, (3,))
        w = _frozen_array(self.w, (3, 3))
        slack = 1.0 + 1e-9
        if np.linalg.norm(a) > slack or np.linalg.norm(b) > slack:
            raise InvalidState("local Bloch vector lies outside the unit ball")
        if np.max(np.abs(w)) > slack:
            raise InvalidState("correlation tensor entry outside [-1, 1]")
        object.__setattr__(self, "a_vec", a)
        object.__setattr__(self, "b_vec", b)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class TensorSpectrum:
    """Singular spectrum of a correlation tensor.

    ``sigma`` holds the singular values sorted in descending order.
    ``signed`` is the same triple except that the smallest value carries
    the sign of ``det w``, so that ``prod(signed) = det w`` and rotations
    of either lab frame leave the spectrum unchanged.
    """

    sigma: tuple[float, float, float]
    signed: tuple[float, float, float]

    def __post_init__(self) -> None:
        s = tuple(float(x) for x in self.sigma)
        t = tuple(float(x) for x in self.signed)
        if len(s) != 3 or len(t) != 3:
            raise InvalidState("spectrum must contain exactly three values")
        if not (s[0] >= s[1] >= s[2] >= 0):
            raise InvalidState("singular values must be descending and non-negative")
        if s[0] > 1.0 + 1e-9:
            raise InvalidState("singular value exceeds 1")
        if any(abs(abs(t[i]) - s[i]) > 1e-12 for i in range(3)):
            raise InvalidState("signed triple inconsistent with singular values")
        if t[0] < 0 or t[1] < 0:
            raise InvalidState("only the smallest signed value may be negative")
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "signed", t)

    @classmethod
    def from_matrix(cls, w: np.ndarray) -> "TensorSpectrum":
        """Spectrum of an arbitrary real 3x3 correlation tensor."""
        w = np.asarray(w, dtype=float)
        if w.shape != (3, 3):
            raise InvalidState(f"expected 3x3 tensor, got shape {w.shape}")
        sigma = np.linalg.svd(w, compute_uv=False)
        det_sign = -1.0 if np.linalg.det(w) < 0 else 1.0
        s = (float(sigma[0]), float(sigma[1]), float(sigma[2]))
        return cls(s, (s[0], s[1], det_sign * s[2]))

    @classmethod
    def from_diagonal(cls, t1: float, t2: float, t3: float) -> "TensorSpectrum":
        """Spectrum of ``diag(t1, t2, t3)`` for a signed diagonal tensor."""
        return cls.from_matrix(np.diag([float(t1), float(t2), float(t3)]))

    @property
    def sigma_sum(self) -> float:
        return self.sigma[0] + self.sigma[1] + self.sigma[2]

    @property
    def sigma_sq_sum(self) -> float:
        return self.sigma[0] ** 2 + self.sigma[1] ** 2 + self.sigma[2] ** 2


@dataclass(frozen=True)
class MeasurementTriad:
    """Three mutually orthogonal unit measurement directions (rows of ``dirs``).

    Each row is a Bloch direction defining one dichotomic measurement; the
    rows therefore describe three mutually unbiased qubit bases.  Unit norm
    and pairwise orthogonality are enforced within 1e-9.
    """

    dirs: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.dirs, dtype=float)
        if d.shape != (3, 3):
            raise InvalidDirection(f"expected 3 direction rows, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InvalidDirection("directions contain non-finite entries")
        gram = d @ d.T
        if np.max(np.abs(np.diag(gram) - 1.0)) > DIRECTION_TOL:
            raise InvalidDirection("directions must be unit vectors")
        off = gram - np.diag(np.diag(gram))
        if np.max(np.abs(off)) > DIRECTION_TOL:
            raise InvalidDirection("directions must be mutually orthogonal")
        d.setflags(write=False)
        object.__setattr__(self, "dirs", d)

    @classmethod
    def axes(cls) -> "MeasurementTriad":
        """The coordinate triad (x, y, z)."""
        return cls(np.eye(3))

    def negated(self) -> "MeasurementTriad":
        return MeasurementTriad(-self.dirs)

    def __iter__(self):
        return iter(self.dirs)


def _unit_direction(n, name: str) -> np.ndarray:
    v = np.asarray(n, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise InvalidDirection(f"{name} contains non-finite entries")
    if abs(np.linalg.norm(v) - 1.0) > DIRECTION_TOL:
        raise InvalidDirection(f"{name} must be a unit vector")
    return v


def bloch_decompose(rho: DensityMatrix) -> BlochForm:
    """Extract the Bloch vectors and correlation tensor of a state.

    Parameters
    ----------
    rho : DensityMatrix
        Validated two-qubit state.

    Returns
    -------
    BlochForm
        ``a_vec[i] = Tr[rho sigma_i x I]``, ``b_vec[j] = Tr[rho I x sigma_j]``
        and ``w[i, j] = Tr[rho sigma_i x sigma_j]``.  All traces are real for
        a Hermitian input; the imaginary residue is discarded.
    """
    mat = rho.matrix
    a = np.empty(3)
    b = np.empty(3)
    w = np.empty((3, 3))
    for i in range(3):
        a[i] = np.trace(mat @ np.kron(PAULIS[i], IDENTITY_2)).real
        b[i] = np.trace(mat @ np.kron(IDENTITY_2, PAULIS[i])).real
        for j in range(3):
            w[i, j] = np.trace(mat @ np.kron(PAULIS[i], PAULIS[j])).real
    return BlochForm(a, b, w)


def reconstruct_state(bf: BlochForm) -> DensityMatrix:
    """Rebuild the density matrix described by a Bloch decomposition.

    Raises
    ------
    NotAState
        If the decomposition does not correspond to a positive unit-trace
        matrix, i.e. the ``BlochForm`` is unphysical.
    """
    mat = np.eye(4, dtype=complex)
    for i in range(3):
        mat += bf.a_vec[i] * np.kron(PAULIS[i], IDENTITY_2)
        mat += bf.b_vec[i] * np.kron(IDENTITY_2, PAULIS[i])
        for j in range(3):
            mat += bf.w[i, j] * np.kron(PAULIS[i], PAULIS[j])
    mat /= 4.0
    try:
        return DensityMatrix(mat)
    except InvalidState as exc:
        raise NotAState(f"Bloch form does not describe a state: {exc}") from exc


def tensor_spectrum(bf: BlochForm) -> TensorSpectrum:
    """Singular spectrum of the correlation tensor of ``bf``.

    The spectrum is invariant under independent rotations of either
    party's measurement frame, which makes it the natural carrier for the
    steering, nonlocality and error-rate bounds in this package.
    """
    return TensorSpectrum.from_matrix(bf.w)


def joint_outcome_distribution(bf: BlochForm, alice_dir, bob_dir) -> np.ndarray:
    """Outcome distribution for one dichotomic measurement per party.

    Parameters
    ----------
    bf : BlochForm
        State in Bloch form.
    alice_dir, bob_dir : array_like
        Unit Bloch vectors measured by the two parties.

    Returns
    -------
    numpy.ndarray
        2x2 array ``p[a, b]`` over outcome bits, from the Born rule

            p(a, b) = 1/4 [ 1 + (-1)^a u.a + (-1)^b v.b + (-1)^(a+b) u.W.v ].

        Entries are clamped at zero (tolerance -1e-12) and renormalised so
        the table sums to exactly 1.
    """
    u = _unit_direction(alice_dir, "alice_dir")
    v = _unit_direction(bob_dir, "bob_dir")
    ua = float(u @ bf.a_vec)
    vb = float(v @ bf.b_vec)
    uwv = float(u @ bf.w @ v)
    p = np.empty((2, 2))
    for a in (0, 1):
        for b in (0, 1):
            sa = 1.0 if a == 0 else -1.0
            sb = 1.0 if b == 0 else -1.0
            p[a, b] = 0.25 * (1.0 + sa * ua + sb * vb + sa * sb * uwv)
    if p.min() < -1e-12:
        raise InvalidState(f"negative outcome probability {p.min():.3e}")
    total = p.sum()
    if abs(total - 1.0) > DEFAULT_TOL:
        raise InvalidState(f"outcome probabilities sum to {total!r}")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    return p
