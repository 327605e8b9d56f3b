"""Complex-matrix foundation: density matrices, Bloch vectors, composite
systems and unitary propagators.

States and operators are plain ``numpy`` arrays.  Bipartite operators on
``S (x) E`` use the system-major composite index ``r * d_E + k``, which is
exactly the layout produced by ``np.kron(eta, tau)``.
"""
from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class DimensionError(ValueError):
    """Operand shapes are inconsistent."""


class NotHermitianError(ValueError):
    """An operator that must be Hermitian is not."""


class InvalidStateError(ValueError):
    """A matrix fails the density-matrix invariants."""


def as_matrix(x) -> np.ndarray:
    """Return ``x`` as a finite complex 2-D array."""
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(x) -> np.ndarray:
    m = as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def is_hermitian(x, tol: float = HERMITIAN_TOL) -> bool:
    m = _square(x)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def _require_hermitian(x, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = _square(x)
    if not is_hermitian(m, tol):
        err = np.max(np.abs(m - m.conj().T))
        raise NotHermitianError(f"matrix is not Hermitian (max |X - X^dag| = {err:.3e})")
    return m


def min_eigenvalue(x, tol: float = HERMITIAN_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    m = _require_hermitian(x, tol)
    h = 0.5 * (m + m.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def is_density_matrix(x, tol: float = POSITIVITY_TOL) -> bool:
    try:
        m = _square(x)
    except ValueError:
        return False
    if abs(np.trace(m) - 1) > TRACE_TOL or not is_hermitian(m, HERMITIAN_TOL):
        return False
    return min_eigenvalue(m) >= -tol


def as_density_matrix(x, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Validate ``x`` as a density matrix and return it as a complex array.

    Raises :class:`InvalidStateError` when the trace, Hermiticity or
    positivity check fails.
    """
    m = _square(x)
    tr = np.trace(m)
    if abs(tr - 1) > TRACE_TOL:
        raise InvalidStateError(f"trace is {tr:.12g}, expected 1")
    if not is_hermitian(m, HERMITIAN_TOL):
        raise InvalidStateError("density matrix is not Hermitian")
    lam = min_eigenvalue(m)
    if lam < -tol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lam:.3e}")
    return m


def bloch_to_density(a) -> np.ndarray:
    """Qubit state ``(1 + a . sigma) / 2`` for a Bloch vector ``a``."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise DimensionError(f"Bloch vector must have 3 components, got shape {a.shape}")
    return 0.5 * (IDENTITY2 + a[0] * SIGMA_X + a[1] * SIGMA_Y + a[2] * SIGMA_Z)


def density_to_bloch(eta) -> np.ndarray:
    """Bloch components ``a_j = Re tr(eta sigma_j)`` of a qubit operator."""
    m = as_matrix(eta)
    if m.shape != (2, 2):
        raise DimensionError(f"Bloch vectors are defined for d = 2, got shape {m.shape}")
    return np.array([np.trace(m @ p).real for p in PAULIS])


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace_env(x, d_s: int, d_e: int) -> np.ndarray:
    """Trace out the environment factor of an operator on ``S (x) E``.

    ``(Tr_E X)_{rs} = sum_k X_{(r,k),(s,k)}`` with composite index
    ``r * d_e + k``.
    """
    m = as_matrix(x)
    n = d_s * d_e
    if m.shape != (n, n):
        raise DimensionError(f"operator shape {m.shape} does not match d_S*d_E = {n}")
    return np.einsum("ikjk->ij", m.reshape(d_s, d_e, d_s, d_e))


def partial_trace_sys(x, d_s: int, d_e: int) -> np.ndarray:
    m = as_matrix(x)
    n = d_s * d_e
    if m.shape != (n, n):
        raise DimensionError(f"operator shape {m.shape} does not match d_S*d_E = {n}")
    return np.einsum("kikj->ij", m.reshape(d_s, d_e, d_s, d_e))


def hermitian_eig(h, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian matrix (validated)."""
    m = _require_hermitian(h, tol)
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def propagator_from_eig(w: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
    return (v * np.exp(-1j * dt * w)) @ v.conj().T


def unitary_propagator(h, dt: float) -> np.ndarray:
    """``exp(-i dt H)`` via the eigendecomposition of the Hermitian ``H``."""
    w, v = hermitian_eig(h)
    return propagator_from_eig(w, v, dt)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def purity(eta) -> float:
    m = as_matrix(eta)
    return float(np.real(np.trace(m @ m)))


def swap_operator(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[i * d + j, j * d + i] = 1.0
    return s


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random state ``G G^dag / tr`` from a complex Ginibre matrix.

    ``rank=1`` gives Haar-random pure states.
    """
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_bloch_vector(rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """Uniform sample from the ball of the given radius."""
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return v * radius * rng.uniform() ** (1 / 3)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)
