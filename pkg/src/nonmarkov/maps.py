"""Supermatrix calculus for linear maps on ``d x d`` matrices.

Two index conventions describe the same map.

* A-form: row ``(r', s') -> r' * d + s'``, column ``(r, s) -> r * d + s``.
  The map acts as a matrix-vector product on the row-major flattening of
  the state, so composition is ordinary matrix multiplication.
* B-form: row ``(r', r) -> r' * d + r``, column ``(s', s) -> s' * d + s``.
  A Hermiticity-preserving map has a Hermitian B-form, whose eigenvalues
  decide complete positivity.

Both forms share the same 4-index tensor ``T[r', s', r, s]``; converting
between them swaps the middle two axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .core import (
    HERMITIAN_TOL,
    IDENTITY2,
    PAULIS,
    DimensionError,
    NotHermitianError,
    as_matrix,
    random_density_matrix,
)

CP_TOL = 1e-9


def _check_supermatrix(dim: int, matrix: np.ndarray) -> np.ndarray:
    m = as_matrix(matrix)
    n = dim * dim
    if m.shape != (n, n):
        raise DimensionError(f"supermatrix for d = {dim} must be {n}x{n}, got {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class AForm:
    """Map in A-form; ``matrix @ vec(rho)`` gives the image."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _check_supermatrix(self.dim, self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, rho) -> np.ndarray:
        return apply_a(self, rho)

    def __matmul__(self, other: "AForm") -> "AForm":
        return compose_a(self, other)

    @classmethod
    def identity(cls, dim: int) -> "AForm":
        return cls(dim, np.eye(dim * dim, dtype=complex))


@dataclass(frozen=True, eq=False)
class BForm:
    """Map in B-form (Hermitian for Hermiticity-preserving maps)."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = _check_supermatrix(self.dim, self.matrix)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __call__(self, rho) -> np.ndarray:
        return apply_b(self, rho)

    @classmethod
    def identity(cls, dim: int) -> "BForm":
        return a_to_b(AForm.identity(dim))


MapForm = Union[AForm, BForm]


@dataclass(frozen=True)
class MapSpectrum:
    """Eigen-decomposition ``rho -> sum_a lambdas[a] C_a rho C_a^dag``.

    Eigenvalues are sorted in descending order.  Within a degenerate
    eigenvalue the individual ``C_a`` are a gauge choice; only the
    reconstructed map is meaningful.
    """

    lambdas: np.ndarray
    c_matrices: np.ndarray  # shape (d*d, d, d)

    @property
    def dim(self) -> int:
        return self.c_matrices.shape[1]

    def apply(self, rho) -> np.ndarray:
        rho = as_matrix(rho)
        c = self.c_matrices
        return np.einsum("a,aij,jk,alk->il", self.lambdas, c, rho, c.conj())

    def to_bform(self) -> BForm:
        v = self.c_matrices.reshape(len(self.lambdas), -1)
        return BForm(self.dim, (v.T * self.lambdas) @ v.conj())

    def trace_identity(self) -> np.ndarray:
        """``sum_a lambda_a C_a^dag C_a``; equals the identity for trace-preserving maps."""
        c = self.c_matrices
        return np.einsum("a,aji,ajk->ik", self.lambdas, c.conj(), c)


@dataclass(frozen=True)
class AffineQubitMap:
    """Bloch-vector map ``a -> R a + r``."""

    R: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if R.shape != (3, 3) or r.shape != (3,):
            raise DimensionError("affine qubit map needs a 3x3 matrix and a 3-vector")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "r", r)

    def __call__(self, a) -> np.ndarray:
        return self.R @ np.asarray(a, dtype=float) + self.r


class PropertyReport(NamedTuple):
    trace_preserving: bool
    hermiticity_preserving: bool
    positive_on_samples: bool
    worst_min_eigenvalue: float


class PseudoInverse(NamedTuple):
    form: AForm
    rank: int
    singular_values: np.ndarray


# ---------------------------------------------------------------------------
# index exchange and action


def _reshuffle(matrix: np.ndarray, d: int) -> np.ndarray:
    t = matrix.reshape(d, d, d, d)
    return t.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def a_to_b(a: AForm) -> BForm:
    return BForm(a.dim, _reshuffle(a.matrix, a.dim))


def b_to_a(b: BForm) -> AForm:
    return AForm(b.dim, _reshuffle(b.matrix, b.dim))


def to_aform(m: MapForm) -> AForm:
    return m if isinstance(m, AForm) else b_to_a(m)


def to_bform(m: MapForm) -> BForm:
    return m if isinstance(m, BForm) else a_to_b(m)


def _check_operand(dim: int, rho) -> np.ndarray:
    r = as_matrix(rho)
    if r.shape != (dim, dim):
        raise DimensionError(f"map on d = {dim} cannot act on shape {r.shape}")
    return r


def apply_a(a: AForm, rho) -> np.ndarray:
    r = _check_operand(a.dim, rho)
    return (a.matrix @ r.reshape(-1)).reshape(a.dim, a.dim)


def apply_b(b: BForm, rho) -> np.ndarray:
    """``rho'_{r's'} = sum_{rs} B_{(r'r),(s's)} rho_{rs}``."""
    r = _check_operand(b.dim, rho)
    d = b.dim
    return np.einsum("prqs,rs->pq", b.matrix.reshape(d, d, d, d), r)


def compose_a(a2: AForm, a1: AForm) -> AForm:
    """Map that applies ``a1`` first, then ``a2``."""
    if a2.dim != a1.dim:
        raise DimensionError(f"cannot compose maps on d = {a2.dim} and d = {a1.dim}")
    return AForm(a1.dim, a2.matrix @ a1.matrix)


def map_from_function(func, dim: int) -> AForm:
    """A-form of a linear map given as a Python callable, built on matrix units."""
    cols = []
    for r in range(dim):
        for s in range(dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[r, s] = 1.0
            cols.append(np.asarray(func(e), dtype=complex).reshape(-1))
    return AForm(dim, np.column_stack(cols))


def transpose_map(dim: int) -> AForm:
    return map_from_function(lambda x: x.T, dim)


# ---------------------------------------------------------------------------
# properties


def is_trace_preserving(a: AForm, tol: float = HERMITIAN_TOL) -> bool:
    d = a.dim
    t = a.matrix.reshape(d, d, d, d)
    return bool(np.max(np.abs(np.einsum("pprs->rs", t) - np.eye(d))) <= tol)


def is_hermiticity_preserving(a: AForm, tol: float = HERMITIAN_TOL) -> bool:
    """``A_{(s'r'),(sr)} = conj(A_{(r's'),(rs)})``."""
    d = a.dim
    t = a.matrix.reshape(d, d, d, d)
    return bool(np.max(np.abs(t.transpose(1, 0, 3, 2) - t.conj())) <= tol)


def check_a_properties(
    a: MapForm,
    n_samples: int = 500,
    seed: int = 0,
    tol: float = HERMITIAN_TOL,
) -> PropertyReport:
    """Check trace and Hermiticity preservation algebraically and positivity by sampling.

    Half of the samples are Haar-random pure states, the rest full-rank
    Ginibre mixtures.  Positivity is only refuted, never certified.
    """
    a = to_aform(a)
    tp = is_trace_preserving(a, tol)
    hp = is_hermiticity_preserving(a, tol)
    rng = np.random.default_rng(seed)
    worst = np.inf
    positive = True
    for i in range(n_samples):
        rank = 1 if i % 2 == 0 else None
        out = apply_a(a, random_density_matrix(a.dim, rng, rank=rank))
        if np.max(np.abs(out - out.conj().T)) > tol:
            positive = False
            continue
        lam = float(np.linalg.eigvalsh(0.5 * (out + out.conj().T))[0])
        worst = min(worst, lam)
        if lam < -tol:
            positive = False
    return PropertyReport(tp, hp, positive, float(worst))


def _phase_fix(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size == 0:
        return v
    p = v[nz[0]]
    return v * (abs(p) / p)


def spectral_decompose(b: BForm, tol: float = HERMITIAN_TOL) -> MapSpectrum:
    """Eigenvalues and trace-orthonormal eigenmatrices of a Hermitian B-form."""
    m = b.matrix
    err = np.max(np.abs(m - m.conj().T))
    if err > tol:
        raise NotHermitianError(f"B-form is not Hermitian (max deviation {err:.3e})")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    vecs = [_phase_fix(v[:, k]) for k in range(len(w))]

    def lex(vec):
        return tuple(x for z in np.round(vec, 12) for x in (z.real, z.imag))

    order = list(np.argsort(-w, kind="stable"))
    # reorder within eigenvalue clusters by eigenvector entries
    out, i = [], 0
    while i < len(order):
        j = i + 1
        while j < len(order) and abs(w[order[j]] - w[order[i]]) <= tol:
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: lex(vecs[k])))
        i = j
    lambdas = w[out]
    cs = np.array([vecs[k].reshape(b.dim, b.dim) for k in out])
    return MapSpectrum(lambdas, cs)


def choi_spectrum(m: MapForm) -> np.ndarray:
    """Eigenvalues of the B-form, descending."""
    b = to_bform(m)
    return np.sort(np.linalg.eigvalsh(0.5 * (b.matrix + b.matrix.conj().T)))[::-1]


def is_completely_positive(b: MapForm, tol: float = CP_TOL) -> bool:
    b = to_bform(b)
    if np.max(np.abs(b.matrix - b.matrix.conj().T)) > HERMITIAN_TOL:
        raise NotHermitianError("complete positivity is defined here for Hermitian B-forms")
    return bool(choi_spectrum(b)[-1] >= -tol)


# ---------------------------------------------------------------------------
# inverses and compatibility domains


def pseudo_inverse_a(a: AForm, sv_cutoff: float | None = None) -> PseudoInverse:
    """Moore-Penrose pseudo-inverse of the A-form supermatrix.

    Singular values below ``sv_cutoff`` are treated as zero.  The default
    cutoff is ``1e-12`` times the largest singular value.
    """
    u, s, vh = np.linalg.svd(a.matrix)
    cutoff = 1e-12 * s[0] if sv_cutoff is None else sv_cutoff
    keep = s > cutoff
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    pinv = (vh.conj().T * inv_s) @ u.conj().T
    return PseudoInverse(AForm(a.dim, pinv), int(keep.sum()), s)


def preimage(a_forward: AForm, rho) -> np.ndarray:
    """Least-squares preimage ``pinv(A) rho``."""
    return apply_a(pseudo_inverse_a(a_forward).form, rho)


def in_compatibility_domain(a_forward: MapForm, rho, tol: float = 1e-9) -> bool:
    """Whether ``rho`` is the image of a valid state under ``a_forward``.

    The candidate preimage is the pseudo-inverse image; it has to be a
    density matrix and be mapped back onto ``rho``.
    """
    a = to_aform(a_forward)
    rho = as_matrix(rho)
    rho0 = preimage(a, rho)
    if np.max(np.abs(apply_a(a, rho0) - rho)) > tol:
        return False
    if abs(np.trace(rho0) - 1) > tol or np.max(np.abs(rho0 - rho0.conj().T)) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho0 + rho0.conj().T))[0] >= -tol)


# ---------------------------------------------------------------------------
# qubit affine form

_PAULI_BASIS = (IDENTITY2,) + PAULIS


def affine_to_a(m: AffineQubitMap) -> AForm:
    """A-form of the qubit map ``(1 + a.sigma)/2 -> (1 + (R a + r).sigma)/2``."""
    images = [IDENTITY2 + sum(m.r[i] * PAULIS[i] for i in range(3))]
    for j in range(3):
        images.append(sum(m.R[i, j] * PAULIS[i] for i in range(3)))
    mat = sum(
        np.outer(img.reshape(-1), p.conj().reshape(-1)) for img, p in zip(images, _PAULI_BASIS)
    )
    return AForm(2, 0.5 * mat)


def a_to_affine(a: MapForm) -> AffineQubitMap:
    """Affine Bloch representation of a trace- and Hermiticity-preserving qubit map."""
    a = to_aform(a)
    if a.dim != 2:
        raise DimensionError("affine representation is defined for qubit maps")
    r = np.array([0.5 * np.trace(p @ apply_a(a, IDENTITY2)).real for p in PAULIS])
    R = np.array([[0.5 * np.trace(pi @ apply_a(a, pj)).real for pj in PAULIS] for pi in PAULIS])
    return AffineQubitMap(R, r)


def depolarizing_map(shrink: float) -> AForm:
    """Qubit map ``a -> shrink * a``."""
    return affine_to_a(AffineQubitMap(shrink * np.eye(3), np.zeros(3)))


# ---------------------------------------------------------------------------
# JSON map format: {"dim": d, "form": "A"|"B", "entries": [[re, im], ...]}


def map_to_json(m: MapForm) -> dict:
    form = "A" if isinstance(m, AForm) else "B"
    entries = [[float(z.real), float(z.imag)] for z in m.matrix.reshape(-1)]
    return {"dim": int(m.dim), "form": form, "entries": entries}


def map_from_json(data: dict) -> MapForm:
    try:
        dim = int(data["dim"])
        form = data["form"]
        entries = data["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"map JSON missing field: {exc}") from None
    if form not in ("A", "B"):
        raise ValueError(f"map form must be 'A' or 'B', got {form!r}")
    flat = np.array([complex(e[0], e[1]) for e in entries])
    if flat.size != dim**4:
        raise ValueError(f"expected {dim**4} entries for d = {dim}, got {flat.size}")
    mat = flat.reshape(dim * dim, dim * dim)
    return AForm(dim, mat) if form == "A" else BForm(dim, mat)
