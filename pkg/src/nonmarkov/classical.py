"""Classical stochastic matrices (column convention, ``p' = M @ p``).

A stochastic matrix maps the probability simplex into itself.  Its
pseudo-inverse is generally not stochastic and only makes sense on the image
of the simplex, the classical counterpart of a compatibility domain.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

TOL = 1e-12


def as_probability_vector(p, tol: float = TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"probability vector must be 1-D, got shape {p.shape}")
    if np.any(p < -tol) or abs(p.sum() - 1) > tol:
        raise ValueError("not a probability vector")
    return p


def is_probability_vector(p, tol: float = TOL) -> bool:
    try:
        as_probability_vector(p, tol)
    except ValueError:
        return False
    return True


def as_stochastic_matrix(m, tol: float = TOL) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"stochastic matrix must be 2-D, got shape {m.shape}")
    if np.any(m < -tol) or np.any(np.abs(m.sum(axis=0) - 1) > tol):
        raise ValueError("columns must be non-negative and sum to 1")
    return m


def apply_stochastic(m, p) -> np.ndarray:
    m = as_stochastic_matrix(m)
    p = as_probability_vector(p)
    if m.shape[1] != p.shape[0]:
        raise ValueError(f"cannot apply a {m.shape} matrix to a vector of length {p.shape[0]}")
    return m @ p


def is_bistochastic(m, tol: float = TOL) -> bool:
    m = as_stochastic_matrix(m, tol)
    return m.shape[0] == m.shape[1] and bool(np.all(np.abs(m.sum(axis=1) - 1) <= tol))


class Preimage(NamedTuple):
    preimage: np.ndarray
    in_domain: bool


def pseudo_inverse_stochastic(m, p, tol: float = 1e-10) -> Preimage:
    """Moore-Penrose preimage of ``p`` and whether ``p`` is in the image of the simplex."""
    m = as_stochastic_matrix(m)
    p = np.asarray(p, dtype=float)
    q = np.linalg.pinv(m) @ p
    ok = is_probability_vector(q, tol) and bool(np.max(np.abs(m @ q - p)) <= tol)
    return Preimage(q, ok)


def random_stochastic(n: int, rng: np.random.Generator, rows: int | None = None) -> np.ndarray:
    """Columns drawn uniformly from the simplex."""
    return rng.dirichlet(np.ones(n if rows is None else rows), size=n).T


def permutation_matrix(perm) -> np.ndarray:
    """Matrix sending basis vector ``j`` to ``perm[j]``."""
    perm = list(perm)
    m = np.zeros((len(perm), len(perm)))
    m[perm, range(len(perm))] = 1.0
    return m
