"""Canonical dynamical maps and canonical embeddings.

A canonical map from ``t1`` to ``t2`` first undoes the reduced evolution
``t0 -> t1`` with the pseudo-inverse and then evolves forward ``t0 -> t2``.
These maps compose exactly and invert each other, but they are generally
not positive; they are meaningful only on the compatibility domain.

The canonical embedding lifts a reduced state at time ``t`` to the
correlated total state by going back to ``t0``, attaching ``tau`` and
evolving the total system forward.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix
from .maps import AForm, BForm, a_to_b, apply_a, pseudo_inverse_a
from .open_system import EmbeddingResult, TotalDynamics, reduced_aform

SINGULAR_SV = 1e-6
TIME_MATCH_TOL = 1e-12


class SingularTimeError(ArithmeticError):
    """The reduced map at the requested time is (numerically) not invertible."""

    def __init__(self, t: float, smallest_sv: float, residual: float):
        self.t = t
        self.smallest_sv = smallest_sv
        self.residual = residual
        super().__init__(
            f"reduced map at t = {t:.12g} is singular: smallest singular value "
            f"{smallest_sv:.3e}, inversion residual {residual:.3e}"
        )


@dataclass(frozen=True, eq=False)
class CanonicalMap:
    """Canonical map ``t_from -> t_to`` for the given total dynamics.

    ``residual`` is ``max |A_inv A - 1|`` of the inverse used to build it,
    non-zero only for maps built through a rank-deficient reduced map.
    """

    a: AForm = field(repr=False)
    t_from: float
    t_to: float
    source: TotalDynamics = field(repr=False)
    residual: float = 0.0

    @property
    def b(self) -> BForm:
        return a_to_b(self.a)

    def __call__(self, eta) -> np.ndarray:
        return apply_a(self.a, eta)


def inverse_reduced_aform(td: TotalDynamics, t: float, allow_singular: bool = False) -> tuple[AForm, float]:
    """Pseudo-inverse of the reduced map ``t0 -> t`` and its inversion residual."""
    fwd = reduced_aform(td, t)
    pinv = pseudo_inverse_a(fwd)
    n = fwd.matrix.shape[0]
    residual = float(np.max(np.abs(pinv.form.matrix @ fwd.matrix - np.eye(n))))
    smallest = float(pinv.singular_values[-1])
    if smallest < SINGULAR_SV and not allow_singular:
        raise SingularTimeError(t, smallest, residual)
    return pinv.form, residual


def canonical_map(td: TotalDynamics, t1: float, t2: float, allow_singular: bool = False) -> CanonicalMap:
    """Canonical map ``B(t2|t0) * pinv(B(t1|t0))`` composed in A-form.

    Raises :class:`SingularTimeError` when the reduced map at ``t1`` has a
    singular value below ``1e-6``, unless ``allow_singular`` is set, in
    which case the Moore-Penrose inverse is used and its residual recorded.
    """
    inv, residual = inverse_reduced_aform(td, t1, allow_singular)
    fwd = reduced_aform(td, t2)
    return CanonicalMap(AForm(td.d_s, fwd.matrix @ inv.matrix), float(t1), float(t2), td, residual)


def compose_canonical(m2: CanonicalMap, m1: CanonicalMap) -> CanonicalMap:
    """Apply ``m1`` then ``m2``; requires ``m1.t_to == m2.t_from``."""
    if m1.source is not m2.source:
        raise ValueError("canonical maps come from different total dynamics")
    if abs(m1.t_to - m2.t_from) > TIME_MATCH_TOL:
        raise ValueError(f"time chain mismatch: {m1.t_to!r} -> {m2.t_from!r}")
    a = AForm(m1.a.dim, m2.a.matrix @ m1.a.matrix)
    return CanonicalMap(a, m1.t_from, m2.t_to, m1.source, max(m1.residual, m2.residual))


def canonical_embedding(td: TotalDynamics, t: float, eta, allow_singular: bool = False) -> EmbeddingResult:
    """Correlated total state ``U(t|t0) [(B^C(t0|t) eta) (x) tau] U(t|t0)^dag``.

    Hermitian with unit trace for any Hermitian unit-trace ``eta``; its
    smallest eigenvalue is negative when ``eta`` lies outside the
    compatibility domain at ``t``.
    """
    inv, _ = inverse_reduced_aform(td, t, allow_singular)
    eta0 = apply_a(inv, as_matrix(eta))
    u = td.propagator(t - td.t0)
    rho = u @ np.kron(eta0, td.tau) @ u.conj().T
    return EmbeddingResult(rho, float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]))


def embedding_relocation_check(td: TotalDynamics, t: float, t_prime: float, eta) -> float:
    """Max-entry deviation between the embedding at ``t`` and the one relocated from ``t_prime``."""
    direct = canonical_embedding(td, t, eta).state
    eta_prime = canonical_map(td, t, t_prime)(eta)
    other = canonical_embedding(td, t_prime, eta_prime).state
    u = td.propagator(t - t_prime)
    relocated = u @ other @ u.conj().T
    return float(np.max(np.abs(direct - relocated)))
