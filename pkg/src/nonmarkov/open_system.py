"""Reduced dynamics of a system coupled to a finite environment.

The system starts uncorrelated, ``rho(t0) = eta (x) tau``; the total state
evolves unitarily under a constant Hamiltonian and the environment is traced
out.  Reduced maps are obtained by pushing the matrix units ``E_rs``
through embedding, evolution and reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .core import (
    PAULIS,
    DimensionError,
    as_density_matrix,
    as_matrix,
    hermitian_eig,
    partial_trace_env,
    propagator_from_eig,
)
from .maps import AForm, BForm, a_to_b


@dataclass(frozen=True, eq=False)
class TotalDynamics:
    """Constant Hamiltonian on ``S (x) E`` with initial environment state ``tau``.

    ``h_local`` is the system-only part ``H_O`` of the Hamiltonian (a
    ``d_s x d_s`` matrix, zero by default); the remainder
    ``H - H_O (x) 1`` is the interaction ``H_I``.
    """

    H: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    t0: float = 0.0
    d_s: int = 2
    d_e: int = 2
    h_local: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.d_s * self.d_e
        H = as_matrix(self.H)
        if H.shape != (n, n):
            raise DimensionError(f"Hamiltonian must be {n}x{n}, got {H.shape}")
        w, v = hermitian_eig(H)
        tau = as_density_matrix(self.tau)
        if tau.shape != (self.d_e, self.d_e):
            raise DimensionError(f"tau must be {self.d_e}x{self.d_e}, got {tau.shape}")
        h_o = np.zeros((self.d_s, self.d_s), complex) if self.h_local is None else as_matrix(self.h_local)
        if h_o.shape != (self.d_s, self.d_s):
            raise DimensionError(f"h_local must be {self.d_s}x{self.d_s}, got {h_o.shape}")
        hermitian_eig(h_o)
        for name, val in (("H", H), ("tau", tau), ("h_local", h_o)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "_eig", (w, v))

    @property
    def h_interaction(self) -> np.ndarray:
        return self.H - np.kron(self.h_local, np.eye(self.d_e))

    def propagator(self, dt: float) -> np.ndarray:
        """``U = exp(-i dt H)`` on the total space."""
        w, v = self._eig
        return propagator_from_eig(w, v, dt)


def swap_dynamics(t0: float = 0.0) -> TotalDynamics:
    """Qubit coupled to a fully mixed qubit by ``H = 1/2 sum_j sigma_j (x) sigma_j``.

    The reduced Bloch vector shrinks as ``cos(t - t0)^2``.
    """
    H = 0.5 * sum(np.kron(p, p) for p in PAULIS)
    return TotalDynamics(H=H, tau=np.eye(2) / 2, t0=t0, d_s=2, d_e=2)


class EmbeddingResult(NamedTuple):
    state: np.ndarray
    min_eig: float


def _min_eig(x: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (x + x.conj().T))[0])


def product_embed(eta, tau) -> EmbeddingResult:
    """``eta (x) tau``."""
    rho = np.kron(as_matrix(eta), as_matrix(tau))
    return EmbeddingResult(rho, _min_eig(rho))


def evolve_total(td: TotalDynamics, rho, t_i: float, t_f: float) -> np.ndarray:
    u = td.propagator(t_f - t_i)
    rho = as_matrix(rho)
    n = td.d_s * td.d_e
    if rho.shape != (n, n):
        raise DimensionError(f"total state must be {n}x{n}, got {rho.shape}")
    return u @ rho @ u.conj().T


def reduced_state(td: TotalDynamics, eta, t: float) -> np.ndarray:
    """``Tr_E[U (eta (x) tau) U^dag]`` with ``U = U(t|t0)``."""
    rho = evolve_total(td, np.kron(as_matrix(eta), td.tau), td.t0, t)
    return partial_trace_env(rho, td.d_s, td.d_e)


def reduced_aform(td: TotalDynamics, t_f: float) -> AForm:
    return _reduced_aform_cached(td, float(t_f))


@lru_cache(maxsize=4096)
def _reduced_aform_cached(td: TotalDynamics, t_f: float) -> AForm:
    d, de = td.d_s, td.d_e
    u = td.propagator(t_f - td.t0)
    # columns of the A-form are the images of the matrix units E_rs
    u4 = u.reshape(d, de, d, de)
    # Tr_E[U (E_rs (x) tau) U^dag]_{ab} = sum_{k,m,n} U[a,k,r,m] tau[m,n] conj(U[b,k,s,n])
    t = np.einsum("akrm,mn,bksn->abrs", u4, td.tau, u4.conj())
    return AForm(d, t.reshape(d * d, d * d))


def reduced_dynamical_map(td: TotalDynamics, t_f: float) -> BForm:
    """B-form of ``eta(t0) -> eta(t_f)`` for the product initial condition.

    ``t_f < t0`` is allowed and gives the reduced map of the reversed
    unitary.
    """
    return a_to_b(reduced_aform(td, t_f))
