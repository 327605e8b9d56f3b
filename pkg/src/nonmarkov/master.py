"""Differential picture of open-system dynamics.

* the time-local generator of the canonical maps, both as a finite
  difference of canonical maps and assembled from the canonical embedding;
* Runge-Kutta integration of the resulting master equation;
* Markovian (Lindblad) dynamics, including the extraction of Lindblad
  operators from a near-identity map;
* collision-model decoherence and its exponential rescaling;
* the short-time truncated generator with Gaussian decay.
"""
from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .canonical import SingularTimeError, canonical_embedding, inverse_reduced_aform
from .core import (
    PAULIS,
    DimensionError,
    as_density_matrix,
    as_matrix,
    commutator,
    density_to_bloch,
    hermitian_eig,
    partial_trace_env,
)
from .maps import AForm, BForm, MapForm, a_to_b, apply_a, map_from_function, spectral_decompose, to_aform
from .open_system import TotalDynamics, reduced_aform

DEFAULT_FD_STEP = 1e-5
DEFAULT_DT = 1e-3


class CompatibilityWarning(UserWarning):
    """A state outside the compatibility domain was fed to the canonical embedding."""


class IntegrationAborted(SingularTimeError):
    """Integration hit a singular time; ``trajectory`` holds the states computed so far."""

    def __init__(self, cause: SingularTimeError, trajectory: "Trajectory"):
        super().__init__(cause.t, cause.smallest_sv, cause.residual)
        self.trajectory = trajectory


# ---------------------------------------------------------------------------
# trajectories


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray = field(repr=False)  # shape (n, d, d)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[0] != times.shape[0]:
            raise DimensionError("need one d x d state per time")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def bloch(self) -> np.ndarray:
        return np.array([density_to_bloch(s) for s in self.states])

    @property
    def purity(self) -> np.ndarray:
        return np.einsum("nij,nji->n", self.states, self.states).real

    @property
    def traces(self) -> np.ndarray:
        return np.einsum("nii->n", self.states)

    @property
    def min_eig(self) -> np.ndarray:
        herm = 0.5 * (self.states + np.conj(np.swapaxes(self.states, 1, 2)))
        return np.linalg.eigvalsh(herm)[:, 0]

    def to_csv(self, path=None) -> str:
        """Write ``t,a1,a2,a3,purity,min_eig`` rows with 17 significant digits.

        Returns the CSV text; also writes it to ``path`` when given.
        """
        buf = io.StringIO()
        buf.write("t,a1,a2,a3,purity,min_eig\n")
        bloch = self.bloch
        for row in zip(self.times, bloch[:, 0], bloch[:, 1], bloch[:, 2], self.purity, self.min_eig):
            buf.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV as float arrays."""
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def _time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = max(1, math.ceil(abs(t1 - t0) / dt - 1e-9))
    return np.linspace(t0, t1, n + 1)


def rk4_integrate(rhs: Callable[[float, np.ndarray], np.ndarray], eta0, t0: float, t1: float, dt: float) -> Trajectory:
    """Classic fixed-step fourth-order Runge-Kutta; the step is shrunk so ``t1`` is hit exactly."""
    times = _time_grid(t0, t1, dt)
    states = [as_matrix(eta0)]
    try:
        for ta, tb in zip(times[:-1], times[1:]):
            h = tb - ta
            y = states[-1]
            k1 = rhs(ta, y)
            k2 = rhs(ta + h / 2, y + h / 2 * k1)
            k3 = rhs(ta + h / 2, y + h / 2 * k2)
            k4 = rhs(tb, y + h * k3)
            states.append(y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4))
    except SingularTimeError as exc:
        raise IntegrationAborted(exc, Trajectory(times[: len(states)], states)) from exc
    return Trajectory(times, states)


# ---------------------------------------------------------------------------
# non-Markovian generator


def commutator_superop(h: np.ndarray) -> AForm:
    """A-form of ``X -> -i [h, X]`` (row-major vectorisation)."""
    h = as_matrix(h)
    one = np.eye(h.shape[0])
    return AForm(h.shape[0], -1j * (np.kron(h, one) - np.kron(one, h.T)))


def f_operator(td: TotalDynamics, t: float, eta, tol: float = 1e-9) -> np.ndarray:
    """``F_t(eta) = -i Tr_E[H_I E_t(eta)]`` with the canonical embedding ``E_t``.

    Emits :class:`CompatibilityWarning` if ``eta`` is outside the
    compatibility domain (the value is still returned).
    """
    emb = canonical_embedding(td, t, eta)
    if emb.min_eig < -tol:
        warnings.warn(
            f"state outside compatibility domain at t = {t:.6g} (embedding min eigenvalue {emb.min_eig:.3e})",
            CompatibilityWarning,
            stacklevel=2,
        )
    return -1j * partial_trace_env(td.h_interaction @ emb.state, td.d_s, td.d_e)


def k_operator(td: TotalDynamics, t: float, x) -> np.ndarray:
    """``K_t(x) = -i Tr_E[H_I E_t(x)] + i Tr_E[E_t(x) H_I]`` (linear in ``x``)."""
    rho = canonical_embedding(td, t, x).state
    h_i = td.h_interaction
    return -1j * partial_trace_env(h_i @ rho - rho @ h_i, td.d_s, td.d_e)


@dataclass(frozen=True, eq=False)
class GeneratorSample:
    """Environment part ``K_t`` of the generator at time ``t`` plus the local Hamiltonian."""

    t: float
    k_superop: BForm = field(repr=False)
    h_local: np.ndarray = field(repr=False)

    def k(self, eta) -> np.ndarray:
        return self.k_superop(eta)

    def rhs(self, eta) -> np.ndarray:
        """``-i [H_O, eta] + K_t(eta)``."""
        eta = as_matrix(eta)
        return -1j * commutator(self.h_local, eta) + self.k_superop(eta)


def generator_at(td: TotalDynamics, t: float, fd_step: float = DEFAULT_FD_STEP) -> GeneratorSample:
    """``K_t`` from a central difference of canonical maps around ``t``.

    ``(B^C(t+h|t) - B^C(t-h|t)) / 2h`` with the ``-i[H_O, .]`` part removed.
    Raises :class:`SingularTimeError` near times where the reduced map is
    not invertible.
    """
    inv, _ = inverse_reduced_aform(td, t)
    plus = reduced_aform(td, t + fd_step).matrix
    minus = reduced_aform(td, t - fd_step).matrix
    deriv = (plus - minus) / (2 * fd_step) @ inv.matrix
    k = deriv - commutator_superop(td.h_local).matrix
    return GeneratorSample(float(t), a_to_b(AForm(td.d_s, k)), td.h_local)


def generator_from_embedding(td: TotalDynamics, t: float) -> GeneratorSample:
    """``K_t = F_t + F_t^dag`` assembled from the canonical embedding on matrix units."""
    a = map_from_function(lambda x: k_operator(td, t, x), td.d_s)
    return GeneratorSample(float(t), a_to_b(a), td.h_local)


def integrate_nonmarkovian(
    td: TotalDynamics,
    eta0,
    t0: float,
    t1: float,
    dt: float = DEFAULT_DT,
    fd_step: float = DEFAULT_FD_STEP,
) -> Trajectory:
    """RK4 integration of ``eta' = -i[H_O, eta] + K_t(eta)``.

    ``K_t`` is sampled with :func:`generator_at` at every stage time.  If a
    stage lands on a singular time :class:`IntegrationAborted` is raised,
    carrying the states computed up to that point.
    """
    eta0 = as_density_matrix(eta0)
    cache: dict[float, AForm] = {}

    def rhs(t, eta):
        a = cache.get(t)
        if a is None:
            g = generator_at(td, t, fd_step)
            a = cache[t] = to_aform(g.k_superop)
        return -1j * commutator(td.h_local, eta) + apply_a(a, eta)

    return rk4_integrate(rhs, eta0, t0, t1, dt)


# ---------------------------------------------------------------------------
# Lindblad dynamics


@dataclass(frozen=True, eq=False)
class LindbladModel:
    h: np.ndarray = field(repr=False)
    l_ops: tuple = field(repr=False)

    def __post_init__(self):
        h = as_matrix(self.h)
        hermitian_eig(h)
        ops = tuple(as_matrix(l) for l in self.l_ops)
        if any(l.shape != h.shape for l in ops):
            raise DimensionError("Lindblad operators must match the Hamiltonian's shape")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "l_ops", ops)

    @property
    def dim(self) -> int:
        return self.h.shape[0]


def depolarizing_lindblad(gamma: float) -> LindbladModel:
    """``L_j = sqrt(gamma/4) sigma_j``; generates ``eta' = gamma (1/2 - eta)``."""
    c = math.sqrt(gamma / 4)
    return LindbladModel(np.zeros((2, 2), complex), tuple(c * p for p in PAULIS))


def lindblad_rhs(m: LindbladModel, eta) -> np.ndarray:
    eta = as_matrix(eta)
    out = -1j * commutator(m.h, eta)
    for l in m.l_ops:
        ld = l.conj().T
        out = out + l @ eta @ ld - 0.5 * (ld @ l @ eta + eta @ ld @ l)
    return out


def lindblad_superoperator(m: LindbladModel) -> AForm:
    d = m.dim
    one = np.eye(d)
    g = commutator_superop(m.h).matrix.copy()
    for l in m.l_ops:
        ldl = l.conj().T @ l
        g += np.kron(l, l.conj()) - 0.5 * (np.kron(ldl, one) + np.kron(one, ldl.T))
    return AForm(d, g)


def lindblad_map(m: LindbladModel, t: float) -> AForm:
    """Flow of the Lindblad equation over a time ``t`` (matrix exponential of the generator)."""
    return AForm(m.dim, expm(t * lindblad_superoperator(m).matrix))


def integrate_lindblad(m: LindbladModel, eta0, t0: float, t1: float, dt: float = DEFAULT_DT) -> Trajectory:
    return rk4_integrate(lambda _t, eta: lindblad_rhs(m, eta), as_density_matrix(eta0), t0, t1, dt)


def channel_rates(m: LindbladModel) -> np.ndarray:
    """``tr(L^dag L)`` for each Lindblad operator."""
    return np.array([np.trace(l.conj().T @ l).real for l in m.l_ops])


def lindblad_from_map(b_t: MapForm, t: float, tol: float = 1e-9) -> LindbladModel:
    """Lindblad operators of a near-identity completely positive map over a short time ``t``.

    With the eigen-decomposition ``lambda_a, C_a`` (``lambda_0`` dominant),
    ``L_a = sqrt(lambda_a / t) C_a`` for ``a > 0`` and the anti-Hermitian part
    of ``L_0 = (sqrt(lambda_0) C_0 - 1) / sqrt(t)`` gives the Hamiltonian.
    ``H`` is scaled so that ``lindblad_rhs`` of the result approximates
    ``(B_t - 1) / t``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    spec = spectral_decompose(b_t if isinstance(b_t, BForm) else a_to_b(b_t))
    d = spec.dim
    lam0 = spec.lambdas[0]
    if lam0 < 0.75 * d:
        raise ValueError(f"map is too far from the identity (dominant eigenvalue {lam0:.6g} < {0.75 * d})")
    if spec.lambdas[-1] < -tol:
        raise ValueError(f"map is not completely positive (eigenvalue {spec.lambdas[-1]:.3e})")
    rest = np.clip(spec.lambdas[1:], 0.0, None)
    l_ops = tuple(math.sqrt(lam / t) * c for lam, c in zip(rest, spec.c_matrices[1:]))
    l0 = (math.sqrt(lam0) * spec.c_matrices[0] - np.eye(d)) / math.sqrt(t)
    h = 0.5j * (l0 - l0.conj().T) / math.sqrt(t)
    return LindbladModel(0.5 * (h + h.conj().T), l_ops)


# ---------------------------------------------------------------------------
# collision model and rescaling


def collision_simulate(b_single: MapForm, n: int, eta0, interval: float = 1.0) -> Trajectory:
    """Apply the single-collision map ``n`` times; times are ``k * interval``."""
    if n < 0:
        raise ValueError("number of collisions must be non-negative")
    a = to_aform(b_single)
    states = [as_matrix(eta0)]
    for _ in range(n):
        states.append(apply_a(a, states[-1]))
    return Trajectory(interval * np.arange(n + 1), states)


def rescaled_rate(T: float) -> float:
    """Rate ``gamma = (2/T) ln(1/cos T)`` with ``cos(T)**(2N) == exp(-gamma N T)``."""
    if not 0 < T < math.pi / 2:
        raise ValueError(f"collision time must lie in (0, pi/2), got {T!r}")
    return -2.0 / T * math.log(math.cos(T))


# ---------------------------------------------------------------------------
# truncated generator


def truncated_rhs(t: float, eta, t0: float = 0.0) -> np.ndarray:
    """``(t - t0)(1 - 2 eta)``: the qubit generator with ``tan`` replaced by its argument."""
    eta = as_matrix(eta)
    if eta.shape != (2, 2):
        raise DimensionError("the truncated generator is defined for a qubit")
    return (t - t0) * (np.eye(2) - 2 * eta)


def integrate_truncated(eta0, t0: float, t1: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Integrate the truncated equation; Bloch components decay as ``exp(-(t - t0)^2)``."""
    eta0 = as_density_matrix(eta0)
    return rk4_integrate(lambda t, eta: truncated_rhs(t, eta, t0), eta0, t0, t1, dt)


def swap_generator_closed_form(t: float, eta, t0: float = 0.0) -> np.ndarray:
    """``tan(t - t0)(1 - 2 eta)``, the environment generator of the swap-coupled qubit."""
    return math.tan(t - t0) * (np.eye(2) - 2 * as_matrix(eta))

