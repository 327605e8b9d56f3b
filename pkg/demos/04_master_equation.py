"""
A time-local master equation from the exact dynamics
====================================================

Differentiating the forward map and multiplying by its inverse gives a
time-local generator.  For the swap-coupled qubit it reduces to
d eta/dt = tan(t)(1 - 2 eta), so the Bloch vector obeys da/dt = -2 tan(t) a.
"""
import math

import numpy as np

from nonmarkov import (
    IntegrationAborted,
    bloch_to_density,
    generator_at,
    generator_from_embedding,
    integrate_nonmarkovian,
    swap_dynamics,
    swap_generator_closed_form,
)

td = swap_dynamics()

# %%
# Two independent routes to the generator agree.
t = 0.5
fd = generator_at(td, t)
emb = generator_from_embedding(td, t)
print("FD vs embedding:", np.max(np.abs(fd.k_superop.matrix - emb.k_superop.matrix)))
eta = bloch_to_density([0.2, 0, 0])
print("K(eta):\n", fd.k(eta), "\nclosed form:\n", swap_generator_closed_form(t, eta))

# %%
# At the initial time the generator vanishes: the decay starts quadratically.
print("|K(0)| =", np.max(np.abs(generator_at(td, 0.0).k_superop.matrix)))

# %%
# Integrating the equation reproduces the exact cos^2 law.
traj = integrate_nonmarkovian(td, bloch_to_density([1, 0, 0]), 0.0, 1.2, dt=1e-3)
print("max error vs cos^2:", np.max(np.abs(traj.bloch[:, 0] - np.cos(traj.times) ** 2)))
print(traj.to_csv().splitlines()[0])

# %%
# The generator blows up at pi/2, where the map is not invertible; the
# integrator stops and keeps what it computed so far.
try:
    integrate_nonmarkovian(td, bloch_to_density([1, 0, 0]), 0.0, 2.0, dt=0.01)
except IntegrationAborted as exc:
    print(f"stopped at t = {exc.trajectory.times[-1]:.3f} (pi/2 = {math.pi / 2:.3f})")
