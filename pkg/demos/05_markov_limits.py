"""
Exponential and Gaussian decay
==============================

Repeating a short interaction with fresh bath qubits gives geometric decay.
A Lindblad equation with depolarizing operators reproduces it.  Keeping the
generator's leading term near the initial time instead gives Gaussian decay.
"""
import math

import numpy as np

from nonmarkov import (
    bloch_to_density,
    channel_rates,
    collision_simulate,
    depolarizing_lindblad,
    depolarizing_map,
    integrate_lindblad,
    integrate_truncated,
    lindblad_from_map,
    reduced_aform,
    rescaled_rate,
    swap_dynamics,
)

td = swap_dynamics()
eta0 = bloch_to_density([1, 0, 0])

# %%
# Collisions of duration T each shrink the Bloch vector by cos^2(T).
T = 0.3
traj = collision_simulate(reduced_aform(td, T), 10, eta0, interval=T)
gamma = rescaled_rate(T)
print("collision a1:", traj.bloch[:, 0].round(5))
print("exp(-gamma t):", np.exp(-gamma * traj.times).round(5))

# %%
# The same decay from a Lindblad flow with rate gamma.
flow = integrate_lindblad(depolarizing_lindblad(gamma), eta0, 0.0, 10 * T, dt=1e-3)
print("Lindblad a1 at 10T:", flow.bloch[-1, 0], " collision:", traj.bloch[-1, 0])

# %%
# Extracting Lindblad operators from a short-time map recovers rate gamma/2
# per Pauli channel, with an error that shrinks linearly in t.
for t in (1e-2, 1e-3, 1e-4):
    rates = channel_rates(lindblad_from_map(depolarizing_map(math.exp(-t)), t))
    print(f"t = {t:g}  rates = {rates}")

# %%
# Gaussian versus exponential decay: slower before t = 1, faster after.
gauss = integrate_truncated(eta0, 0.0, 2.0, dt=1e-3)
expo = integrate_lindblad(depolarizing_lindblad(1.0), eta0, 0.0, 2.0, dt=1e-3)
for t in (0.5, 1.0, 1.5, 2.0):
    i = int(round(t / 1e-3))
    print(f"t = {t}: gaussian {gauss.bloch[i, 0]:.5f}  exponential {expo.bloch[i, 0]:.5f}")
