"""
Reduced dynamics of a qubit coupled to a qubit bath
====================================================

Two qubits interact through H = 1/2 (XX + YY + ZZ), which is half the swap
operator up to a constant.  Starting from a product state with a maximally
mixed bath, the system's Bloch vector shrinks uniformly by cos^2(t).
"""
import math

import numpy as np

from nonmarkov import (
    a_to_b,
    bloch_to_density,
    choi_spectrum,
    density_to_bloch,
    is_completely_positive,
    reduced_aform,
    reduced_dynamical_map,
    spectral_decompose,
    swap_dynamics,
)

td = swap_dynamics()

# %%
# The map at t = pi/3 as a 4x4 supermatrix, in both index orderings.
t = math.pi / 3
a = reduced_aform(td, t)
b = a_to_b(a)
np.set_printoptions(precision=4, suppress=True)
print("A-form at pi/3:\n", a.matrix.real)
print("B-form at pi/3:\n", b.matrix.real)

# %%
# Acting on a state: the Bloch vector is multiplied by cos^2(t) = 1/4.
eta = bloch_to_density([0.8, -0.2, 0.4])
print("a(0) =", density_to_bloch(eta))
print("a(t) =", density_to_bloch(b(eta)))

# %%
# The B-form is Hermitian; its eigen-decomposition gives a Kraus-like sum.
spec = spectral_decompose(b)
print("eigenvalues:", spec.lambdas)
print("sum lambda C^dag C =\n", spec.trace_identity())
print("completely positive:", is_completely_positive(b))

# %%
# The eigenvalues follow 1/2 (1 + 3c^2) and 1/2 (1 - c^2) at every time.
for t in np.linspace(0, math.pi, 7):
    c2 = math.cos(t) ** 2
    print(f"t = {t:.3f}  spectrum = {choi_spectrum(reduced_dynamical_map(td, t))}  "
          f"expected = {0.5 * (1 + 3 * c2):.4f}, {0.5 * (1 - c2):.4f}")
