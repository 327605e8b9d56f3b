"""
Inverting a shrinking map
=========================

The inverse of a contraction of the Bloch ball stretches it.  It preserves
trace and Hermiticity but fails complete positivity, and it returns a valid
state only for inputs that the forward map could have produced.
"""
import math

import numpy as np

from nonmarkov import (
    bloch_to_density,
    choi_spectrum,
    in_compatibility_domain,
    is_completely_positive,
    preimage,
    pseudo_inverse_a,
    reduced_aform,
    swap_dynamics,
)

td = swap_dynamics()
t = math.pi / 3
forward = reduced_aform(td, t)
inv = pseudo_inverse_a(forward)
print("rank:", inv.rank, " singular values:", inv.singular_values)
print("inverse spectrum:", choi_spectrum(inv.form))
print("inverse completely positive:", is_completely_positive(inv.form))

# %%
# Only states inside the image, here the ball of radius cos^2(t) = 1/4,
# have a physical preimage.
for r in (0.1, 0.25, 0.3, 0.9):
    rho = bloch_to_density([r, 0, 0])
    print(f"|a| = {r:.2f}  in domain: {in_compatibility_domain(forward, rho)}  "
          f"min eig of preimage: {np.linalg.eigvalsh(preimage(forward, rho)).min():+.3f}")

# %%
# At t = pi/2 the map collapses everything to the maximally mixed state and
# the pseudo-inverse has rank 1.
print("rank at pi/2:", pseudo_inverse_a(reduced_aform(td, math.pi / 2)).rank)
