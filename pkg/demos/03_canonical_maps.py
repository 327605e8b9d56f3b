"""
Canonical maps between two times
================================

Composing the forward map to t2 with the inverse of the forward map to t1
gives a map between any two regular times.  These maps compose exactly,
without any Markov assumption, but they need not be completely positive.
"""
import math

import numpy as np

from nonmarkov import (
    SingularTimeError,
    bloch_to_density,
    canonical_embedding,
    canonical_map,
    choi_spectrum,
    compose_canonical,
    embedding_relocation_check,
    evolve_total,
    partial_trace_env,
    swap_dynamics,
)

td = swap_dynamics()

# %%
# From pi/3 to pi/4 the Bloch vector grows by a factor of 2.
m = canonical_map(td, math.pi / 3, math.pi / 4)
print("spectrum:", choi_spectrum(m.b))

# %%
# Exact composition through an arbitrary intermediate time.
t1, s, t2 = 0.2, 1.1, -0.6
direct = canonical_map(td, t1, t2)
via = compose_canonical(canonical_map(td, s, t2), canonical_map(td, t1, s))
print("composition residual:", np.max(np.abs(direct.a.matrix - via.a.matrix)))

# %%
# Times where cos(t) = 0 erase all information and are refused.
try:
    canonical_map(td, math.pi / 2, 0.3)
except SingularTimeError as exc:
    print("refused:", exc)

# %%
# The canonical embedding builds the correlated system+bath state that is
# consistent with a given reduced state at time t.
t = 0.7
eta = bloch_to_density(np.array([0.3, 0.1, -0.2]) * math.cos(t) ** 2)
emb = canonical_embedding(td, t, eta)
print("trace over bath recovers eta:", np.allclose(partial_trace_env(emb.state, 2, 2), eta))
print("smallest eigenvalue of embedding:", emb.min_eig)
later = evolve_total(td, emb.state, t, 1.0)
print("reduced state at t=1:\n", partial_trace_env(later, 2, 2))
print("relocation residual:", embedding_relocation_check(td, t, 0.2, eta))

# %%
# Outside the compatibility domain the embedding is no longer positive.
print("min eig for |a| = 0.9 at pi/4:",
      canonical_embedding(td, math.pi / 4, bloch_to_density([0.9, 0, 0])).min_eig)
