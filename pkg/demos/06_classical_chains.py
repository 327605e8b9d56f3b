"""
Classical stochastic matrices
=============================

Column-stochastic matrices move probability vectors around the simplex.
Their pseudo-inverses share the quantum story: they undo the map only on
its image.  A hidden variable makes a Markov chain look non-Markovian.
"""
import numpy as np

from nonmarkov import (
    apply_stochastic,
    is_bistochastic,
    permutation_matrix,
    pseudo_inverse_stochastic,
)

m = np.array([[0.9, 0.2], [0.1, 0.8]])
print("M (1,0) =", apply_stochastic(m, [1, 0]))
print("bistochastic:", is_bistochastic(m), is_bistochastic(permutation_matrix([1, 2, 0])))
print("inverse of M:\n", np.linalg.inv(m))
for p in ([0.9, 0.1], [1.0, 0.0]):
    res = pseudo_inverse_stochastic(m, p)
    print(f"p = {p}: preimage {res.preimage.round(4)}, in image: {res.in_domain}")

# %%
# Visible bit x, hidden bit h.  If h = 1 the visible bit flips every step.
flip = np.array([[0, 1], [1, 0]])
joint = np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), flip]])
hidden = np.array([0.5, 0.5])


def visible_map(steps):
    mk = np.linalg.matrix_power(joint, steps)
    cols = [(mk @ np.kron(hidden, e)).reshape(2, 2).sum(axis=0) for e in np.eye(2)]
    return np.array(cols).T


print("one step:\n", visible_map(1))
print("two steps:\n", visible_map(2))
