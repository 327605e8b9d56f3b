import itertools

import numpy as np
import pytest

from nonmarkov.classical import (
    apply_stochastic,
    as_probability_vector,
    as_stochastic_matrix,
    is_bistochastic,
    permutation_matrix,
    pseudo_inverse_stochastic,
    random_stochastic,
)

M2 = np.array([[0.9, 0.2], [0.1, 0.8]])
HALF = np.full((2, 2), 0.5)


def test_apply_examples(rng):
    p = rng.dirichlet(np.ones(3))
    np.testing.assert_array_equal(apply_stochastic(np.eye(3), p), p)
    np.testing.assert_allclose(apply_stochastic(np.full((4, 4), 0.25), rng.dirichlet(np.ones(4))), np.full(4, 0.25))
    np.testing.assert_allclose(apply_stochastic(M2, [1, 0]), [0.9, 0.1])
    with pytest.raises(ValueError):
        apply_stochastic(M2, [0.2, 0.3, 0.5])


def test_validation():
    with pytest.raises(ValueError):
        as_stochastic_matrix(M2.T)
    with pytest.raises(ValueError):
        as_probability_vector([0.6, 0.6])
    with pytest.raises(ValueError):
        as_probability_vector([1.1, -0.1])


def test_simplex_preserved(rng):
    for _ in range(200):
        n = rng.integers(2, 6)
        out = apply_stochastic(random_stochastic(n, rng), rng.dirichlet(np.ones(n)))
        as_probability_vector(out)


def test_bistochastic_examples():
    assert is_bistochastic(permutation_matrix([2, 0, 1]))
    assert not is_bistochastic(M2)
    assert is_bistochastic(np.full((3, 3), 1 / 3))


def test_pseudo_inverse_examples(rng):
    p = rng.dirichlet(np.ones(3))
    res = pseudo_inverse_stochastic(np.eye(3), p)
    np.testing.assert_allclose(res.preimage, p, atol=1e-14)
    assert res.in_domain
    res = pseudo_inverse_stochastic(HALF, [0.5, 0.5])
    np.testing.assert_allclose(res.preimage, [0.5, 0.5], atol=1e-14)
    assert res.in_domain
    assert not pseudo_inverse_stochastic(HALF, [0.9, 0.1]).in_domain


def test_pseudo_inverse_of_contraction_is_not_stochastic():
    inv = np.linalg.inv(M2)
    assert inv.min() < 0
    # a vertex is outside the image of the simplex
    assert not pseudo_inverse_stochastic(M2, [1.0, 0.0]).in_domain
    assert pseudo_inverse_stochastic(M2, [0.9, 0.1]).in_domain


def test_permutation_pinv_is_transpose():
    for perm in itertools.permutations(range(4)):
        m = permutation_matrix(perm)
        pinv = np.linalg.pinv(m)
        np.testing.assert_array_equal(pinv, m.T)
        as_stochastic_matrix(pinv)


def test_image_round_trip(rng):
    for _ in range(200):
        n = rng.integers(2, 6)
        m = random_stochastic(n, rng)
        p = m @ rng.dirichlet(np.ones(n))
        res = pseudo_inverse_stochastic(m, p)
        assert np.max(np.abs(apply_stochastic(m, res.preimage) - p)) < 1e-10


def test_hidden_variable_chain():
    """A hidden bit decides whether the visible bit flips each step.

    The joint chain on (visible, hidden) is Markovian.  The visible marginal
    is not: two steps return every state while one step fully mixes it, so no
    stochastic matrix links the two instants.
    """
    flip = np.array([[0, 1], [1, 0]])
    joint = np.zeros((4, 4))
    joint[:2, :2] = np.eye(2)  # hidden = 0, visible stays
    joint[2:, 2:] = flip  # hidden = 1, visible flips
    as_stochastic_matrix(joint)
    hidden = np.array([0.5, 0.5])

    def marginal(steps):
        mk = np.linalg.matrix_power(joint, steps)
        cols = [mk @ np.kron(hidden, e) for e in np.eye(2)]
        return np.array([c.reshape(2, 2).sum(axis=0) for c in cols]).T

    m1, m2 = marginal(1), marginal(2)
    np.testing.assert_allclose(m1, HALF)
    np.testing.assert_allclose(m2, np.eye(2))
    # the intermediate map built from the pseudo-inverse cannot undo the mixing
    m21 = m2 @ np.linalg.pinv(m1)
    assert np.max(np.abs(m21 @ m1 - m2)) > 0.4
    assert not pseudo_inverse_stochastic(m1, [1.0, 0.0]).in_domain
