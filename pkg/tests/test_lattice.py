import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from posconv.exceptions import NegativeInput, NotAProjection, NotPositive
from posconv.lattice import (InducedLattice, LatticeSpace, LatticeVector, atomic_coordinates,
                             from_atomic_coordinates, is_quasi_interior, modulus, norm,
                             operator_norm)

from conftest import finite, vectors


def test_modulus_examples():
    assert np.array_equal(modulus([1.0, -2.0, 0.0]), [1.0, 2.0, 0.0])
    assert np.array_equal(modulus([0.0, 0.0]), [0.0, 0.0])
    assert np.array_equal(modulus([-3.5]), [3.5])


def test_modulus_keeps_vector_type():
    sp = LatticeSpace(("x", "y"))
    v = LatticeVector(sp, (1.0, -4.0))
    out = modulus(v)
    assert isinstance(out, LatticeVector)
    assert out.space is sp


def test_norm_examples():
    assert norm(LatticeSpace(("a", "b")), [1, -1]) == 2
    assert norm(LatticeSpace(("a", "b"), p=math.inf), [2, -3]) == 3
    assert norm(LatticeSpace(("a", "b"), (0.5, 0.5)), [1, 1]) == 1


def test_norm_general_exponent():
    sp = LatticeSpace(("a", "b"), (2.0, 1.0), p=3)
    assert norm(sp, [1.0, -2.0]) == pytest.approx((2 + 8) ** (1 / 3))


def test_quasi_interior_examples():
    assert is_quasi_interior(LatticeSpace.uniform(3), [1, 2, 0.1])
    assert not is_quasi_interior(LatticeSpace.uniform(2), [1, 0])
    assert not is_quasi_interior(LatticeSpace.uniform(1), [0])
    with pytest.raises(NegativeInput):
        is_quasi_interior(LatticeSpace.uniform(2), [1, -1e-300])


def test_atomic_coordinates_examples():
    sp = LatticeSpace(("alpha", "beta"))
    assert atomic_coordinates(sp, [3, -1]) == [("alpha", 3.0), ("beta", -1.0)]
    assert all(c == 0 for _, c in atomic_coordinates(sp, [0, 0]))
    assert atomic_coordinates(LatticeSpace(("a",)), [7]) == [("a", 7.0)]


@given(vectors(5))
def test_atomic_coordinates_roundtrip_exact(v):
    sp = LatticeSpace.uniform(5)
    assert np.array_equal(from_atomic_coordinates(sp, atomic_coordinates(sp, v)), v)


@given(vectors(4), vectors(4), st.floats(0, 10))
def test_modulus_properties(x, y, c):
    assert np.array_equal(modulus(modulus(x)), modulus(x))
    assert np.allclose(modulus(c * x), c * modulus(x))
    assert np.all(modulus(x + y) <= modulus(x) + modulus(y) + 1e-12)


def test_space_validation():
    with pytest.raises(ValueError):
        LatticeSpace(("a", "a"))
    with pytest.raises(ValueError):
        LatticeSpace(("a",), (0.0,))
    with pytest.raises(ValueError):
        LatticeSpace((), ())
    with pytest.raises(ValueError):
        LatticeSpace(("a",), p=0.5)


def test_dual_exponents():
    assert LatticeSpace.uniform(2, p=1).dual().p == math.inf
    assert LatticeSpace.uniform(2, p=math.inf).dual().p == 1
    assert LatticeSpace.uniform(2, p=3).dual().p == pytest.approx(1.5)
    assert not LatticeSpace.uniform(2, p=math.inf).order_continuous


def test_operator_norm_matches_brute_force(rng):
    for p in (1.0, 2.0, math.inf):
        sp = LatticeSpace(tuple("abcd"), tuple(rng.random(4) + 0.5), p)
        A = rng.random((4, 4))
        xs = rng.standard_normal((4000, 4))
        ratio = max(norm(sp, A @ x) / norm(sp, x) for x in xs)
        assert ratio <= operator_norm(sp, A) * (1 + 1e-12)
        assert ratio >= 0.8 * operator_norm(sp, A)


def test_induced_lattice_identity_is_ambient():
    sp = LatticeSpace.uniform(3)
    lat = InducedLattice(sp, np.eye(3))
    assert np.allclose(lat.atoms, np.eye(3))
    x = np.array([1.0, -2.0, 3.0])
    assert lat.norm(x) == norm(sp, x)


def test_induced_lattice_rank_one_average():
    sp = LatticeSpace.uniform(2)
    P = np.full((2, 2), 0.5)
    lat = InducedLattice(sp, P)
    assert lat.dim == 1
    assert np.allclose(lat.atoms[0], [1.0, 1.0])
    # oracle: direct matrix product
    assert lat.norm([1.0, 1.0]) == pytest.approx(norm(sp, P @ np.abs([1.0, 1.0])))
    assert lat.norm([1.0, 1.0]) == pytest.approx(2.0)


def test_induced_lattice_rejects_bad_projections():
    sp = LatticeSpace.uniform(2)
    with pytest.raises(NotPositive):
        InducedLattice(sp, np.array([[1.0, -0.5], [0.0, 0.0]]))
    with pytest.raises(NotAProjection):
        InducedLattice(sp, np.array([[0.5, 0.0], [0.0, 1.0]]))


def _block_projection(rng, sizes):
    """Positive projection that averages within blocks against random
    positive densities."""
    n = sum(sizes)
    P = np.zeros((n, n))
    start = 0
    for k in sizes:
        u = rng.random(k) + 0.1
        v = rng.random(k) + 0.1
        u /= v @ u
        P[start:start + k, start:start + k] = np.outer(u, v)
        start += k
    return P


def test_induced_norm_dominates_and_is_bounded(rng):
    for _ in range(25):
        sizes = list(rng.integers(1, 4, size=rng.integers(1, 4)))
        P = _block_projection(rng, sizes)
        n = P.shape[0]
        sp = LatticeSpace(tuple(f"a{i}" for i in range(n)), tuple(rng.random(n) + 0.2))
        lat = InducedLattice(sp, P)
        assert lat.dim == len(sizes)
        for _ in range(10):
            x = P @ rng.standard_normal(n)
            assert np.all(lat.modulus(x) >= np.abs(x) - 1e-10)
            assert lat.norm(x) >= norm(sp, x) - 1e-10
            assert lat.norm(x) <= operator_norm(sp, P) * norm(sp, x) + 1e-10


def test_projection_of_quasi_interior_is_quasi_interior(rng):
    for _ in range(20):
        P = _block_projection(rng, [2, 3])
        sp = LatticeSpace.uniform(5)
        lat = InducedLattice(sp, P)
        y = rng.random(5) + 0.01
        assert lat.is_quasi_interior(P @ y)
