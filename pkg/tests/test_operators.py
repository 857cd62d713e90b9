import math

import numpy as np
import pytest
from hypothesis import given

from posconv.exceptions import DimensionMismatch, NotMonomial
from posconv.lattice import LatticeSpace
from posconv.operators import (StructuredOperator, Transport, adjoint, band_decompose,
                               is_adjoint_lattice_homomorphism, is_am_compact_model,
                               monomial_factorize)

from strategies import dyadic_operator, random_operator, seeds, sizes, space_of

S2 = LatticeSpace(("a", "b"))
S3 = LatticeSpace(("a", "b", "c"))
SWAP = (1, 0)
CYCLE = (1, 2, 0)


def test_apply_examples():
    assert np.array_equal(StructuredOperator.identity(S2).apply([1, 2]), [1, 2])
    K = StructuredOperator.from_matrix(S2, [[0, 1], [1, 0]])
    assert np.array_equal(K.apply([1, 0]), [0, 1])
    # hand evaluation: 0.5 * swap(2, 0) + 0.5 * (2, 0) = (0, 1) + (1, 0)
    T = StructuredOperator(S2, [[0.5, 0], [0, 0.5]], [(0.5, SWAP)])
    assert np.allclose(T.apply([2, 0]), [1, 1])


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        StructuredOperator.identity(S2).apply([1, 2, 3])
    with pytest.raises(DimensionMismatch):
        StructuredOperator.identity(S2).compose(StructuredOperator.identity(S3))


def test_compose_shifts_on_cycle():
    shift = StructuredOperator.transport(S3, CYCLE)
    twice = shift.compose(shift)
    assert twice.is_pure_singular()
    assert twice.singular == (Transport(1.0, (2, 0, 1)),)


def test_kernel_absorbs_singular():
    K = StructuredOperator.from_matrix(S3, np.full((3, 3), 1 / 3))
    R = StructuredOperator.transport(S3, CYCLE)
    for T in (K @ R, R @ K):
        assert T.is_am_compact_model()
        assert np.allclose(T.full(), np.full((3, 3), 1 / 3))


def test_mixed_square_matches_dense_product():
    e = math.exp(-1)
    n = 4
    sp = LatticeSpace.uniform(n)
    shift = (1, 2, 3, 0)
    T = StructuredOperator(sp, (1 - e) * np.full((n, n), 1 / n), [(e, shift)])
    T2 = T @ T
    assert len(T2.singular) == 1
    assert T2.singular[0].coef == pytest.approx(e ** 2, abs=1e-15)
    assert T2.singular[0].cell_map == (2, 3, 0, 1)
    oracle = T.full() @ T.full()
    shift2 = StructuredOperator.transport(sp, (2, 3, 0, 1)).full()
    assert np.allclose(T2.kernel, oracle - e ** 2 * shift2, atol=1e-15)


def test_band_decompose_examples():
    K = StructuredOperator.from_matrix(S2, [[1, 2], [3, 4]])
    k, r = band_decompose(K)
    assert k == K and r == StructuredOperator.zero(S2)
    R = StructuredOperator.transport(S2, SWAP, 0.5)
    k, r = band_decompose(R)
    assert k == StructuredOperator.zero(S2) and r == R


def test_terms_are_merged_and_sorted():
    T = StructuredOperator(S3, None, [(1.0, (2, 0, 1)), (0.5, CYCLE), (0.5, CYCLE)])
    assert [t.cell_map for t in T.singular] == [CYCLE, (2, 0, 1)]
    assert T.singular[0].coef == 1.0


def test_adjoint_symmetric_kernel():
    A = np.array([[1.0, 2.0], [2.0, 0.5]])
    assert np.allclose(adjoint(S2, A), A)


def test_adjoint_of_permutation_transport_is_inverse_with_weight_ratio():
    w = np.array([1.0, 2.0, 4.0])
    sp = LatticeSpace(("a", "b", "c"), tuple(w))
    T = StructuredOperator.transport(sp, CYCLE)
    A = T.adjoint()
    assert A.space.p == math.inf
    (term,) = A.singular
    inv = (2, 0, 1)
    assert term.cell_map == inv
    # the adjoint moves sigma(i) back to i with amplitude w_sigma(i) / w_i
    M = A.full()
    for i, si in enumerate(CYCLE):
        assert M[i, si] == pytest.approx(w[si] / w[i])
    # pairing identity on a basis is the real oracle
    for i in range(3):
        for j in range(3):
            phi, x = np.eye(3)[i], np.eye(3)[j]
            assert sp.pairing(A.apply(phi), x) == pytest.approx(sp.pairing(phi, T.apply(x)))


def test_adjoint_of_rank_one():
    u = np.array([0.2, 0.8])
    P = StructuredOperator.from_matrix(S2, np.outer(u, np.ones(2)))
    A = P.adjoint()
    assert np.allclose(A.full(), np.outer(np.ones(2), u))


def test_adjoint_of_collapsing_transport_raises():
    with pytest.raises(NotMonomial):
        StructuredOperator.transport(S3, (0, 0, 1)).adjoint()


@given(seeds, sizes)
def test_adjoint_pairing_and_involution(seed, n):
    rng = np.random.default_rng(seed)
    sp = space_of(n, rng, p=rng.choice([1.0, 2.0, 3.0]))
    K = rng.random((n, n))
    perm = tuple(int(i) for i in rng.permutation(n))
    T = StructuredOperator(sp, K, [(0.7, perm, tuple(rng.random(n) * 0.9 + 0.1))])
    A = T.adjoint()
    phi, x = rng.standard_normal(n), rng.standard_normal(n)
    assert sp.pairing(A.apply(phi), x) == pytest.approx(sp.pairing(phi, T.apply(x)), rel=1e-10, abs=1e-12)
    back = A.adjoint(sp)
    assert back.allclose(T, atol=1e-12)
    assert 1 / sp.p + 1 / A.space.p == pytest.approx(1.0)


def test_lattice_homomorphism_examples():
    assert is_adjoint_lattice_homomorphism(np.eye(3)[[2, 0, 1]])
    A = np.array([[0.5, 0.2], [0.5, 0.8]])
    assert not is_adjoint_lattice_homomorphism(A)
    assert is_adjoint_lattice_homomorphism(np.diag([1.0, 0.0, 3.0]))


def test_monomial_factorize_examples():
    F = monomial_factorize(np.array([[0.0, 2.0], [3.0, 0.0]]))
    assert F.cell_map == (1, 0)
    assert F.scalings == (3.0, 2.0)
    A = np.array([[0.0, 2.0], [3.0, 0.0]])
    for a in range(2):
        expect = np.zeros(2)
        expect[F.cell_map[a]] = F.scalings[a]
        assert np.array_equal(A @ np.eye(2)[a], expect)
    I = monomial_factorize(np.eye(3))
    assert I.is_identity()
    with pytest.raises(NotMonomial):
        monomial_factorize(np.array([[1.0, 1.0], [0.0, 1.0]]))


@given(seeds, sizes)
def test_monomial_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    M = np.zeros((n, n))
    M[perm, np.arange(n)] = rng.random(n) + 0.1
    assert np.array_equal(monomial_factorize(M).matrix(), M)


def test_am_compact_model_flag():
    assert is_am_compact_model(StructuredOperator.from_matrix(S2, np.eye(2)))
    assert not is_am_compact_model(StructuredOperator.transport(S2, SWAP))
    assert not is_am_compact_model(StructuredOperator(S2, np.eye(2), [(0.1, SWAP)]))


def test_rejects_negative_kernel_and_coefficients():
    with pytest.raises(ValueError):
        StructuredOperator.from_matrix(S2, [[-1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        StructuredOperator(S2, None, [(0.0, SWAP)])


@given(seeds, sizes)
def test_compose_routing_exact(seed, n):
    rng = np.random.default_rng(seed)
    sp = space_of(n)
    T, U = dyadic_operator(rng, sp), dyadic_operator(rng, sp)
    C = T @ U
    RT, RU = T.singular_matrix(), U.singular_matrix()
    assert np.array_equal(C.singular_matrix(), RT @ RU)
    assert np.array_equal(C.kernel, T.kernel @ U.full() + RT @ U.kernel)
    assert band_decompose(C)[1] == StructuredOperator(sp, None, T.singular) @ StructuredOperator(sp, None, U.singular)


@given(seeds, sizes)
def test_apply_compose_associativity(seed, n):
    rng = np.random.default_rng(seed)
    sp = space_of(n, rng)
    T, U = random_operator(rng, sp), random_operator(rng, sp)
    v = rng.standard_normal(n)
    lhs = (T @ U).apply(v)
    rhs = T.apply(U.apply(v))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(rhs).max()))


@given(seeds, sizes)
def test_power_matches_repeated_compose(seed, n):
    rng = np.random.default_rng(seed)
    sp = space_of(n)
    T = dyadic_operator(rng, sp, kernel_density=0.2)
    T = T.scaled(0.5)
    P = T
    for _ in range(4):
        P = P @ T
    assert np.allclose(T.power(5).full(), P.full(), rtol=1e-12, atol=1e-12)
