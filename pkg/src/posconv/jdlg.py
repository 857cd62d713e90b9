"""Splitting into a reversible part, where the representation extends to a
group, and a stable part, where every orbit tends to zero.

For commuting power-bounded matrices the reversible part is the joint
spectral subspace on which every generator has only unimodular eigenvalues;
the projection onto it along the rest is the product of the per-generator
spectral projections.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm, schur, solve_sylvester

from ._validation import check_vector
from .exceptions import NoQuasiInteriorFixedPoint, NotBounded, NotMonomial, PreconditionError
from .groups import extend_hom_to_group, nth_root_in_monomial_group, prime_factors
from .lattice import InducedLattice, norm
from .operators import monomial_factorize
from .semigroup import has_quasi_interior_fixed_point, is_bounded

UNIMODULAR_BAND = 1e-8


def spectral_projection(A, select):
    """Projection onto the invariant subspace of the eigenvalues picked by
    ``select`` along the complementary invariant subspace.

    Computed from an ordered complex Schur form ``A = Z T Z^H``: with
    ``T = [[T11, T12], [0, T22]]`` the projection is
    ``Z [[I, Y], [0, 0]] Z^H`` where ``T11 Y - Y T22 = T12``.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    T, Z, sdim = schur(A, output="complex", sort=select)
    if sdim == 0:
        return np.zeros((n, n), dtype=complex)
    if sdim == n:
        return np.eye(n, dtype=complex)
    T11, T12, T22 = T[:sdim, :sdim], T[:sdim, sdim:], T[sdim:, sdim:]
    Y = solve_sylvester(T11, -T22, T12)
    Pt = np.zeros((n, n), dtype=complex)
    Pt[:sdim, :sdim] = np.eye(sdim)
    Pt[:sdim, sdim:] = Y
    return Z @ Pt @ Z.conj().T


def _range_basis(M, tol=1e-9):
    u, s, _ = np.linalg.svd(M)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return u[:, :r].T.copy()


@dataclass
class JdlgSplit:
    """Result of :func:`jdlg_split`.

    Attributes
    ----------
    projection : ndarray (n, n)
        Positive projection ``P`` onto the reversible part.
    reversible_basis, stable_basis : ndarray (k, n)
        Orthonormal rows spanning ``PE`` and ``ker P``.
    residuals : dict
        Idempotence, positivity and commutation residuals of ``P``.
    """

    rep: object = field(repr=False)
    projection: np.ndarray
    reversible_basis: np.ndarray
    stable_basis: np.ndarray
    residuals: dict

    @property
    def rank(self):
        return self.reversible_basis.shape[0]

    def induced_lattice(self, tol=1e-8):
        P = np.where(np.abs(self.projection) < tol, 0.0, self.projection)
        return InducedLattice(self.rep.space, P, tol=max(tol, self.residuals["idempotence"] * 10))

    def restrictions(self):
        """Generator matrices in the coordinates of :attr:`reversible_basis`."""
        B = self.reversible_basis
        return [B @ A @ B.T for A in self.rep.generator_matrices()]

    def group_evaluator(self):
        rep = self.rep
        if rep.kind == "continuous":
            B = self.reversible_basis
            Qr = B @ rep.Q @ B.T
            return lambda t: expm(float(t) * Qr)
        return extend_hom_to_group(rep.generator_times, self.restrictions())

    def group_operator(self, t):
        """``S_t P`` as an ``n x n`` matrix, for any group element ``t``
        (negative ones included)."""
        B = self.reversible_basis
        if self.rank == 0:
            return np.zeros_like(self.projection)
        U = self.group_evaluator()(t)
        return B.T @ U @ B @ self.projection

    def stable_decay_check(self, x, tol=1e-6, horizon=200):
        return stable_decay_check(self, x, tol, horizon)


def jdlg_split(rep, tol=UNIMODULAR_BAND):
    """Reversible/stable splitting of a bounded representation.

    Raises
    ------
    NotBounded
    """
    bounded, _ = is_bounded(rep)
    if not bounded:
        raise NotBounded("the splitting needs a bounded representation")
    n = rep.n
    P = np.eye(n, dtype=complex)
    if rep.kind == "continuous":
        P = spectral_projection(rep.Q, lambda z: abs(z.real) <= tol)
    else:
        for A in rep.generator_matrices():
            P = P @ spectral_projection(A, lambda z: abs(abs(z) - 1.0) <= tol)
    P = P.real
    if np.max(np.abs(P @ P - P), initial=0.0) > 1e-12:
        P2 = P @ P
        P = 3 * P2 - 2 * P2 @ P
    P[np.abs(P) < 1e-15] = 0.0
    mats = rep.generator_matrices()
    residuals = {
        "idempotence": float(np.max(np.abs(P @ P - P), initial=0.0)),
        "positivity": float(max(0.0, -P.min(initial=0.0))),
        "commutation": float(max(np.max(np.abs(P @ A - A @ P), initial=0.0) for A in mats)),
    }
    return JdlgSplit(rep, P, _range_basis(P), _range_basis(np.eye(n) - P), residuals)


def stable_decay_check(split, x, tol=1e-6, horizon=200):
    """Whether the orbit of ``x`` in the stable part falls below ``tol * ||x||``
    within ``horizon`` chain steps (or time units).

    Raises
    ------
    PreconditionError
        If ``||Px|| > tol``.
    """
    rep = split.rep
    x = check_vector(x, rep.n)
    if norm(rep.space, split.projection @ x) > tol:
        raise PreconditionError("vector is not in the stable part")
    size = norm(rep.space, x)
    if size == 0:
        return True
    _, states = rep.trajectory(x, horizon)
    return any(norm(rep.space, y) <= tol * size for y in states)


@dataclass(frozen=True)
class TrivialityVerdict:
    """Outcome of :func:`triviality_test_atomic`.

    ``kind`` is ``"trivial"``, ``"nontrivial"`` (non-divisible index group,
    with the permutation orbits and scalings of ``generator``) or
    ``"inconsistent"`` (divisible index group, yet the action on atoms has no
    ``n``-th root).
    """

    kind: str
    generator: object = None
    orbits: tuple = ()
    scalings: tuple = ()
    root_order: int = None


def atomic_restrictions(split, tol=1e-8):
    """Generator actions on ``PE`` in the coordinates of its atoms."""
    lat = split.induced_lattice(tol)
    atoms = lat.atoms
    pinv = np.linalg.pinv(atoms.T)
    return lat, [pinv @ A @ atoms.T for A in split.rep.generator_matrices()]


def triviality_test_atomic(split, rep=None, tol=1e-8):
    """Decide whether the group action on the atoms of ``PE`` is trivial.

    Raises
    ------
    NoQuasiInteriorFixedPoint
    """
    rep = split.rep if rep is None else rep
    if has_quasi_interior_fixed_point(rep) is None:
        raise NoQuasiInteriorFixedPoint("the test needs a quasi-interior fixed point")
    _, mats = atomic_restrictions(split, tol)
    factors = []
    for A in mats:
        A = np.where(np.abs(A) <= tol * max(1.0, np.abs(A).max()), 0.0, A)
        try:
            factors.append(monomial_factorize(A))
        except NotMonomial:
            raise NotMonomial("restriction to the reversible part is not a lattice isomorphism")
    times = rep.generator_times
    if all(F.is_identity(tol=1e-7) for F in factors):
        return TrivialityVerdict("trivial")
    g, F = next((g, F) for g, F in zip(times, factors) if not F.is_identity(tol=1e-7))
    orbits = tuple(o for o in F.orbits() if len(o) > 1)
    if not rep.divisible:
        return TrivialityVerdict("nontrivial", g, orbits, F.scalings)
    # divisible group: every element has roots of all orders, but this
    # finite action does not
    if not orbits:
        return TrivialityVerdict("inconsistent", g, orbits, F.scalings, None)
    p = min(prime_factors(len(orbits[0])))
    order = p
    while nth_root_in_monomial_group(F, order) is not None:
        order *= p
    return TrivialityVerdict("inconsistent", g, orbits, F.scalings, order)


__all__ = [
    "JdlgSplit", "TrivialityVerdict", "jdlg_split", "spectral_projection",
    "stable_decay_check", "triviality_test_atomic", "atomic_restrictions",
]


def ergodic_projection(rep, tol=UNIMODULAR_BAND):
    """Projection onto the joint fixed space along the other joint spectral
    subspaces; positive for bounded positive representations."""
    n = rep.n
    if rep.kind == "continuous":
        P = spectral_projection(rep.Q, lambda z: abs(z) <= tol)
    else:
        P = np.eye(n, dtype=complex)
        for A in rep.generator_matrices():
            P = P @ spectral_projection(A, lambda z: abs(z - 1.0) <= tol)
    P = P.real
    P[np.abs(P) < 1e-15] = 0.0
    return P


__all__.append("ergodic_projection")
