"""Finite atomic Banach lattices: weighted l^p over a labelled atom set.

A :class:`LatticeSpace` models ``l^p(A)`` (all weights 1) or a cell
discretisation of ``L^p(Omega)`` (weights are cell masses). Vectors are plain
float arrays with one coordinate per atom; :class:`LatticeVector` is a thin
wrapper for callers who want the space carried along.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.optimize import nnls

from ._validation import check_square, check_vector
from .exceptions import NegativeInput, NotAProjection, NotPositive

PROJECTION_TOL = 1e-10


@dataclass(frozen=True)
class LatticeSpace:
    """Weighted ``l^p`` space over a finite set of atoms.

    Parameters
    ----------
    atoms : sequence of str
        Pairwise distinct labels, at least one.
    weights : sequence of float, optional
        Strictly positive cell masses; defaults to all ones.
    p : float
        Exponent in ``[1, inf]``; ``inf`` models an AM-space.
    """

    atoms: tuple
    weights: tuple = None
    p: float = 1.0

    def __post_init__(self):
        atoms = tuple(str(a) for a in self.atoms)
        if not atoms:
            raise ValueError("a lattice space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom labels must be pairwise distinct")
        weights = self.weights
        if weights is None:
            weights = (1.0,) * len(atoms)
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(atoms):
            raise ValueError("need one weight per atom")
        if any(not (w > 0) or not math.isfinite(w) for w in weights):
            raise ValueError("weights must be strictly positive and finite")
        p = float(self.p)
        if not p >= 1:
            raise ValueError("exponent p must lie in [1, inf]")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls, n, p=1.0, prefix="a"):
        """``l^p`` over ``n`` atoms labelled ``a0, a1, ...``."""
        return cls(tuple(f"{prefix}{i}" for i in range(n)), None, p)

    @property
    def n(self):
        return len(self.atoms)

    @cached_property
    def w(self):
        arr = np.array(self.weights, dtype=float)
        arr.setflags(write=False)
        return arr

    @property
    def order_continuous(self):
        return math.isfinite(self.p)

    @property
    def kb_space(self):
        # every finite l^p with p < inf is reflexive or AL, hence KB
        return math.isfinite(self.p)

    @property
    def dual_exponent(self):
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def dual(self):
        """The dual space under the pairing ``<phi, x> = sum w_i phi_i x_i``."""
        return LatticeSpace(self.atoms, self.weights, self.dual_exponent)

    def index(self, label):
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.n:
                raise IndexError(label)
            return int(label)
        return self.atoms.index(str(label))

    def vector(self, coords):
        return LatticeVector(self, coords)

    def pairing(self, phi, x):
        return float(np.sum(self.w * np.asarray(phi, dtype=float) * np.asarray(x, dtype=float)))


@dataclass(frozen=True, eq=False)
class LatticeVector:
    space: LatticeSpace
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = check_vector(self.coords, self.space.n, "coordinates").copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, LatticeVector):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((self.space, self.coords.tobytes()))

    def modulus(self):
        return LatticeVector(self.space, np.abs(self.coords))

    def norm(self):
        return norm(self.space, self.coords)


def modulus(v):
    """Coordinatewise absolute value, keeping the input's type."""
    if isinstance(v, LatticeVector):
        return v.modulus()
    return np.abs(check_vector(v))


def norm(space, v):
    """Weighted p-norm ``(sum w_i |v_i|^p)^(1/p)``, or the sup norm for ``p = inf``."""
    x = np.abs(check_vector(v, space.n))
    if math.isinf(space.p):
        return float(x.max())
    if space.p == 1.0:
        return float(np.sum(space.w * x))
    if space.p == 2.0:
        return float(math.sqrt(np.sum(space.w * x * x)))
    return float(np.sum(space.w * x ** space.p) ** (1.0 / space.p))


def operator_norm(space, A):
    """Operator norm of a matrix acting on ``space``.

    Exact for ``p`` in ``{1, 2, inf}``. For other exponents the Riesz-Thorin
    bound ``||A||_1^(1/p) ||A||_inf^(1-1/p)`` is returned, which is an upper
    bound.
    """
    A = np.abs(check_square(A, space.n)) if space.p != 2.0 else check_square(A, space.n)
    w = space.w
    if space.p == 1.0:
        return float(np.max((w @ A) / w))
    if math.isinf(space.p):
        return float(np.max(A.sum(axis=1)))
    if space.p == 2.0:
        s = np.sqrt(w)
        return float(np.linalg.norm(s[:, None] * A / s[None, :], 2))
    n1 = float(np.max((w @ A) / w))
    ninf = float(np.max(A.sum(axis=1)))
    return n1 ** (1.0 / space.p) * ninf ** (1.0 - 1.0 / space.p)


def is_quasi_interior(space, v):
    """A positive vector is quasi-interior iff every coordinate is positive."""
    x = check_vector(v, space.n)
    if np.any(x < 0):
        raise NegativeInput("quasi-interior test needs a positive vector")
    return bool(x.min() > 0)


def atomic_coordinates(space, v):
    """Pairs ``(label, coefficient)`` of ``v`` against the unit atoms."""
    x = check_vector(v, space.n)
    return [(label, float(c)) for label, c in zip(space.atoms, x)]


def from_atomic_coordinates(space, pairs):
    x = np.zeros(space.n)
    for label, c in pairs:
        x[space.index(label)] += c
    return x


class InducedLattice:
    """The range of a positive projection, ordered as a sublattice of ``E``
    but with modulus ``P|x|`` and norm ``||P|x|||``.

    Attributes
    ----------
    projection : ndarray (n, n)
    atoms : ndarray (k, n)
        Positive vectors, pairwise disjoint in the induced order, spanning
        the range; each is normalised to sup-norm one.
    range_basis : list of LatticeVector
    """

    def __init__(self, space, projection, tol=PROJECTION_TOL):
        P = check_square(projection, space.n, "projection")
        if P.size and P.min() < -tol:
            raise NotPositive(f"projection has a negative entry {P.min():.3g}")
        if np.max(np.abs(P @ P - P), initial=0.0) > tol:
            raise NotAProjection("projection is not idempotent within tolerance")
        self.space = space
        self.projection = P
        self.tol = tol
        self.atoms = _range_atoms(P, tol)
        self.range_basis = [LatticeVector(space, a) for a in self.atoms]

    @property
    def dim(self):
        return self.atoms.shape[0]

    def contains(self, x, tol=None):
        tol = self.tol if tol is None else tol
        x = check_vector(x, self.space.n)
        return bool(np.max(np.abs(self.projection @ x - x), initial=0.0) <= tol * max(1.0, np.abs(x).max(initial=0.0)))

    def modulus(self, x):
        return self.projection @ np.abs(check_vector(x, self.space.n))

    def norm(self, x):
        return norm(self.space, self.modulus(x))

    def inf(self, x, y):
        """Infimum in the induced order, ``(x + y - |x - y|_PE) / 2``."""
        x = check_vector(x, self.space.n)
        y = check_vector(y, self.space.n)
        return 0.5 * (x + y - self.modulus(x - y))

    def coordinates(self, x):
        """Coefficients of ``x`` against :attr:`atoms`."""
        x = check_vector(x, self.space.n)
        if self.dim == 0:
            return np.zeros(0)
        c, *_ = np.linalg.lstsq(self.atoms.T, x, rcond=None)
        return c

    def is_quasi_interior(self, x):
        c = self.coordinates(x)
        if np.any(c < -self.tol):
            raise NegativeInput("vector is not positive in the induced lattice")
        return bool(c.size > 0 and c.min() > self.tol)


def _range_atoms(P, tol):
    """Extreme rays of the cone ``PE cap E_+``.

    The nonzero columns ``P e_i`` generate that cone, which is simplicial
    because ``PE`` is a lattice; the extreme rays are the columns that are not
    nonnegative combinations of the others.
    """
    cols = []
    for i in range(P.shape[1]):
        c = np.clip(P[:, i], 0.0, None)
        m = c.max(initial=0.0)
        if m > tol:
            c = c / m
            if not any(np.max(np.abs(c - d)) <= 1e3 * tol for d in cols):
                cols.append(c)
    extreme = []
    for j, c in enumerate(cols):
        others = [d for k, d in enumerate(cols) if k != j]
        if others:
            _, resid = nnls(np.array(others).T, c)
            if resid <= 1e3 * tol * max(1.0, np.linalg.norm(c)):
                continue
        extreme.append(c)
    atoms = np.array(extreme).reshape(len(extreme), P.shape[0])
    # deterministic order: by position of the leading support entry
    order = sorted(range(len(atoms)), key=lambda k: tuple(-(atoms[k] > tol).astype(int)))
    return atoms[order]
