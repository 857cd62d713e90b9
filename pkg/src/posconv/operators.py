"""Positive operators with explicit band bookkeeping.

Every :class:`StructuredOperator` is ``K + R``: a nonnegative dense matrix
``K`` standing for the band generated by finite-rank (kernel) operators, and a
finite sum ``R`` of weighted transports. A transport with cell map ``sigma``
moves the mass of atom ``a`` to atom ``sigma(a)``: its matrix has entry
``(sigma(a), a)`` equal to the amplitude of ``a``. For a permutation this is
the Koopman operator of ``sigma^{-1}``; transports of non-injective maps
model deterministic, non-invertible motion.

Which band a matrix belongs to is modelling data supplied at construction:
in finite dimensions every operator is a kernel operator, so the split
records what the cells stand for (genuine atoms versus cells of a
continuum).
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_cell_map, check_nonnegative, check_square, check_vector
from .exceptions import DimensionMismatch, NotMonomial
from .lattice import LatticeSpace


@dataclass(frozen=True)
class Transport:
    """Weighted transport term ``coef * M_sigma * diag(scale)``.

    ``scale`` is ``None`` for a uniform term; otherwise it holds one
    nonnegative factor per source atom with maximum 1.
    """

    coef: float
    cell_map: tuple
    scale: tuple = None

    def amplitudes(self):
        n = len(self.cell_map)
        if self.scale is None:
            return np.full(n, self.coef)
        return self.coef * np.asarray(self.scale, dtype=float)

    def matrix(self):
        n = len(self.cell_map)
        M = np.zeros((n, n))
        M[list(self.cell_map), np.arange(n)] = self.amplitudes()
        return M

    def apply(self, v):
        out = np.zeros_like(v, dtype=float)
        np.add.at(out, list(self.cell_map), self.amplitudes() * v)
        return out

    @property
    def is_bijective(self):
        return len(set(self.cell_map)) == len(self.cell_map)


def _term_from_amplitudes(cell_map, amps):
    amps = np.asarray(amps, dtype=float)
    top = float(amps.max(initial=0.0))
    if top <= 0.0:
        return None
    if np.all(amps == amps[0]):
        return Transport(top, tuple(cell_map), None)
    return Transport(top, tuple(cell_map), tuple(float(a) for a in amps / top))


def _canonical_terms(terms, n):
    merged = {}
    for term in terms:
        amps = term.amplitudes()
        if term.cell_map in merged:
            merged[term.cell_map] = merged[term.cell_map] + amps
        else:
            merged[term.cell_map] = amps
    out = []
    for cell_map in sorted(merged):
        t = _term_from_amplitudes(cell_map, merged[cell_map])
        if t is not None:
            out.append(t)
    return tuple(out)


class StructuredOperator:
    """Positive operator ``kernel + sum of transports`` on a lattice space.

    Parameters
    ----------
    space : LatticeSpace
    kernel : array_like (n, n), optional
        Entrywise nonnegative kernel-band part; zero if omitted.
    singular : iterable of Transport or (coef, cell_map[, scale]) tuples
    tol : float
        Entries of ``kernel`` in ``[-tol, 0)`` are rounded to zero.
    """

    def __init__(self, space, kernel=None, singular=(), tol=0.0):
        n = space.n
        if kernel is None:
            K = np.zeros((n, n))
        else:
            K = check_square(kernel, n, "kernel part").copy()
            check_nonnegative(K, tol, "kernel part")
            K[K < 0] = 0.0
        K.setflags(write=False)
        terms = []
        for term in singular:
            if not isinstance(term, Transport):
                coef, cell_map, *rest = term
                scale = rest[0] if rest else None
                term = Transport(float(coef), check_cell_map(cell_map, n),
                                 None if scale is None else tuple(float(s) for s in scale))
            else:
                check_cell_map(term.cell_map, n)
            if not term.coef > 0:
                raise ValueError("transport coefficients must be strictly positive")
            if term.scale is not None and min(term.scale) < 0:
                raise ValueError("transport scales must be nonnegative")
            terms.append(term)
        self.space = space
        self.kernel = K
        self.singular = _canonical_terms(terms, n)

    # constructors -------------------------------------------------------

    @classmethod
    def from_matrix(cls, space, matrix, tol=0.0):
        """Pure kernel-band operator."""
        return cls(space, matrix, (), tol=tol)

    @classmethod
    def transport(cls, space, cell_map, coef=1.0, scale=None):
        """Pure singular operator ``coef * M_sigma``."""
        return cls(space, None, [(coef, cell_map, scale)])

    @classmethod
    def identity(cls, space, band="singular"):
        if band == "kernel":
            return cls.from_matrix(space, np.eye(space.n))
        return cls.transport(space, range(space.n))

    @classmethod
    def zero(cls, space):
        return cls(space)

    # basic structure ----------------------------------------------------

    @property
    def n(self):
        return self.space.n

    def singular_matrix(self):
        R = np.zeros((self.n, self.n))
        for term in self.singular:
            R += term.matrix()
        return R

    def full(self):
        """Dense matrix of the whole operator."""
        return self.kernel + self.singular_matrix()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.full(), dtype=dtype)

    def __repr__(self):
        return (f"StructuredOperator(n={self.n}, kernel_mass={self.kernel.sum():.4g}, "
                f"singular_terms={len(self.singular)})")

    def __eq__(self, other):
        if not isinstance(other, StructuredOperator):
            return NotImplemented
        return (self.space == other.space and np.array_equal(self.kernel, other.kernel)
                and self.singular == other.singular)

    __hash__ = None

    def allclose(self, other, atol=1e-12):
        return bool(np.allclose(self.full(), np.asarray(other, dtype=float), rtol=0, atol=atol))

    def is_am_compact_model(self):
        """True iff the singular part is empty."""
        return not self.singular

    def is_pure_singular(self):
        return not np.any(self.kernel)

    def singular_mass(self):
        return sum(float(t.amplitudes().max()) for t in self.singular)

    # algebra ------------------------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, StructuredOperator):
            raise TypeError("expected a StructuredOperator")
        if other.space.n != self.space.n:
            raise DimensionMismatch(f"operators act on spaces of size {self.n} and {other.n}")

    def apply(self, v):
        x = check_vector(v, self.n)
        out = self.kernel @ x
        for term in self.singular:
            out = out + term.apply(x)
        return out

    def __call__(self, v):
        return self.apply(v)

    def compose(self, other):
        """``self o other``. Anything composed with a kernel part lands in
        the kernel band; transports compose to transports."""
        self._check_compatible(other)
        R_self = self.singular_matrix()
        kernel = self.kernel @ other.full() + R_self @ other.kernel
        terms = []
        for a in self.singular:
            sa = np.ones(self.n) if a.scale is None else np.asarray(a.scale)
            for b in other.singular:
                tau = np.asarray(b.cell_map)
                sb = np.ones(self.n) if b.scale is None else np.asarray(b.scale)
                cell_map = tuple(int(a.cell_map[j]) for j in tau)
                amps = a.coef * b.coef * sa[tau] * sb
                t = _term_from_amplitudes(cell_map, amps)
                if t is not None:
                    terms.append(t)
        return StructuredOperator(self.space, kernel, terms)

    def __matmul__(self, other):
        return self.compose(other)

    def __add__(self, other):
        self._check_compatible(other)
        return StructuredOperator(self.space, self.kernel + other.kernel,
                                  self.singular + other.singular)

    def scaled(self, c):
        if c < 0:
            raise ValueError("scaling factor must be nonnegative")
        if c == 0:
            return StructuredOperator.zero(self.space)
        return StructuredOperator(self.space, c * self.kernel,
                                  [Transport(c * t.coef, t.cell_map, t.scale) for t in self.singular])

    def power(self, k):
        """``self^k`` for ``k >= 1`` by repeated squaring."""
        if k < 1:
            raise ValueError("power needs k >= 1")
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result.compose(base)
            k >>= 1
            if k:
                base = base.compose(base)
        return result

    def band_decompose(self):
        """Return ``(K, R)`` with ``K`` pure kernel, ``R`` pure singular."""
        return (StructuredOperator(self.space, self.kernel),
                StructuredOperator(self.space, None, self.singular))

    def adjoint(self, space=None):
        """Adjoint under ``<phi, x> = sum w_i phi_i x_i``, on the dual space.

        Transports must be bijective: the adjoint of a non-injective
        transport is a composition operator, which has no transport form.
        """
        w = self.space.w
        dual = self.space.dual() if space is None else space
        kernel = (self.kernel.T * w[None, :]) / w[:, None]
        terms = []
        for t in self.singular:
            if not t.is_bijective:
                raise NotMonomial("adjoint of a non-injective transport is not a transport")
            A = (t.matrix().T * w[None, :]) / w[:, None]
            inv = np.empty(self.n, dtype=int)
            inv[list(t.cell_map)] = np.arange(self.n)
            amps = A[inv, np.arange(self.n)]
            term = _term_from_amplitudes(tuple(int(i) for i in inv), amps)
            if term is not None:
                terms.append(term)
        return StructuredOperator(dual, kernel, terms)


def adjoint(space, T):
    """Weighted adjoint of ``T`` (see :meth:`StructuredOperator.adjoint`)."""
    if isinstance(T, StructuredOperator):
        return T.adjoint()
    A = check_square(T, space.n)
    w = space.w
    return (A.T * w[None, :]) / w[:, None]


def band_decompose(T):
    return T.band_decompose()


def compose(T, U):
    return T.compose(U)


def apply(T, v):
    return T.apply(v)


def is_am_compact_model(T):
    return T.is_am_compact_model()


def _dense(T):
    if isinstance(T, StructuredOperator):
        return T.full()
    return check_square(T)


def _nonzero(A, rtol=1e-12):
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    return np.abs(A) > rtol * scale


def is_adjoint_lattice_homomorphism(T):
    """True iff every column of ``T`` has at most one nonzero entry."""
    nz = _nonzero(_dense(T))
    return bool(np.all(nz.sum(axis=0) <= 1))


@dataclass(frozen=True)
class MonomialFactorization:
    """``T e_a = scalings[a] * e_{cell_map[a]}``."""

    cell_map: tuple
    scalings: tuple

    def matrix(self):
        n = len(self.cell_map)
        M = np.zeros((n, n))
        M[list(self.cell_map), np.arange(n)] = self.scalings
        return M

    def is_identity(self, tol=0.0):
        return (all(s == i for i, s in enumerate(self.cell_map))
                and all(abs(l - 1.0) <= tol for l in self.scalings))

    def orbits(self):
        """Cycles of the permutation, each as a tuple starting at its least atom."""
        seen, cycles = set(), []
        for start in range(len(self.cell_map)):
            if start in seen:
                continue
            cyc, a = [], start
            while a not in seen:
                seen.add(a)
                cyc.append(a)
                a = self.cell_map[a]
            cycles.append(tuple(cyc))
        return cycles


def monomial_factorize(T):
    """Factor a lattice isomorphism as a permutation times positive scalings.

    Raises
    ------
    NotMonomial
        Unless every row and every column has exactly one nonzero entry,
        and that entry is positive.
    """
    A = _dense(T)
    nz = _nonzero(A)
    if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
        raise NotMonomial("operator is not a weighted permutation")
    rows = np.argmax(nz, axis=0)
    scal = A[rows, np.arange(A.shape[1])]
    if np.any(scal <= 0):
        raise NotMonomial("monomial entries must be positive")
    return MonomialFactorization(tuple(int(r) for r in rows), tuple(float(s) for s in scal))


def transport_matrix(cell_map, amplitudes=None):
    n = len(cell_map)
    amps = np.ones(n) if amplitudes is None else np.asarray(amplitudes, dtype=float)
    M = np.zeros((n, n))
    M[list(cell_map), np.arange(n)] = amps
    return M


def as_operator(space, T):
    """Wrap a dense matrix as a pure kernel operator; pass operators through."""
    if isinstance(T, StructuredOperator):
        return T
    return StructuredOperator.from_matrix(space, T)


__all__ = [
    "LatticeSpace", "Transport", "StructuredOperator", "MonomialFactorization",
    "adjoint", "apply", "band_decompose", "compose", "is_adjoint_lattice_homomorphism",
    "is_am_compact_model", "monomial_factorize", "transport_matrix", "as_operator",
]
