"""Subgroups of (Q, +): divisibility, finite quotients, homomorphism extension.

All rational arithmetic here is exact (:class:`fractions.Fraction`). The
module also builds the quotient-Koopman representation that witnesses the
failure of convergence over non-divisible index groups, and searches for
n-th roots in the group of weighted permutations.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
import math

import numpy as np

from ._validation import as_fraction
from .exceptions import (
    InconsistentHomomorphism, NonCommutingFamily, NotInvertible, NotMonomial,
    NotRepresentable, PrimeInSupport, SchemaError, UnsupportedGroup,
)
from .operators import MonomialFactorization, StructuredOperator, monomial_factorize

ALL = "ALL"


def is_prime(q):
    q = int(q)
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    return all(q % d for d in range(3, math.isqrt(q) + 1, 2))


def prime_factors(m):
    m, out, d = abs(int(m)), set(), 2
    while d * d <= m:
        while m % d == 0:
            out.add(d)
            m //= d
        d += 1
    if m > 1:
        out.add(m)
    return out


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def fraction_gcd(values):
    """Generator of the cyclic group spanned by the given rationals."""
    fr = [as_fraction(v) for v in values]
    num = 0
    for f in fr:
        num = math.gcd(num, f.numerator)
    return Fraction(num, _lcm(f.denominator for f in fr))


class RationalGroupClass:
    """Base for the supported index-group classes."""

    def contains(self, t):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class FinitelyGenerated(RationalGroupClass):
    """Subgroup of Q spanned by finitely many positive rationals (always cyclic)."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(as_fraction(g) for g in self.generators)
        if not gens:
            raise ValueError("need at least one generator")
        if any(g <= 0 for g in gens):
            raise ValueError("generators must be positive")
        object.__setattr__(self, "generators", gens)

    @property
    def cyclic_generator(self):
        return fraction_gcd(self.generators)

    def contains(self, t):
        return (as_fraction(t) / self.cyclic_generator).denominator == 1

    def to_json(self):
        return {"type": "finitely-generated", "generators": [_fstr(g) for g in self.generators]}


@dataclass(frozen=True)
class PrimeLocalized(RationalGroupClass):
    """Rationals whose denominators factor over ``primes``.

    ``primes=ALL`` is Q itself, ``frozenset()`` is Z, ``{2}`` the dyadics.
    """

    primes: object = ALL

    def __post_init__(self):
        if self.primes != ALL:
            ps = frozenset(int(p) for p in self.primes)
            bad = [p for p in ps if not is_prime(p)]
            if bad:
                raise ValueError(f"not prime: {sorted(bad)}")
            object.__setattr__(self, "primes", ps)

    @property
    def all_primes(self):
        return self.primes == ALL

    def contains(self, t):
        t = as_fraction(t)
        if self.all_primes:
            return True
        return prime_factors(t.denominator) <= self.primes

    def to_json(self):
        if self.all_primes:
            return {"type": "all-primes"}
        return {"type": "prime-localized", "primes": sorted(self.primes)}


@dataclass(frozen=True)
class Reals(RationalGroupClass):
    """(R, +), the index group of continuous-time representations.

    Divisible; quotient constructions are not supported for it.
    """

    def contains(self, t):
        return True

    def to_json(self):
        return {"type": "reals"}


RATIONALS = PrimeLocalized(ALL)
DYADICS = PrimeLocalized({2})
INTEGERS = PrimeLocalized(frozenset())


def _fstr(f):
    f = as_fraction(f)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def group_from_json(obj):
    """Parse the model-file group fragment."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise SchemaError("group must be an object with a 'type' field")
    kind = obj["type"]
    try:
        if kind == "all-primes":
            return RATIONALS
        if kind == "prime-localized":
            return PrimeLocalized(obj["primes"])
        if kind == "finitely-generated":
            return FinitelyGenerated(tuple(Fraction(str(g)) for g in obj["generators"]))
        if kind == "reals":
            return Reals()
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"invalid {kind} group: {exc}") from exc
    raise SchemaError(f"unknown group type {kind!r}")


def is_divisible(G):
    """Decide divisibility; the witness is a prime ``q`` with ``qG != G``.

    Returns
    -------
    (bool, int or None)
    """
    if isinstance(G, Reals):
        return True, None
    if isinstance(G, PrimeLocalized):
        if G.all_primes:
            return True, None
        q = next(q for q in count(2) if is_prime(q) and q not in G.primes)
        return False, q
    if isinstance(G, FinitelyGenerated):
        # a nontrivial cyclic group is never divisible: g/2 is missing
        return False, 2
    raise UnsupportedGroup(f"unsupported group class {G!r}")


@dataclass(frozen=True)
class FiniteQuotientHom:
    """Surjective homomorphism ``G -> Z/qZ``.

    For prime-localized groups ``k/m -> k * m^{-1} mod q``; for cyclic
    groups ``n * g -> n mod q`` with ``g`` the cyclic generator.
    """

    source: RationalGroupClass
    q: int

    def __call__(self, t):
        t = as_fraction(t)
        if not self.source.contains(t):
            raise ValueError(f"{t} is not in the group")
        if isinstance(self.source, FinitelyGenerated):
            n = t / self.source.cyclic_generator
            return int(n.numerator) % self.q
        return (t.numerator * pow(t.denominator, -1, self.q)) % self.q

    def sample(self, size=100, seed=0):
        """Deterministic sample of group elements, used for additivity checks."""
        rng = np.random.default_rng(seed)
        if isinstance(self.source, FinitelyGenerated):
            g = self.source.cyclic_generator
            return [g * int(k) for k in rng.integers(-50, 51, size)]
        primes = sorted(self.source.primes) or [1]
        out = []
        for _ in range(size):
            den = 1
            for p in primes:
                den *= p ** int(rng.integers(0, 4))
            out.append(Fraction(int(rng.integers(-60, 61)), den))
        return out

    def check_additive(self, pairs=100, seed=0):
        xs = self.sample(2 * pairs, seed)
        return all((self(s) + self(t)) % self.q == self(s + t)
                   for s, t in zip(xs[::2], xs[1::2]))


def quotient_hom(G, q):
    """Surjective homomorphism of ``G`` onto ``Z/qZ``.

    Raises
    ------
    PrimeInSupport
        If ``q`` may divide denominators in ``G`` (then ``qG = G``).
    """
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if isinstance(G, Reals):
        raise UnsupportedGroup("R has no nontrivial finite quotients")
    if isinstance(G, PrimeLocalized) and (G.all_primes or q in G.primes):
        raise PrimeInSupport(f"{q} divides admissible denominators, so qG = G")
    return FiniteQuotientHom(G, int(q))


def counterexample_generators(G):
    """Finitely many positive generators used for the desk-scale model of G."""
    if isinstance(G, FinitelyGenerated):
        return list(G.generators)
    if isinstance(G, PrimeLocalized) and not G.all_primes:
        return [Fraction(1)] + [Fraction(1, p) for p in sorted(G.primes)]
    raise UnsupportedGroup("counterexample needs a non-divisible group")


def koopman_counterexample(G, q):
    """Representation of ``G_{>0}`` on ``l^2(Z/qZ)`` by quotient translations.

    ``t`` acts by moving the mass of atom ``i`` to ``i + phi(t) mod q``, i.e.
    the Koopman operator of translation by ``-phi(t)``. The atoms are genuine
    point masses, so each operator is recorded in the kernel band.
    """
    from .lattice import LatticeSpace
    from .semigroup import GeneratedRepresentation

    phi = quotient_hom(G, q)
    space = LatticeSpace(tuple(f"z{i}" for i in range(q)), None, 2.0)
    gens = counterexample_generators(G)
    ops = []
    for g in gens:
        M = np.zeros((q, q))
        shift = phi(g)
        M[(np.arange(q) + shift) % q, np.arange(q)] = 1.0
        ops.append(StructuredOperator.from_matrix(space, M))
    return GeneratedRepresentation(space, gens, ops, G)


# homomorphism extension ---------------------------------------------------

def _ext_gcd_coeffs(ints):
    """Integers ``c`` with ``sum c_i a_i = gcd(a)``."""
    g, coeffs = 0, []
    for a in ints:
        if g == 0:
            g, coeffs = a, [1]
            continue
        # extended Euclid on (g, a)
        old_r, r, old_s, s, old_t, t = g, a, 1, 0, 0, 1
        while r:
            k = old_r // r
            old_r, r = r, old_r - k * r
            old_s, s = s, old_s - k * s
            old_t, t = t, old_t - k * t
        g = old_r
        coeffs = [c * old_s for c in coeffs] + [old_t]
    return g, coeffs


def _matrix(value):
    if isinstance(value, StructuredOperator):
        return value.full()
    return np.asarray(value, dtype=float)


class GroupHomomorphism:
    """Homomorphism from the group spanned by ``generators`` into GL(n).

    The span is cyclic with generator ``h``; the extension is determined by
    its value ``U`` at ``h`` and evaluates ``t = k h`` as ``U^k``.
    """

    def __init__(self, h, U, generators, values):
        self.h = h
        self.U = U
        self.generators = generators
        self.values = values

    def __call__(self, t):
        k = as_fraction(t) / self.h
        if k.denominator != 1:
            raise NotRepresentable(f"{t} is not an integer combination of the generators")
        return np.linalg.matrix_power(self.U, int(k))


def extend_hom_to_group(generators, values, tol=1e-9):
    """Extend ``g_i -> V_i`` to the group spanned by the generators.

    Raises
    ------
    NonCommutingFamily, NotInvertible
    InconsistentHomomorphism
        If the values violate a relation between the generators.
    """
    gens = [as_fraction(g) for g in generators]
    if len(gens) != len(values) or not gens:
        raise ValueError("need one value per generator")
    if any(g <= 0 for g in gens):
        raise ValueError("generators must be positive")
    mats = [_matrix(v) for v in values]
    for i, A in enumerate(mats):
        scale = max(1.0, np.abs(A).max())
        for B in mats[i + 1:]:
            if np.max(np.abs(A @ B - B @ A)) > tol * scale:
                raise NonCommutingFamily("values do not commute")
        if np.linalg.cond(A) > 1e12:
            raise NotInvertible("a generator value is singular")
    D = _lcm(g.denominator for g in gens)
    ints = [int(g * D) for g in gens]
    d, coeffs = _ext_gcd_coeffs(ints)
    n = mats[0].shape[0]
    U = np.eye(n)
    for c, A in zip(coeffs, mats):
        if c:
            U = U @ np.linalg.matrix_power(A, c)
    for a, A, g in zip(ints, mats, gens):
        R = np.linalg.matrix_power(U, a // d)
        if np.max(np.abs(R - A)) > tol * max(1.0, np.abs(A).max()):
            raise InconsistentHomomorphism(
                f"value at {_fstr(g)} is not the required power of the value at {_fstr(Fraction(d, D))}")
    return GroupHomomorphism(Fraction(d, D), U, gens, mats)


# n-th roots of weighted permutations --------------------------------------

def _as_factorization(T):
    if isinstance(T, MonomialFactorization):
        return T
    return monomial_factorize(T)


def _root_group_size(L, n):
    d = 1
    for p in prime_factors(n):
        if L % p == 0:
            e, m = 0, n
            while m % p == 0:
                m //= p
                e += 1
            d *= p ** e
    return d


def nth_root_in_monomial_group(T, n, rtol=1e-9):
    """A weighted permutation ``U`` with ``U^n = T``, or ``None``.

    A root permutation exists iff, for every length ``L``, the ``L``-cycles
    can be grouped into blocks of size ``d(L, n)`` (the product of the full
    prime powers of ``n`` at primes dividing ``L``), where cycles in one block
    also carry equal scaling products. Roots of the scaling are then found on
    each merged cycle.

    Raises
    ------
    NotMonomial
    """
    if int(n) < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    F = _as_factorization(T)
    lam = np.asarray(F.scalings, dtype=float)
    size = len(F.cell_map)
    by_len = {}
    for cyc in F.orbits():
        by_len.setdefault(len(cyc), []).append(cyc)
    tau = [None] * size
    merged = []
    for L, cycles in sorted(by_len.items()):
        d = _root_group_size(L, n)
        # classes of equal scaling product along the cycle
        classes = []
        for cyc in cycles:
            lp = float(np.sum(np.log(lam[list(cyc)])))
            for cls in classes:
                if abs(cls[0] - lp) <= rtol * max(1.0, abs(lp)):
                    cls[1].append(cyc)
                    break
            else:
                classes.append((lp, [cyc]))
        for _, members in classes:
            if len(members) % d:
                return None
            for b in range(0, len(members), d):
                block = members[b:b + d]
                m = d * L
                x = [None] * m
                for r, cyc in enumerate(block):
                    for k in range(L):
                        x[(r + k * n) % m] = cyc[k]
                for j in range(m):
                    tau[x[j]] = x[(j + 1) % m]
                merged.append(x)
    mu = np.ones(size)
    for x in merged:
        m = len(x)
        A = np.zeros((m, m))
        for j in range(m):
            for i in range(n):
                A[j, (j + i) % m] += 1.0
        # (U^n e_a) picks up mu along n consecutive positions of the cycle
        rhs = np.log(lam[x])
        nu, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.max(np.abs(A @ nu - rhs), initial=0.0) > 1e-8 * max(1.0, np.abs(rhs).max()):
            return None
        mu[x] = np.exp(nu)
    root = MonomialFactorization(tuple(int(t) for t in tau), tuple(float(u) for u in mu))
    check = np.linalg.matrix_power(root.matrix(), n)
    if not np.allclose(check, F.matrix(), rtol=1e-8, atol=1e-12):
        return None
    return root


__all__ = [
    "ALL", "RATIONALS", "DYADICS", "INTEGERS", "RationalGroupClass", "FinitelyGenerated",
    "PrimeLocalized", "Reals", "FiniteQuotientHom", "GroupHomomorphism", "is_prime",
    "is_divisible", "quotient_hom", "koopman_counterexample", "counterexample_generators",
    "extend_hom_to_group", "nth_root_in_monomial_group", "group_from_json", "fraction_gcd",
]
