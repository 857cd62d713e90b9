"""Commuting positive representations indexed by rational semigroups or time.

Two kinds are supported:

* :class:`GeneratedRepresentation` -- finitely many commuting operators
  ``T_{g_1}, ..., T_{g_k}`` for positive rational generators ``g_i``; ``T_t``
  for ``t = sum n_i g_i`` is the corresponding product.
* :class:`ContinuousTimeRepresentation` -- ``T_t = exp(tQ)`` for a generator
  ``Q = a (M_sigma - I) + B - diag(exit rates)`` assembled from a
  deterministic flow, a jump rate matrix and optional killing.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog
from scipy.sparse.csgraph import connected_components

from ._validation import as_fraction, check_cell_map, check_square, check_vector
from .exceptions import (
    DimensionMismatch, NonCommutingFamily, NonPositiveTime, NotPositive,
    NotRepresentable, Unbounded,
)
from .groups import FinitelyGenerated, Reals, RationalGroupClass, is_divisible
from .lattice import norm, operator_norm
from .operators import StructuredOperator, Transport, as_operator

# largest scaled integer target accepted by the reachability search
MAX_REACH_UNITS = 1 << 16


@dataclass(frozen=True)
class IndexClass:
    """The index group together with its cached divisibility decision."""

    group: RationalGroupClass
    positive_part_only: bool = True

    @property
    def divisible(self):
        return is_divisible(self.group)[0]

    @property
    def witness(self):
        return is_divisible(self.group)[1]


@dataclass(frozen=True)
class LimitResult:
    limit: np.ndarray
    t: object


class _Representation:
    """Shared machinery; subclasses define ``kind``, ``evaluate`` and the
    sampled generator family."""

    kind = None

    def generator_operators(self):
        raise NotImplementedError

    def generator_matrices(self):
        return [T.full() for T in self.generator_operators()]

    @property
    def n(self):
        return self.space.n

    @property
    def divisible(self):
        return self.index.divisible

    def fixed_space(self, tol=1e-8):
        return fixed_space(self, tol)

    def is_bounded(self, **kw):
        return is_bounded(self, **kw)

    def is_irreducible(self):
        return is_irreducible(self)


class GeneratedRepresentation(_Representation):
    """Representation generated by commuting positive operators.

    Parameters
    ----------
    space : LatticeSpace
    generators : sequence of rationals
        Positive generators, as Fractions, ints or ``"k/m"`` strings.
    operators : sequence of StructuredOperator or array_like
        ``T_{g_i}``; bare matrices are taken as pure kernel operators.
    index_class : RationalGroupClass, optional
        Declared group ``<S>``; defaults to the group spanned by the
        generators.
    """

    kind = "generated"

    def __init__(self, space, generators, operators, index_class=None, tol=1e-9):
        gens = [as_fraction(g) for g in generators]
        if not gens or len(gens) != len(operators):
            raise ValueError("need one operator per generator")
        if any(g <= 0 for g in gens):
            raise ValueError("generators must be positive rationals")
        ops = [as_operator(space, T) for T in operators]
        for T in ops:
            if T.n != space.n:
                raise DimensionMismatch("operator size does not match the space")
        mats = [T.full() for T in ops]
        for i, A in enumerate(mats):
            for B in mats[i + 1:]:
                if np.max(np.abs(A @ B - B @ A)) > tol * max(1.0, np.abs(A).max(), np.abs(B).max()):
                    raise NonCommutingFamily("generator operators do not commute")
        self.space = space
        self.generators = gens
        self.operators = ops
        self.group = index_class if index_class is not None else FinitelyGenerated(tuple(gens))
        self.index = IndexClass(self.group)
        self._scale = math.lcm(*(g.denominator for g in gens))
        self._units = [int(g * self._scale) for g in gens]

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return f"GeneratedRepresentation(n={self.n}, generators=[{gens}])"

    def generator_operators(self):
        return list(self.operators)

    @property
    def generator_times(self):
        return list(self.generators)

    def decompose(self, t):
        """Nonnegative counts ``n_i`` with ``sum n_i g_i = t``, using as few
        factors as possible.

        Raises
        ------
        NonPositiveTime, NotRepresentable
        """
        t = as_fraction(t)
        if t <= 0:
            raise NonPositiveTime("representations are indexed by positive elements")
        target = t * self._scale
        if target.denominator != 1:
            raise NotRepresentable(f"{t} is not a combination of the generators")
        target = int(target)
        if target > MAX_REACH_UNITS:
            # fall back to a direct multiple when one generator divides t
            for i, u in enumerate(self._units):
                if target % u == 0:
                    counts = [0] * len(self._units)
                    counts[i] = target // u
                    return counts
            raise NotRepresentable(f"{t} exceeds the reachability search range")
        inf = target + 1
        best = [0] + [inf] * target
        choice = [-1] * (target + 1)
        for v in range(1, target + 1):
            for i, u in enumerate(self._units):
                if u <= v and best[v - u] + 1 < best[v]:
                    best[v] = best[v - u] + 1
                    choice[v] = i
        if best[target] >= inf:
            raise NotRepresentable(f"{t} is not a nonnegative combination of the generators")
        counts = [0] * len(self._units)
        v = target
        while v:
            i = choice[v]
            counts[i] += 1
            v -= self._units[i]
        return counts

    def evaluate(self, t):
        counts = self.decompose(t)
        result = None
        for T, k in zip(self.operators, counts):
            if k:
                P = T.power(k)
                result = P if result is None else result.compose(P)
        return result

    def chain(self, steps):
        """Cofinal chain ``(times, step indices)`` of length ``steps``.

        When every generator is an integer multiple of the smallest one the
        chain is ``k * g_min``; otherwise generators are added round-robin.
        """
        gmin = min(self.generators)
        if all((g / gmin).denominator == 1 for g in self.generators):
            idx = [self.generators.index(gmin)] * steps
            name = "multiples"
        else:
            idx = [k % len(self.generators) for k in range(steps)]
            name = "round-robin"
        times, t = [], Fraction(0)
        for i in idx:
            t += self.generators[i]
            times.append(t)
        return name, times, idx

    def trajectory(self, x, steps):
        """States ``T_{t_k} x`` along :meth:`chain`."""
        x = check_vector(x, self.n)
        _, times, idx = self.chain(steps)
        mats = self.generator_matrices()
        out = np.empty((steps, self.n))
        y = x
        for k, i in enumerate(idx):
            y = mats[i] @ y
            out[k] = y
        return times, out


class ContinuousTimeRepresentation(_Representation):
    """``T_t = exp(tQ)`` with ``Q`` assembled from flow, jumps and killing.

    Parameters
    ----------
    space : LatticeSpace
    jump : array_like (n, n)
        Nonnegative rates; entry ``(j, i)`` is the rate at which mass jumps
        from ``i`` to ``j``. Diagonal entries are jumps that land where they
        started: they cancel in ``Q`` but still end the jump-free part.
    flow : (float, sequence of int), optional
        Rate ``a >= 0`` and cell map ``sigma`` of the deterministic motion.
    killing : array_like (n,), optional
        Extra exit rate per atom; negative entries model creation.

    Notes
    -----
    Rates act on masses; coordinates are densities, so
    ``Q = W^-1 Q_mass W`` with ``W = diag(weights)``. With zero killing the
    weighted total ``w . x`` is conserved.

    Without a flow the atoms are genuine point masses and every ``T_t`` is
    recorded in the kernel band. With a flow, the part of ``T_t`` carried
    by paths that never jump (the first Dyson-Phillips term) is recorded as
    a sum of transports along ``sigma``; the remainder is the kernel part.
    """

    kind = "continuous"

    def __init__(self, space, jump, flow=None, killing=None):
        n = space.n
        B = check_square(jump, n, "jump rates").copy()
        if B.size and B.min() < 0:
            raise NotPositive("jump rates must be nonnegative")
        if flow is not None:
            rate, cell_map = flow
            rate = float(rate)
            if not rate >= 0:
                raise ValueError("flow rate must be nonnegative")
            flow = (rate, check_cell_map(cell_map, n))
            if rate == 0:
                flow = None
        kill = np.zeros(n) if killing is None else check_vector(killing, n, "killing")
        exit_rates = B.sum(axis=0) + kill
        Q = B - np.diag(exit_rates)
        if flow is not None:
            a, sigma = flow
            M = np.zeros((n, n))
            M[list(sigma), np.arange(n)] = 1.0
            Q = Q + a * (M - np.eye(n))
        w = space.w
        Q = Q * w[None, :] / w[:, None]
        self.space = space
        self.jump = B
        self.flow = flow
        self.killing = kill
        self.exit_rates = exit_rates
        self.Q = Q
        self.group = Reals()
        self.index = IndexClass(self.group)
        for arr in (self.jump, self.killing, self.exit_rates, self.Q):
            arr.setflags(write=False)

    @classmethod
    def from_generator(cls, space, Q):
        """Pure-jump representation from a density-picture generator with
        ``Q_ji >= 0`` off the diagonal."""
        Q = check_square(Q, space.n, "generator")
        w = space.w
        Q = Q * w[:, None] / w[None, :]
        B = Q.copy()
        np.fill_diagonal(B, 0.0)
        if B.min() < 0:
            raise NotPositive("generator must have nonnegative off-diagonal entries")
        killing = -Q.sum(axis=0)
        killing[np.abs(killing) < 1e-15] = 0.0
        return cls(space, B, None, killing)

    def __repr__(self):
        return f"ContinuousTimeRepresentation(n={self.n}, flow={self.flow is not None})"

    @property
    def conservative(self):
        return not np.any(self.killing)

    @property
    def generator_times(self):
        return [Fraction(1)]

    def generator_operators(self):
        # T_1 stands in for the whole family in spectral and structural tests
        return [self.evaluate(1)]

    def flow_part(self, t):
        """First Dyson-Phillips term: transports along the flow that make no
        jump up to time ``t``, as Transport terms."""
        if self.flow is None:
            return ()
        n = self.n
        a, sigma = self.flow
        M = np.zeros((n, n))
        M[list(sigma), np.arange(n)] = 1.0
        A = a * (M - np.eye(n)) - np.diag(self.exit_rates)
        w = self.space.w
        F = expm(t * A) * w[None, :] / w[:, None]
        terms = []
        # column i is supported on the forward orbit of i; attribute each
        # entry to the first power of sigma that reaches it
        pos = np.arange(n)
        seen = np.zeros((n, n), dtype=bool)
        powmap = tuple(range(n))
        for _ in range(n):
            amps = F[pos, np.arange(n)].copy()
            amps[seen[pos, np.arange(n)]] = 0.0
            seen[pos, np.arange(n)] = True
            amps[amps < 0] = 0.0
            if np.any(amps > 0):
                terms.append(_amp_term(powmap, amps))
            pos = np.asarray(sigma)[pos]
            powmap = tuple(int(p) for p in pos)
        return tuple(t for t in terms if t is not None)

    def evaluate(self, t):
        if isinstance(t, (str, Fraction)):
            t = float(as_fraction(t))
        t = float(t)
        if not t > 0:
            raise NonPositiveTime("continuous-time representations need t > 0")
        E = expm(t * self.Q)
        if self.flow is None:
            return StructuredOperator(self.space, np.clip(E, 0.0, None), (), tol=0.0)
        terms = self.flow_part(t)
        R = np.zeros_like(E)
        for term in terms:
            R += term.matrix()
        K = E - R
        scale = max(1.0, float(np.abs(E).max()))
        if K.min() < -1e-12 * scale:
            raise NotPositive(f"kernel part has a negative entry {K.min():.3g}")
        return StructuredOperator(self.space, np.clip(K, 0.0, None), terms)

    def survival(self, t):
        """Mass kept by the singular part, ``max_i sum_j R_t[j, i]``."""
        if self.flow is None:
            return 0.0
        return float(max(StructuredOperator(self.space, None, self.flow_part(t))
                         .singular_matrix().sum(axis=0)))

    def chain(self, steps, dt=1.0):
        times = [dt * (k + 1) for k in range(steps)]
        return "uniform", times, [0] * steps

    def trajectory(self, x, horizon, dt=1.0):
        x = check_vector(x, self.n)
        steps = int(math.floor(horizon / dt + 1e-12))
        E = expm(dt * self.Q)
        out = np.empty((steps, self.n))
        y = x
        for k in range(steps):
            y = E @ y
            out[k] = y
        return [dt * (k + 1) for k in range(steps)], out


def _amp_term(cell_map, amps):
    top = float(amps.max())
    if top <= 0:
        return None
    if amps.min() >= top * (1 - 1e-12):
        return Transport(top, tuple(cell_map), None)
    return Transport(top, tuple(cell_map), tuple(float(a) for a in amps / top))


# queries -------------------------------------------------------------------

def _stacked_defects(rep):
    if rep.kind == "continuous":
        return rep.Q
    n = rep.n
    return np.vstack([A - np.eye(n) for A in rep.generator_matrices()])


def fixed_space(rep, tol=1e-8):
    """Orthonormal basis (rows) of the joint fixed space."""
    M = _stacked_defects(rep)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    _, sv, vh = np.linalg.svd(M)
    rank = int(np.sum(sv > tol * scale))
    B = vh[rank:].copy()
    # sign convention: make the largest-magnitude entry positive
    for k in range(B.shape[0]):
        j = np.argmax(np.abs(B[k]))
        if B[k, j] < 0:
            B[k] = -B[k]
    return B


def _semisimple_at(A, lam, tol):
    n = A.shape[0]
    D = A - lam * np.eye(n)
    rtol = tol * max(1.0, np.abs(A).max())
    r1 = np.linalg.matrix_rank(D, tol=rtol)
    r2 = np.linalg.matrix_rank(D @ D, tol=rtol)
    return r1 == r2


def _cluster(values, tol):
    groups = []
    for v in values:
        for g in groups:
            if abs(g[0] - v) <= tol:
                g.append(v)
                break
        else:
            groups.append([v])
    return [np.mean(g) for g in groups]


def _power_bounded(A, tol=1e-8):
    ev = np.linalg.eigvals(A)
    if np.max(np.abs(ev), initial=0.0) > 1 + tol:
        return False
    peripheral = [v for v in ev if abs(v) >= 1 - tol]
    return all(_semisimple_at(A, lam, 1e-7) for lam in _cluster(peripheral, 1e-6))


def _generator_bounded(Q, tol=1e-8):
    ev = np.linalg.eigvals(Q)
    if np.max(ev.real, initial=-np.inf) > tol:
        return False
    axis = [v for v in ev if abs(v.real) <= tol]
    return all(_semisimple_at(Q, mu, 1e-7) for mu in _cluster(axis, 1e-6))


def is_bounded(rep, depth=8, tol=1e-8):
    """Spectral boundedness decision with a sampled bound.

    Returns
    -------
    (bool, float or None)
        The decision is certified spectrally (power-boundedness of each
        generator, or spectral bound of ``Q``); the bound ``M`` is the
        largest operator norm seen on a finite sample and is ``None`` when
        the family is unbounded.
    """
    space = rep.space
    if rep.kind == "continuous":
        if not _generator_bounded(rep.Q, tol):
            return False, None
        times = [2.0 ** k for k in range(-3, 7)]
        M = max(operator_norm(space, expm(t * rep.Q)) for t in times)
        return True, max(M, 1.0 if rep.conservative else 0.0)
    mats = rep.generator_matrices()
    if not all(_power_bounded(A, tol) for A in mats):
        return False, None
    M = 0.0
    for A in mats:
        P = np.eye(rep.n)
        for _ in range(max(depth, 1) * 8):
            P = A @ P
            M = max(M, operator_norm(space, P))
    _, _, idx = rep.chain(max(depth, 1) * len(mats))
    P = np.eye(rep.n)
    for i in idx:
        P = mats[i] @ P
        M = max(M, operator_norm(space, P))
    return True, M


def positivity_graph(rep):
    if rep.kind == "continuous":
        S = rep.Q.copy()
        np.fill_diagonal(S, 0.0)
    else:
        S = sum(rep.generator_matrices())
    return (S + np.eye(rep.n)) > 0


def is_irreducible(rep):
    """Strong connectivity of the graph ``i -> j`` whenever some generator
    moves mass from ``i`` to ``j``."""
    G = positivity_graph(rep).T
    ncomp, _ = connected_components(G.astype(float), directed=True, connection="strong")
    return ncomp == 1


def has_quasi_interior_fixed_point(rep, strict=1e-10, tol=1e-8):
    """A strictly positive fixed vector, or ``None``.

    Searches the fixed space for the combination maximising the smallest
    coordinate; the result is normalised to weighted mass one.
    """
    F = fixed_space(rep, tol)
    k = F.shape[0]
    if k == 0:
        return None
    n = rep.n
    # variables (c_1..c_k, s); maximise s subject to F^T c >= s
    c_obj = np.zeros(k + 1)
    c_obj[-1] = -1.0
    A_ub = np.hstack([-F.T, np.ones((n, 1))])
    res = linprog(c_obj, A_ub=A_ub, b_ub=np.zeros(n),
                  bounds=[(-1, 1)] * k + [(None, 1)], method="highs")
    if not res.success or res.x[-1] <= 0:
        return None
    v = F.T @ res.x[:k]
    if v.min() <= strict * np.abs(v).max():
        return None
    return v / np.sum(rep.space.w * v)


def fixed_residual(rep, v):
    v = check_vector(v, rep.n)
    if rep.kind == "continuous":
        return float(np.max(np.abs(rep.Q @ v), initial=0.0))
    return max(float(np.max(np.abs(A @ v - v))) for A in rep.generator_matrices())


def directed_limit(rep, x, horizon=64, tol=1e-8, projection=None):
    """Follow the net along a cofinal chain until it settles.

    Returns
    -------
    LimitResult or None
        ``None`` if no stable, fixed value is reached within ``horizon``
        steps (generated) or by time ``horizon`` (continuous).

    Raises
    ------
    Unbounded
    """
    bounded, _ = is_bounded(rep)
    if not bounded:
        raise Unbounded("the representation is not bounded")
    x = check_vector(x, rep.n)
    scale = max(1.0, float(np.abs(x).max(initial=0.0)))
    if rep.kind == "continuous":
        times = []
        t = 1.0 / 16
        while t <= horizon * (1 + 1e-12):
            times.append(t)
            t *= 2
        prev = x
        states = [(t, expm(t * rep.Q) @ x) for t in times]
    else:
        _, times, idx = rep.chain(int(horizon))
        mats = rep.generator_matrices()
        prev, states, y = x, [], x
        for t, i in zip(times, idx):
            y = mats[i] @ y
            states.append((t, y))
    prev_t = 0
    for t, y in states:
        if np.max(np.abs(y - prev), initial=0.0) <= tol * scale and fixed_residual(rep, y) <= tol * scale:
            if projection is None or np.max(np.abs(y - np.asarray(projection) @ x), initial=0.0) <= 10 * tol * scale:
                return LimitResult(y, prev_t)
        prev, prev_t = y, t
    return None


__all__ = [
    "IndexClass", "LimitResult", "GeneratedRepresentation", "ContinuousTimeRepresentation",
    "fixed_space", "is_bounded", "is_irreducible", "has_quasi_interior_fixed_point",
    "directed_limit", "fixed_residual", "positivity_graph",
]
