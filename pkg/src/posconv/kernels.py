"""Integral kernels on an interval grid, the heat semigroup on a window, and
an empirical covering-number diagnostic for AM-compactness.

Densities are column vectors of cell values on a midpoint grid with cell
mass ``h``; ``(Tf)_j = sum_i k(x_i, y_j) f_i h``.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm
from scipy.special import erf

from .exceptions import NegativeKernelSample, NonPositiveTime
from .lattice import LatticeSpace
from .operators import StructuredOperator
from .semigroup import ContinuousTimeRepresentation


@dataclass(frozen=True)
class GridSpec:
    """Uniform midpoint grid of ``n`` cells on ``[a, b]``."""

    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need b > a")
        if int(self.n) < 2:
            raise ValueError("need at least two cells")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self):
        return (self.b - self.a) / self.n

    @property
    def midpoints(self):
        return self.a + (np.arange(self.n) + 0.5) * self.h

    @property
    def edges(self):
        return np.linspace(self.a, self.b, self.n + 1)

    def space(self, p=1.0):
        return LatticeSpace(tuple(f"c{i}" for i in range(self.n)), (self.h,) * self.n, p)

    def indicator(self, lo, hi):
        """Cell values of ``1_[lo, hi]`` (midpoint sampling)."""
        x = self.midpoints
        return ((x >= lo) & (x <= hi)).astype(float)


def sample_kernel(k, grid):
    """Matrix ``M[j, i] = k(x_i, y_j) h``; rejects negative samples."""
    x = grid.midpoints
    X, Y = np.meshgrid(x, x)  # X[j, i] = x_i, Y[j, i] = y_j
    vals = np.asarray(k(X, Y), dtype=float)
    if vals.shape != X.shape:
        vals = np.broadcast_to(vals, X.shape).astype(float)
    if np.any(vals < 0):
        raise NegativeKernelSample(f"kernel takes the negative value {vals.min():.3g}")
    return vals * grid.h


def discretize(k, grid, p=1.0):
    """Pure kernel-band operator of the kernel ``k`` on the grid space."""
    return StructuredOperator.from_matrix(grid.space(p), sample_kernel(k, grid))


def heat_kernel(t):
    if not t > 0:
        raise NonPositiveTime("the heat kernel needs t > 0")
    c = 1.0 / math.sqrt(4 * math.pi * t)
    return lambda x, y: c * np.exp(-(x - y) ** 2 / (4 * t))


def gaussian_semigroup(t, grid, p=1.0):
    """Midpoint discretisation of the heat kernel on the window.

    Mass leaving the window is lost, not renormalised."""
    return discretize(heat_kernel(t), grid, p)


def heat_indicator_oracle(t, grid, lo, hi):
    """Exact heat flow of ``1_[lo, hi]`` on the line, at the midpoints."""
    x = grid.midpoints
    s = math.sqrt(4 * t)
    return 0.5 * (erf((hi - x) / s) - erf((lo - x) / s))


def dirichlet_heat_generator(grid):
    """Second-difference generator with absorbing ends: jump rate ``1/h^2`` to
    each neighbour; the end cells lose mass through the window edge."""
    n, h2 = grid.n, grid.h ** 2
    B = np.zeros((n, n))
    idx = np.arange(n - 1)
    B[idx + 1, idx] = 1.0 / h2
    B[idx, idx + 1] = 1.0 / h2
    killing = np.zeros(n)
    killing[0] = killing[-1] = 1.0 / h2
    return B, killing


def gaussian_representation(grid, p=1.0):
    """Continuous-time heat semigroup on the window, killed at the edges."""
    B, killing = dirichlet_heat_generator(grid)
    return ContinuousTimeRepresentation(grid.space(p), B, None, killing)


def boundary_loss(rep, x, t):
    """``(mass inside, mass absorbed)`` at time ``t``, from the generator
    augmented by a cemetery state that collects the killed mass."""
    n = rep.n
    w = rep.space.w
    Qa = np.zeros((n + 1, n + 1))
    Qa[:n, :n] = rep.Q
    # killed mass per unit time, in cemetery mass units
    Qa[n, :n] = rep.killing * w
    xa = np.concatenate([np.asarray(x, dtype=float), [0.0]])
    # inside entries are densities; the cemetery entry is a mass
    ya = expm(t * Qa) @ xa
    return float(w @ ya[:n]), float(ya[n])


# covering diagnostic ---------------------------------------------------------

@dataclass
class CoveringProfile:
    """Covering numbers of ``T[0, f]`` per refinement level.

    ``verdict`` is ``"compatible-with-AM-compact"`` when successive counts
    grow by at most ``ratio_limit``, else ``"not-AM-compact-like"``. It is an
    empirical diagnostic, not a proof.
    """

    levels: tuple
    counts: tuple
    epsilon: float
    verdict: str
    label: str = "diagnostic"

    @property
    def ratios(self):
        return tuple(b / a for a, b in zip(self.counts, self.counts[1:]))


def order_interval_samples(f, budget=4096, seed=0):
    """Deterministic points of ``[0, f]``: the corners ``0``, ``f/2``, ``f``
    and random coordinate patterns with values in ``{0, f_i/2, f_i}``."""
    f = np.asarray(f, dtype=float)
    rng = np.random.default_rng(seed)
    pats = rng.integers(0, 3, size=(max(budget - 3, 0), f.size)) / 2.0
    fixed = np.array([np.zeros(f.size), np.full(f.size, 0.5), np.ones(f.size)])
    return np.vstack([fixed, pats])[:budget] * f[None, :]


def covering_radii(points, weights, p=1.0):
    """Farthest-point traversal; ``radii[k]`` is the covering radius of the
    first ``k + 1`` centres. ``N(eps) = 1 + #{k : radii[k] > eps}``."""
    pts = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)

    def dist(c):
        d = np.abs(pts - c[None, :])
        if math.isinf(p):
            return d.max(axis=1)
        return (d ** p @ w) ** (1.0 / p)

    mind = dist(pts[0])
    radii = [float(mind.max())]
    while radii[-1] > 0 and len(radii) < len(pts):
        j = int(np.argmax(mind))
        mind = np.minimum(mind, dist(pts[j]))
        radii.append(float(mind.max()))
    return np.array(radii)


def covering_number(points, eps, weights, p=1.0):
    radii = covering_radii(points, weights, p)
    return 1 + int(np.sum(radii > eps))


def am_compact_diagnostic(builder, f, eps, levels, budget=4096, seed=0, ratio_limit=1.2):
    """Covering numbers ``N(eps)`` of ``T[0, f]`` across refinements.

    Parameters
    ----------
    builder : callable
        ``builder(level)`` returns the operator (StructuredOperator or
        matrix with a ``space`` given alongside as a tuple ``(matrix, space)``).
    f : callable or array_like
        Upper end of the order interval; a callable receives the level's
        space and returns cell values.
    eps : float
    levels : sequence of int
    """
    counts = []
    for level in levels:
        op = builder(level)
        if isinstance(op, StructuredOperator):
            space, M = op.space, op.full()
        else:
            M, space = op
            M = np.asarray(M, dtype=float)
        fv = np.asarray(f(space) if callable(f) else f, dtype=float)
        if np.any(fv < 0):
            raise ValueError("the order interval needs f >= 0")
        pts = order_interval_samples(fv, budget, seed) @ M.T
        counts.append(covering_number(pts, eps, space.w, space.p))
    counts = tuple(counts)
    growing = any(b > ratio_limit * a for a, b in zip(counts, counts[1:]))
    verdict = "not-AM-compact-like" if growing else "compatible-with-AM-compact"
    return CoveringProfile(tuple(levels), counts, eps, verdict)


__all__ = [
    "GridSpec", "CoveringProfile", "sample_kernel", "discretize", "heat_kernel",
    "gaussian_semigroup", "heat_indicator_oracle", "dirichlet_heat_generator",
    "gaussian_representation", "boundary_loss", "order_interval_samples", "covering_radii",
    "covering_number", "am_compact_diagnostic",
]
