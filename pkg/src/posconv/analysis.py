"""Verdict engine: hypothesis checks, convergence and spectral verdicts, and
simulation cross-checks.

Every verdict names the hypotheses it consumed. A convergence verdict is
only issued once a simulation of the standard basis along a cofinal chain
has reached the limit projection; a contradiction raises
:class:`~posconv.exceptions.VerdictContradiction`.
"""

from dataclasses import dataclass, field, asdict
from fractions import Fraction
import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linprog

from ._validation import check_square, check_vector
from .exceptions import (
    NoDecay, NoQuasiInteriorFixedPoint, NotAmSpace, NotIrreducible, NotMonomial,
    PreconditionError, VerdictContradiction,
)
from .groups import is_divisible, quotient_hom, UnsupportedGroup, PrimeInSupport
from .jdlg import ergodic_projection, jdlg_split, triviality_test_atomic, _range_basis
from .lattice import _range_atoms, norm, operator_norm
from .operators import is_adjoint_lattice_homomorphism
from .semigroup import (
    ContinuousTimeRepresentation, GeneratedRepresentation, fixed_space,
    has_quasi_interior_fixed_point, is_bounded, is_irreducible,
)

HOLDS, FAILS, UNDETERMINED = "holds", "fails", "undetermined"
CONVERGENT = "strongly convergent"
NO_UNIMODULAR = "no nontrivial unimodular eigenvalue"
NO_VERDICT = "no verdict"

# hypotheses consumed by each verdict, in gating order
VERDICT_HYPOTHESES = {
    "am-compact-member": ["positive", "bounded", "divisible-index-group",
                          "quasi-interior-fixed-point", "am-compact-member"],
    "dominated-kernel": ["positive", "bounded", "divisible-index-group", "order-continuous-norm",
                         "quasi-interior-fixed-point", "super-fixed-implies-fixed",
                         "kernel-domination"],
    "one-parameter-kernel": ["one-parameter", "positive", "bounded", "order-continuous-norm",
                             "quasi-interior-fixed-point", "am-compact-member"],
    "atomic": ["one-parameter", "positive", "bounded", "order-continuous-norm", "atomic-space",
               "quasi-interior-fixed-point"],
    "one-parameter-dominated-kernel": ["one-parameter", "positive", "bounded",
                                       "order-continuous-norm", "quasi-interior-fixed-point",
                                       "super-fixed-implies-fixed", "kernel-domination"],
    "irreducible-dominated-kernel": ["positive", "bounded", "divisible-index-group",
                                     "order-continuous-norm", "nonzero-fixed-point",
                                     "irreducible", "nonzero-dominated-kernel"],
    "measure-atom": ["one-parameter", "positive", "bounded", "order-continuous-norm",
                     "irreducible", "nonzero-fixed-point", "flagged-atom"],
    "spectral-am-compact": ["positive", "bounded", "divisible-index-group", "am-compact-member"],
    "spectral-dominated-kernel": ["positive", "bounded", "divisible-index-group",
                                  "order-continuous-norm", "super-fixed-implies-fixed",
                                  "kernel-domination"],
    "am-space-dual": ["positive", "bounded", "divisible-index-group", "am-space", "irreducible",
                      "nonzero-dominated-kernel"],
}
CONVERGENCE_VERDICTS = ("am-compact-member", "dominated-kernel", "one-parameter-kernel", "atomic",
                        "one-parameter-dominated-kernel", "irreducible-dominated-kernel",
                        "measure-atom")
SPECTRAL_VERDICTS = ("spectral-am-compact", "spectral-dominated-kernel", "am-space-dual")


@dataclass
class AnalysisOptions:
    """Tolerances and search limits for :func:`verdict_engine`.

    ``dominated`` optionally supplies ``(s, K)``: an index ``s`` and a
    nonnegative matrix ``K`` with ``K <= T_s``, used in place of the band
    decomposition for the domination hypothesis. ``atom`` flags an atom
    (index or label) for the atom-band verdict; it stays off when ``None``.
    """

    tol: float = 1e-8
    horizon: int = 64
    depth: int = 8
    epsilon: float = 0.1
    strict: float = 1e-10
    atom: object = None
    dominated: tuple = None


@dataclass
class Hypothesis:
    name: str
    status: str
    witness: dict = field(default_factory=dict)


@dataclass
class Verdict:
    id: str
    applicable: bool
    conclusion: str
    consumed: list
    witness: dict = field(default_factory=dict)


@dataclass
class UnimodularEigenvalue:
    """Joint eigenvalue of modulus one.

    ``values[i]`` is the eigenvalue of the ``i``-th generator (of ``T_1`` for
    continuous time, where ``mu`` holds the generator eigenvalue).
    """

    values: tuple
    vector_real: np.ndarray
    vector_imag: np.ndarray
    is_trivial: bool
    mu: complex = None


@dataclass
class AnalysisReport:
    hypotheses: list
    verdicts: list
    convergence: str
    spectral: str
    conclusion: str
    limit_projection: np.ndarray = None
    eigenvalues: list = field(default_factory=list)
    simulation: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def hypothesis(self, name):
        for h in self.hypotheses:
            if h.name == name:
                return h
        raise KeyError(name)

    def status(self, name):
        return self.hypothesis(name).status

    def verdict(self, vid):
        for v in self.verdicts:
            if v.id == vid:
                return v
        raise KeyError(vid)

    @property
    def applicable(self):
        return [v.id for v in self.verdicts if v.applicable]

    @property
    def determinate(self):
        return self.conclusion != NO_VERDICT


# helpers ---------------------------------------------------------------------

def _col_norms(space, M):
    A = np.abs(np.asarray(M, dtype=float))
    if math.isinf(space.p):
        return A.max(axis=0)
    return (space.w @ A ** space.p) ** (1.0 / space.p)


def _dual_matrix(space, A):
    w = space.w
    return (A.T * w[None, :]) / w[:, None]


def candidate_times(rep, depth=8):
    """Indices searched for dominated kernel operators."""
    if rep.kind == "continuous":
        return [1.0, 2.0, 4.0, 8.0]
    times = set()
    for g in rep.generators:
        for m in range(1, depth + 1):
            times.add(m * g)
    _, chain, _ = rep.chain(depth)
    times.update(chain)
    return sorted(times)


def fixed_cone_generators(rep, tol=1e-8):
    """Extreme rays (rows) of the cone of positive fixed vectors."""
    P = ergodic_projection(rep)
    P = np.where(np.abs(P) < tol, 0.0, P)
    return _range_atoms(P, tol)


def structurally_singular(rep):
    """True iff no operator of the family can have a kernel part."""
    if rep.kind == "continuous":
        # without jumps the whole evolution is the jump-free flow part
        return rep.flow is not None and not np.any(rep.jump)
    return all(T.is_pure_singular() for T in rep.operators)


def has_am_compact_member(rep):
    """Status and witness for 'some T_s is AM-compact' in the band model."""
    if rep.kind == "continuous":
        if rep.flow is None:
            return HOLDS, {"s": 1.0, "reason": "no flow: every T_t lies in the kernel band"}
        return FAILS, {"reason": "the jump-free flow part of every T_t is nonzero"}
    for g, T in zip(rep.generators, rep.operators):
        if T.is_am_compact_model():
            return HOLDS, {"s": g}
    # singular parts compose to nonzero singular parts
    return FAILS, {"reason": "every generator has a singular part, hence so does every T_s"}


# Prop-style sufficient conditions for 'super fixed implies fixed' --------------

def _contractive(rep, tol=1e-12):
    space = rep.space
    if rep.kind == "continuous":
        Q, w = rep.Q, space.w
        if space.p == 1.0:
            return bool(np.all((w @ Q) / w <= tol))
        if math.isinf(space.p):
            return bool(np.all(Q.sum(axis=1) <= tol))
        if space.p == 2.0:
            s = np.sqrt(w)
            A = s[:, None] * Q / s[None, :]
            return bool(np.linalg.eigvalsh(A + A.T).max() <= tol)
        return all(operator_norm(space, expm(t * Q)) <= 1 + 1e-10 for t in (0.125, 0.5, 1, 2, 8))
    return all(operator_norm(space, A) <= 1 + 1e-10 for A in rep.generator_matrices())


def dual_subinvariant_functional(rep, tol=1e-9):
    """A functional ``phi >= 1`` with ``T_g' phi <= phi`` for all generators
    (``Q' phi <= 0`` in continuous time), or ``None``."""
    n, space = rep.n, rep.space
    if rep.kind == "continuous":
        rows = [_dual_matrix(space, rep.Q)]
    else:
        rows = [_dual_matrix(space, A) - np.eye(n) for A in rep.generator_matrices()]
    A_ub = np.vstack(rows)
    res = linprog(np.ones(n), A_ub=A_ub, b_ub=np.full(A_ub.shape[0], tol),
                  bounds=[(1.0, 1e6)] * n, method="highs")
    if not res.success:
        return None
    return res.x


def strict_super_fixed_vector(rep, tol=1e-9):
    """A positive ``x`` with ``T_g x >= x`` for all ``g`` and some strict
    inequality, or ``None`` if the linear search finds none."""
    n, space = rep.n, rep.space
    if rep.kind == "continuous":
        D = [rep.Q]
    else:
        D = [A - np.eye(n) for A in rep.generator_matrices()]
    obj = -sum(np.ones(n) @ d for d in D)
    A_ub = np.vstack([-d for d in D] + [space.w[None, :]])
    b_ub = np.concatenate([np.zeros(n * len(D)), [1.0]])
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, bounds=[(0, None)] * n, method="highs")
    if not res.success:
        return None, False
    if -res.fun <= tol:
        return None, True
    return res.x, True


def super_fixed_conditions(rep):
    """Status of each sufficient condition, keyed ``"a"`` to ``"d"``."""
    finite_p = rep.space.order_continuous
    out = {"a": finite_p and _contractive(rep)}
    out["b"] = dual_subinvariant_functional(rep) is not None
    out["c"] = is_irreducible(rep)
    if rep.kind == "continuous":
        off = rep.Q - np.diag(np.diag(rep.Q))
        homs = not np.any(off)
    else:
        homs = all(is_adjoint_lattice_homomorphism(T) for T in rep.operators)
    out["d"] = finite_p and homs
    return out


def check_super_fixed_implies_fixed(rep):
    """Returns ``(status, condition, witness)``; ``condition`` is the first of
    ``"a"``, ``"b"``, ``"c"``, ``"d"`` that holds, or ``"direct"`` when the
    linear search certifies that no strict super fixed vector exists."""
    if rep.space.order_continuous and _contractive(rep):
        return HOLDS, "a", {}
    phi = dual_subinvariant_functional(rep)
    if phi is not None:
        return HOLDS, "b", {"phi": phi}
    if is_irreducible(rep):
        return HOLDS, "c", {}
    if super_fixed_conditions(rep)["d"]:
        return HOLDS, "d", {}
    x, solved = strict_super_fixed_vector(rep)
    if not solved:
        return UNDETERMINED, None, {}
    if x is None:
        return HOLDS, "direct", {}
    return FAILS, None, {"super_fixed": x}


# kernel domination -----------------------------------------------------------

def _check_supplied(rep, dominated, tol=1e-12):
    s, K = dominated
    K = check_square(K, rep.n, "dominated operator")
    T = rep.evaluate(s).full()
    if K.min() < -tol or np.any(K > T + tol * max(1.0, np.abs(T).max())):
        raise PreconditionError("supplied operator is not between 0 and T_s")
    return s, K


def check_kernel_domination(rep, basis=None, depth=8, strict=1e-10, dominated=None):
    """Every positive fixed vector ``x`` has ``s`` and a kernel ``K <= T_s``
    with ``Kx != 0``.

    Parameters
    ----------
    basis : ndarray (k, n), optional
        Generators of the positive fixed cone; computed if omitted.
    dominated : (s, K), optional
        User-supplied dominated operator, checked against ``T_s`` first.

    Returns
    -------
    (status, witness)
    """
    basis = fixed_cone_generators(rep) if basis is None else np.atleast_2d(basis)
    space = rep.space
    if basis.shape[0] == 0:
        return HOLDS, {"vacuous": True, "source": None, "witnesses": []}
    candidates = []
    if dominated is not None:
        s, K = _check_supplied(rep, dominated)
        candidates.append((s, K, "supplied"))
    for t in candidate_times(rep, depth):
        candidates.append((t, None, "band"))
    witnesses, missing = [], []
    cache = {}
    for x in basis:
        found = None
        for s, K, source in candidates:
            if K is None:
                if s not in cache:
                    cache[s] = rep.evaluate(s).kernel
                K = cache[s]
            if norm(space, K @ x) > strict * norm(space, x):
                found = {"s": s, "source": source}
                break
        if found is None:
            missing.append(x)
        else:
            witnesses.append(found)
    if not missing:
        sources = sorted({w["source"] for w in witnesses})
        return HOLDS, {"vacuous": False, "witnesses": witnesses, "source": ",".join(sources)}
    status = FAILS if structurally_singular(rep) and dominated is None else UNDETERMINED
    return status, {"missing": [m for m in missing], "searched": len(candidates)}


def nonzero_dominated_kernel(rep, depth=8, dominated=None):
    """Some ``T_s`` dominates a nonzero kernel operator."""
    if dominated is not None:
        s, K = _check_supplied(rep, dominated)
        if np.any(K > 0):
            return HOLDS, {"s": s, "source": "supplied"}
    for t in candidate_times(rep, depth):
        K = rep.evaluate(t).kernel
        if np.any(K > 0):
            return HOLDS, {"s": t, "source": "band"}
    return (FAILS if structurally_singular(rep) else UNDETERMINED), {}


# decay of the singular part ------------------------------------------------------

@dataclass
class DecayResult:
    t: object
    kernel: np.ndarray
    residual: float
    trace: list


def lemma_R_decay(rep, y, epsilon=0.1, horizon=64, tol=1e-12):
    """First ``t`` on the cofinal chain with ``||R_t y|| < epsilon ||y||``.

    ``T_t = K_t + R_t`` is the band decomposition; along the chain
    ``||R_t y||`` must be nonincreasing (checked, up to ``tol``).

    Raises
    ------
    NoDecay
        If the singular part stays above ``epsilon`` up to the horizon.
    """
    y = check_vector(y, rep.n)
    space = rep.space
    size = norm(space, y)
    trace = []
    prev = math.inf
    if rep.kind == "continuous":
        steps = [(float(k), rep.evaluate(float(k))) for k in range(1, int(horizon) + 1)]
    else:
        _, times, idx = rep.chain(int(horizon))
        S, steps = None, []
        for t, i in zip(times, idx):
            T = rep.operators[i]
            S = T if S is None else T.compose(S)
            steps.append((t, S))
    z = y
    for t, T in steps:
        K, R = T.band_decompose()
        z = R.apply(y)
        r = norm(space, z)
        trace.append((t, r))
        if r > prev + tol * max(1.0, size):
            raise RuntimeError(f"singular part increased along the chain at t={t}")
        prev = r
        if r < epsilon * size:
            return DecayResult(t, K.kernel, r, trace)
    mats = rep.generator_matrices()
    scale = max(1.0, float(np.abs(z).max(initial=0.0)))
    super_fixed = all(np.all(A @ z >= z - 1e-9 * scale) for A in mats)
    raise NoDecay(f"singular part stays at {prev:.3g} up to the horizon", z, super_fixed)


# eigenvalues ---------------------------------------------------------------------

def unimodular_eigenvalues(rep, tol=1e-8, split=None):
    """Joint eigenpairs of modulus one, with eigenvectors lifted to ``E``."""
    out = []
    if rep.kind == "continuous":
        mu, V = np.linalg.eig(rep.Q)
        for k in np.argsort(-mu.real, kind="stable"):
            if abs(mu[k].real) <= tol:
                z = V[:, k]
                lam = complex(np.exp(mu[k]))
                out.append(UnimodularEigenvalue((lam,), z.real.copy(), z.imag.copy(),
                                                abs(mu[k]) <= tol, complex(mu[k])))
        return out
    split = jdlg_split(rep) if split is None else split
    if split.rank == 0:
        return out
    B = split.reversible_basis
    R = split.restrictions()
    rng = np.random.default_rng(12345)
    C = sum(r * A for r, A in zip(rng.uniform(0.5, 1.5, len(R)), R))
    _, V = np.linalg.eig(C)
    for k in range(V.shape[1]):
        v = V[:, k]
        v = v / np.linalg.norm(v)
        lams = tuple(complex(np.vdot(v, A @ v)) for A in R)
        if any(np.linalg.norm(A @ v - l * v) > 1e-7 for A, l in zip(R, lams)):
            continue
        if all(abs(abs(l) - 1) <= 1e-7 for l in lams):
            z = B.T @ v
            trivial = all(abs(l - 1) <= tol for l in lams)
            out.append(UnimodularEigenvalue(lams, z.real.copy(), z.imag.copy(), trivial))
    out.sort(key=lambda e: (not e.is_trivial, tuple(round(np.angle(l), 12) for l in e.values)))
    return out


def periodic_orbit_check(rep, tol=1e-8):
    """Periods ``2 pi / |beta|`` from eigenvalues ``i beta`` of ``Q``, ``beta != 0``;
    an empty list certifies that no nontrivial periodic orbit exists."""
    if rep.kind != "continuous":
        raise ValueError("periodic orbits are checked for continuous-time representations")
    mu = np.linalg.eigvals(rep.Q)
    periods = sorted({round(2 * math.pi / abs(m.imag), 12) for m in mu
                      if abs(m.real) <= tol and abs(m.imag) > tol})
    return periods


# atom and AM-space results --------------------------------------------------------

@dataclass
class AtomVerdict:
    applicable: bool
    conclusion: str
    t: object = None
    witness_row: np.ndarray = None
    reason: str = ""


def atom_theorem_check(rep, atom=0, depth=8):
    """Irreducible ``L^p`` representation with an atom and a nonzero fixed
    point: the rank-one ``P_B T_t`` with ``B`` the atom's band is a dominated
    kernel operator, which yields convergence."""
    a = rep.space.index(atom)
    if not rep.space.order_continuous:
        return AtomVerdict(False, NO_VERDICT, reason="needs p < inf")
    if not rep.divisible:
        return AtomVerdict(False, NO_VERDICT, reason="index group is not divisible")
    if not is_irreducible(rep):
        return AtomVerdict(False, NO_VERDICT, reason="not irreducible")
    if fixed_space(rep).shape[0] == 0:
        return AtomVerdict(False, NO_VERDICT, reason="no nonzero fixed point")
    if rep.n == 1:
        return AtomVerdict(True, CONVERGENT, reason="one-dimensional space")
    for t in candidate_times(rep, depth):
        row = rep.evaluate(t).full()[a]
        if np.any(row > 0):
            return AtomVerdict(True, CONVERGENT, t, row.copy())
    return AtomVerdict(False, NO_VERDICT, reason="no index with P_B T_t != 0 found")


@dataclass
class AmDualResult:
    conclusion: str
    dual: object
    dominated: tuple
    primal_eigenvalues: list
    dual_eigenvalues: list
    consistent: bool


def dual_representation(rep):
    """Adjoint representation on the dual space under the weighted pairing."""
    space = rep.space
    dual = space.dual()
    if rep.kind == "continuous":
        return ContinuousTimeRepresentation.from_generator(dual, _dual_matrix(space, rep.Q))
    ops = [T.adjoint(dual) if not T.singular or all(t.is_bijective for t in T.singular)
           else _dual_matrix(space, T.full()) for T in rep.operators]
    return GeneratedRepresentation(dual, rep.generators, ops, rep.group)


def am_space_dual_analysis(rep, dominated=None, depth=8, tol=1e-8):
    """Eigenvalue analysis of a representation on an AM-space model via its
    adjoint on the dual AL-space model.

    Raises
    ------
    NotAmSpace, NotIrreducible
    """
    if not math.isinf(rep.space.p):
        raise NotAmSpace("the dual path needs the sup-norm model (p = inf)")
    if not is_irreducible(rep):
        raise NotIrreducible("the dual path needs an irreducible representation")
    bounded, _ = is_bounded(rep)
    if not bounded:
        return AmDualResult(NO_VERDICT, None, None, [], [], False)
    if dominated is None:
        status, w = nonzero_dominated_kernel(rep, depth)
        if status != HOLDS:
            return AmDualResult(NO_VERDICT, None, None, [], [], False)
        s = w["s"]
        K = rep.evaluate(s).kernel
    else:
        s, K = _check_supplied(rep, dominated)
    dual = dual_representation(rep)
    Kd = _dual_matrix(rep.space, K)
    # domination transfers to the adjoint: 0 <= K' <= T_s'
    cone = fixed_cone_generators(dual)
    sf, _, _ = check_super_fixed_implies_fixed(dual)
    dom = all(np.any(Kd @ x > 0) for x in cone)
    primal = unimodular_eigenvalues(rep, tol)
    dual_ev = unimodular_eigenvalues(dual, tol)
    consistent = (sorted(np.round(np.angle(e.values[0]), 8) for e in primal)
                  == sorted(np.round(np.angle(e.values[0]), 8) for e in dual_ev))
    ok = sf == HOLDS and dom and all(e.is_trivial for e in dual_ev)
    return AmDualResult(NO_UNIMODULAR if ok else NO_VERDICT, dual, (s, K), primal, dual_ev, consistent)


# the engine -------------------------------------------------------------------------

def _chain_operators(rep, horizon):
    """Full matrices ``T_t`` along the cofinal chain used for simulation."""
    if rep.kind == "continuous":
        E = expm(rep.Q)
        T = np.eye(rep.n)
        for k in range(1, int(horizon) + 1):
            T = E @ T
            yield float(k), T
    else:
        name, times, idx = rep.chain(int(horizon))
        mats = rep.generator_matrices()
        T = np.eye(rep.n)
        for t, i in zip(times, idx):
            T = mats[i] @ T
            yield t, T


def cross_check(rep, P, tol=1e-8, horizon=64):
    """First chain index where every standard basis probe is within ``tol``
    of its limit ``P e_i``; ``None`` if never reached."""
    last = None
    for t, T in _chain_operators(rep, horizon):
        r = float(_col_norms(rep.space, T - P).max())
        last = (t, r)
        if r <= tol:
            return {"t": t, "residual": r, "reached": True}
    return {"t": last[0] if last else None, "residual": last[1] if last else None, "reached": False}


def _hyp(name, status, **witness):
    return Hypothesis(name, status, witness)


def _tri(flag):
    return HOLDS if flag else FAILS


def verdict_engine(rep, options=None):
    """Check every hypothesis and issue the verdicts they support.

    Raises
    ------
    VerdictContradiction
        If simulation contradicts an issued verdict.
    """
    opt = options or AnalysisOptions()
    space = rep.space
    hyps = {}
    notes = []
    details = {"kind": rep.kind}

    mats = rep.generator_matrices()
    neg = min(float(A.min()) for A in mats)
    hyps["positive"] = _hyp("positive", _tri(neg >= -opt.tol), min_entry=neg)
    bounded, M = is_bounded(rep, depth=opt.depth, tol=opt.tol)
    hyps["bounded"] = _hyp("bounded", _tri(bounded), bound=M, certification="spectral",
                           bound_kind="sampled")
    div, q = is_divisible(rep.group)
    w = {"group": rep.group.to_json()}
    if not div:
        w["witness_prime"] = q
        try:
            phi = quotient_hom(rep.group, q)
            w["quotient"] = {str(g): phi(g) for g in rep.generator_times}
        except (UnsupportedGroup, PrimeInSupport):
            pass
    hyps["divisible-index-group"] = Hypothesis("divisible-index-group", _tri(div), w)
    hyps["one-parameter"] = _hyp("one-parameter", _tri(rep.kind == "continuous"))
    hyps["order-continuous-norm"] = _hyp("order-continuous-norm", _tri(space.order_continuous),
                                         p=space.p)
    hyps["kb-space"] = _hyp("kb-space", _tri(space.kb_space), p=space.p)
    hyps["am-space"] = _hyp("am-space", _tri(math.isinf(space.p)), p=space.p)
    atomic = rep.kind == "continuous" and rep.flow is None
    hyps["atomic-space"] = _hyp("atomic-space", _tri(atomic))

    F = fixed_space(rep, opt.tol)
    hyps["nonzero-fixed-point"] = _hyp("nonzero-fixed-point", _tri(F.shape[0] > 0),
                                       dimension=F.shape[0])
    y = has_quasi_interior_fixed_point(rep, opt.strict, opt.tol)
    hyps["quasi-interior-fixed-point"] = (
        _hyp("quasi-interior-fixed-point", HOLDS, vector=y) if y is not None
        else _hyp("quasi-interior-fixed-point", FAILS, fixed_dimension=F.shape[0]))
    status, wit = has_am_compact_member(rep)
    hyps["am-compact-member"] = Hypothesis("am-compact-member", status, wit)
    hyps["flagged-atom"] = _hyp("flagged-atom", _tri(opt.atom is not None),
                                atom=None if opt.atom is None else space.atoms[space.index(opt.atom)])
    irr = is_irreducible(rep)
    hyps["irreducible"] = _hyp("irreducible", _tri(irr))

    split = None
    if bounded:
        sf_status, cond, wit = check_super_fixed_implies_fixed(rep)
        wit = dict(wit, condition=cond)
        hyps["super-fixed-implies-fixed"] = Hypothesis("super-fixed-implies-fixed", sf_status, wit)
        kd_status, kd_wit = check_kernel_domination(rep, None, opt.depth, opt.strict, opt.dominated)
        hyps["kernel-domination"] = Hypothesis("kernel-domination", kd_status, kd_wit)
        nz_status, nz_wit = nonzero_dominated_kernel(rep, opt.depth, opt.dominated)
        hyps["nonzero-dominated-kernel"] = Hypothesis("nonzero-dominated-kernel", nz_status, nz_wit)
        split = jdlg_split(rep)
        details["jdlg"] = {"rank": split.rank, **split.residuals}
    else:
        for name in ("super-fixed-implies-fixed", "kernel-domination", "nonzero-dominated-kernel"):
            hyps[name] = _hyp(name, UNDETERMINED, reason="representation is not bounded")

    verdicts = []
    for vid, needed in VERDICT_HYPOTHESES.items():
        if vid == "spectral-am-compact":
            # either a KB-space or 'super fixed implies fixed' will do
            extra = "kb-space" if hyps["kb-space"].status == HOLDS else "super-fixed-implies-fixed"
            needed = needed + [extra]
        ok = all(hyps[h].status == HOLDS for h in needed)
        witness = {}
        if vid == "measure-atom" and ok:
            av = atom_theorem_check(rep, opt.atom, opt.depth)
            ok = av.applicable
            witness = {"atom": space.atoms[space.index(opt.atom)], "t": av.t,
                       "row": av.witness_row, "reason": av.reason}
        if vid == "am-space-dual" and ok:
            res = am_space_dual_analysis(rep, opt.dominated, opt.depth, opt.tol)
            ok = res.conclusion == NO_UNIMODULAR
            witness = {"s": res.dominated[0] if res.dominated else None,
                       "dual_consistent": res.consistent,
                       "dual_eigenvalues": [e.values for e in res.dual_eigenvalues]}
        if vid == "dominated-kernel" and ok and y is not None:
            try:
                dec = lemma_R_decay(rep, y, opt.epsilon, opt.horizon)
                witness = {"decay_t": dec.t, "decay_residual": dec.residual}
            except NoDecay as exc:
                raise VerdictContradiction(f"hypotheses hold but the singular part does not decay: {exc}")
        conclusion = (CONVERGENT if vid in CONVERGENCE_VERDICTS else NO_UNIMODULAR) if ok else NO_VERDICT
        verdicts.append(Verdict(vid, ok, conclusion, list(needed) if ok else [], witness))

    convergent = any(v.applicable for v in verdicts if v.id in CONVERGENCE_VERDICTS)
    spectral_ok = any(v.applicable for v in verdicts if v.id in SPECTRAL_VERDICTS)

    eig = unimodular_eigenvalues(rep, opt.tol, split) if bounded else []
    simulation = {}
    limit = None
    if convergent:
        limit = split.projection
        if y is not None and rep.divisible:
            try:
                tv = triviality_test_atomic(split, rep)
                details["group_part"] = tv.kind
                if tv.kind != "trivial":
                    raise VerdictContradiction("group part on the reversible space is not trivial")
            except NotMonomial:
                details["group_part"] = "not monomial"
        simulation = cross_check(rep, limit, opt.tol, opt.horizon)
        simulation["chain"] = rep.chain(1)[0]
        if not simulation["reached"]:
            raise VerdictContradiction(
                f"convergence verdict not confirmed: residual {simulation['residual']:.3g} "
                f"at the horizon")
    elif bounded:
        simulation = _nonconvergence_summary(rep, split, opt)
    if (convergent or spectral_ok) and not all(e.is_trivial for e in eig):
        raise VerdictContradiction("nontrivial unimodular eigenvalue despite a spectral verdict")
    if rep.kind == "continuous":
        details["periods"] = periodic_orbit_check(rep, opt.tol)
    if bounded and not convergent and all(e.is_trivial for e in eig):
        notes.append("bounded finite-dimensional orbits are relatively compact, so absence of "
                     "nontrivial unimodular eigenvalues alone forces convergence; recorded as a "
                     "note, not as a verdict")
    details["dominated_source"] = "band" if opt.dominated is None else "supplied"

    convergence = CONVERGENT if convergent else NO_VERDICT
    spectral = NO_UNIMODULAR if (spectral_ok or convergent) else NO_VERDICT
    conclusion = convergence if convergent else spectral
    order = ["positive", "bounded", "divisible-index-group", "quasi-interior-fixed-point",
             "am-compact-member", "super-fixed-implies-fixed", "kernel-domination",
             "nonzero-fixed-point", "nonzero-dominated-kernel", "irreducible", "one-parameter",
             "order-continuous-norm", "kb-space", "am-space", "atomic-space", "flagged-atom"]
    return AnalysisReport([hyps[k] for k in order], verdicts, convergence, spectral, conclusion,
                          limit, eig, simulation, notes, details)


def _nonconvergence_summary(rep, split, opt):
    """Settling behaviour of the standard basis when no verdict applies."""
    prev, settled_at, last = None, None, None
    P = split.projection if split is not None else None
    for t, T in _chain_operators(rep, opt.horizon):
        if prev is not None:
            step = float(_col_norms(rep.space, T - prev).max())
            last = (t, step)
            if step <= opt.tol and settled_at is None:
                settled_at = t
        prev = T
    out = {"chain": rep.chain(1)[0], "settled": settled_at is not None,
           "final_step_change": last[1] if last else None,
           "final_norm": float(_col_norms(rep.space, prev).max()) if prev is not None else None}
    return out


__all__ = [
    "AnalysisOptions", "AnalysisReport", "Hypothesis", "Verdict", "UnimodularEigenvalue",
    "DecayResult", "AtomVerdict", "AmDualResult", "check_super_fixed_implies_fixed",
    "super_fixed_conditions", "check_kernel_domination", "lemma_R_decay",
    "unimodular_eigenvalues", "verdict_engine", "atom_theorem_check", "am_space_dual_analysis",
    "periodic_orbit_check", "fixed_cone_generators", "dual_representation", "cross_check",
    "HOLDS", "FAILS", "UNDETERMINED", "CONVERGENT", "NO_UNIMODULAR", "NO_VERDICT",
]
