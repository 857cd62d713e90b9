"""Convergence analysis of positive operator semigroups on finite lattices."""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .lattice import (InducedLattice, LatticeSpace, LatticeVector, is_quasi_interior,  # noqa: F401
                      modulus, norm, operator_norm)
from .operators import (MonomialFactorization, StructuredOperator, Transport,  # noqa: F401
                        adjoint, band_decompose, compose, monomial_factorize)
from .groups import (DYADICS, INTEGERS, RATIONALS, FinitelyGenerated, PrimeLocalized,  # noqa: F401
                     Reals, extend_hom_to_group, is_divisible, koopman_counterexample,
                     nth_root_in_monomial_group, quotient_hom)
from .semigroup import (ContinuousTimeRepresentation, GeneratedRepresentation,  # noqa: F401
                        directed_limit, fixed_space, has_quasi_interior_fixed_point,
                        is_bounded, is_irreducible)
from .jdlg import (JdlgSplit, ergodic_projection, jdlg_split, stable_decay_check,  # noqa: F401
                   triviality_test_atomic)
from .analysis import (AnalysisOptions, AnalysisReport, check_kernel_domination,  # noqa: F401
                       check_super_fixed_implies_fixed, lemma_R_decay, unimodular_eigenvalues,
                       verdict_engine)
from .kernels import (GridSpec, am_compact_diagnostic, discretize,  # noqa: F401
                      gaussian_representation, gaussian_semigroup)
from .io import dumps_report, load_model, loads_model, model_from_dict  # noqa: F401
from .gallery import gallery_model, gallery_names  # noqa: F401
from .estimators import ConvergenceAnalyzer, JdlgDecomposition  # noqa: F401
