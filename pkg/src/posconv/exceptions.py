"""Exception hierarchy shared by all posconv modules."""


class PosconvError(Exception):
    """Base class for every error raised by posconv."""


class NegativeInput(PosconvError, ValueError):
    """A vector expected to be positive has a negative coordinate."""


class NotAProjection(PosconvError, ValueError):
    """Matrix is not idempotent within tolerance."""


class NotPositive(PosconvError, ValueError):
    """Matrix has a negative entry beyond tolerance."""


class DimensionMismatch(PosconvError, ValueError):
    pass


class NotMonomial(PosconvError, ValueError):
    """Operator is not a weighted permutation (lattice isomorphism)."""


class NotRepresentable(PosconvError, ValueError):
    """Index is not reachable from the generators of the semigroup."""


class NonPositiveTime(PosconvError, ValueError):
    pass


class NonCommutingFamily(PosconvError, ValueError):
    pass


class NotInvertible(PosconvError, ValueError):
    pass


class InconsistentHomomorphism(PosconvError, ValueError):
    """Generator values violate a relation between the generators."""


class PrimeInSupport(PosconvError, ValueError):
    """Quotient prime divides an admissible denominator of the group."""


class UnsupportedGroup(PosconvError, ValueError):
    pass


class NotBounded(PosconvError, ValueError):
    pass


class Unbounded(NotBounded):
    pass


class NoQuasiInteriorFixedPoint(PosconvError, ValueError):
    pass


class PreconditionError(PosconvError, ValueError):
    pass


class NoDecay(PosconvError):
    """The singular part of the orbit does not fall below the threshold.

    Attributes
    ----------
    limit : ndarray
        Stagnation vector ``z``, the last computed ``R_t y``.
    super_fixed : bool
        Whether ``T_t z >= z`` holds for the generators (within tolerance).
    """

    def __init__(self, message, limit, super_fixed):
        super().__init__(message)
        self.limit = limit
        self.super_fixed = super_fixed


class NegativeKernelSample(PosconvError, ValueError):
    pass


class NotAmSpace(PosconvError, ValueError):
    pass


class NotIrreducible(PosconvError, ValueError):
    pass


class NotConvergent(PosconvError):
    """Raised when a limit is requested for a representation without a
    convergence certificate."""


class VerdictContradiction(PosconvError, RuntimeError):
    """A convergence verdict was contradicted by simulation."""


class SchemaError(PosconvError, ValueError):
    pass


class UnknownGallery(PosconvError, KeyError):
    pass
