"""
Exception hierarchy for the selmer package.

Every error raised on bad input derives from SelmerError, which is itself a
ValueError, so callers that only care about "bad arguments" can keep catching
ValueError the way the CLI layer does.
"""


class SelmerError(ValueError):
    """Base class for all domain errors."""


class DimensionMismatchError(SelmerError):
    """Operands live in spaces of different dimension."""


class DegenerateFormError(SelmerError):
    """Gram matrix is not symmetric or not invertible over F2."""


class WittPreconditionError(SelmerError):
    """
    A hypothesis of the Witt extension does not hold.

    Attributes:
        hypothesis: "isometry" or "canonical-vector"
    """

    def __init__(self, hypothesis: str, message: str) -> None:
        super().__init__(f"{hypothesis} hypothesis fails: {message}")
        self.hypothesis = hypothesis


class InadmissibleError(SelmerError):
    """Malformed parameters: out-of-range dimension, k, flag or label."""


class OppositeParityError(SelmerError):
    """W and W' have dimensions of opposite parity."""


class NotIsotropicError(SelmerError):
    """Subspace is not totally isotropic."""


class NotMaximalError(SelmerError):
    """Totally isotropic subspace has the wrong dimension to be maximal."""


class OutsideSupportError(SelmerError):
    """Parameters are well-formed but the event has probability zero."""


class SupportMismatchError(SelmerError):
    """Empirical outcomes fall outside the support of the exact distribution."""


class RealFormsOnlyError(SelmerError):
    """Operation is defined only for forms with positive discriminant."""


class ResourceLimitError(SelmerError):
    """Requested computation exceeds the supported desk-scale bounds."""


class CheckFailedError(SelmerError):
    """A verification (identity, mass formula, Monte-Carlo comparison) failed."""
