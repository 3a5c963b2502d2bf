"""Exception hierarchy for cdkit."""


class CdkitError(Exception):
    """Base class for all cdkit errors."""


class MeasureError(CdkitError):
    """Invalid measure description (wrong support, bad atoms, bad params)."""


class InsufficientAtomsError(MeasureError):
    """The atomic measure has too few atoms for the requested degree."""


class CoarseMeasureError(CdkitError):
    """Discretization exhausted: norms collapsed or |alpha| reached 1."""


class ConfluentPointsError(CdkitError):
    """CD formula requested at (numerically) confluent points."""


class IllConditionedError(CdkitError):
    """Residual-based acceptance failed (e.g. ABC moment inversion)."""


class DegreeError(CdkitError):
    """Requested degree exceeds what the coefficient data supports."""


class OverflowFlag(CdkitError):
    """Polynomial values exceeded 1e300 (far off-support at large degree)."""
