"""Exception and warning types shared across the package."""


class PmstError(Exception):
    """Base class for all errors raised by this package."""


class NotUnit(PmstError):
    """A Bloch vector that must have unit norm does not."""


class NotPure(PmstError):
    """A preparation that must be pure (unit Bloch vector) is not."""


class DimensionMismatch(PmstError):
    """Witness, scenario or table shapes are inconsistent."""


class NoValidWeights(PmstError):
    """The Bloch vectors admit no all-positive null combination."""


class NonExtremal(PmstError):
    """The Bloch vectors do not define an extremal measurement."""


class CoplanarStates(PmstError):
    """Four state vectors span less than three dimensions, so the null
    combination is not unique."""


class IllegitimateGram(PmstError):
    """The optimality conditions produced a non-positive-semidefinite
    Gram matrix, so no measurement directions realize them."""


class DegenerateAdvantage(PmstError):
    """A fixed-outcome measurement beats every genuine one for some
    column, making the matrix unusable as a self-test."""


class RankDeficient(PmstError):
    """The second-order optimality check has deficient rank; the optimal
    Gram matrix is not unique for this choice of scale factors."""


class ZeroSum(PmstError):
    """The weighted sum of the state vectors is already zero, so no
    auxiliary state is needed."""


class MissingPovm(PmstError):
    """An operation requiring a target measurement got a witness
    without one."""


class InvalidK(PmstError):
    """The penalty weight of the extended witness must be positive."""


class OutOfRange(PmstError):
    """A family parameter lies outside its admissible interval."""


class SizeLimit(PmstError):
    """The deterministic-strategy enumeration would be too large."""


class TargetSuboptimal(PmstError):
    """The target configuration does not reach the optimized maximum."""


class CoincidentVectors(UserWarning):
    """Two target Bloch vectors coincide; the corresponding pair column
    is dropped."""


class RankConditionWarning(UserWarning):
    """Fewer states than required for the uniqueness rank condition."""
