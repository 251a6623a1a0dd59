"""Exception hierarchy for chain validation and analysis failures.

Every error raised by the library derives from :class:`ChainError`, so
callers (and the CLI) can distinguish "your input violates a structural
precondition" from genuine bugs.  :class:`RouteRefusal` marks the one case
where an otherwise valid input is rejected by a particular computation
route (the autocovariance series on a periodic chain).
"""


class ChainError(ValueError):
    """Base class for all structural and numerical input errors."""


class DimensionMismatch(ChainError):
    """Operands are defined on state spaces of different sizes."""


class NonPositiveWeight(ChainError):
    """A distribution weight is zero or negative."""


class TooFewStates(ChainError):
    """A state space needs at least two states."""


class InvalidDistribution(ChainError):
    """Probability vector entries do not sum to one within tolerance."""


class NotRowStochastic(ChainError):
    """Matrix has a negative entry or a row that does not sum to one."""


class NotReversible(ChainError):
    """Detailed balance fails beyond tolerance for the given distribution."""


class NotIrreducible(ChainError):
    """The positive-transition graph is not strongly connected."""


class NotStationary(ChainError):
    """The given distribution is not invariant for the matrix."""


class SingularSystem(ChainError):
    """A linear solve failed numerically."""


class RouteRefusal(ChainError):
    """A computation route declines the input; another route may work."""


class PeriodicChain(RouteRefusal):
    """The autocovariance series is invalid on a periodic chain."""


class BadStartState(ChainError):
    """Simulation start state is outside the state space."""


class NoNegativeEigenvalue(ChainError):
    """Witness search requires a negative gap eigenvalue."""


class NotStrictlyPositive(ChainError):
    """Operator must have strictly positive spectrum."""


class BadComponentIndex(ChainError):
    """Component index is outside 1..number of components."""


class NotReversibleForConditional(ChainError):
    """A block kernel is not reversible for its conditional distribution."""


class StructureMismatch(ChainError):
    """Two composite objects do not share the same block structure."""


class BadWeights(ChainError):
    """Mixture weights must be strictly positive and sum to one."""


class BadMixingProbability(ChainError):
    """Mixing probability must lie strictly between 0 and 1."""


class NotIrreducibleMixture(ChainError):
    """A combined chain must be irreducible for dominance conclusions."""


class ChainFileError(ChainError):
    """A chain file failed to parse."""
