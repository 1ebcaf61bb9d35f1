"""Exception hierarchy.

Every domain failure derives from :class:`SchedulingError` so the CLI can map
them to a single exit code.
"""


class SchedulingError(Exception):
    """Base class for domain errors."""


class IncompatiblePairError(SchedulingError):
    """A task was placed on a pool with compatibility coefficient 0."""


class InvalidInstanceError(SchedulingError):
    """The instance violates a structural invariant."""


class DeadlockError(SchedulingError):
    """A simulation reached a state where nothing can be dispatched or released."""


class InfeasibleOrderError(SchedulingError):
    """A schedule order is not in the feasible order space."""


class InfeasibleScheduleError(SchedulingError):
    """A schedule violates a constraint where a feasible one was required."""


class IncompleteSequenceError(SchedulingError):
    """An action sequence does not cover every task exactly once."""


class MalformedRolloutError(SchedulingError):
    """An extended action sequence is not a valid rollout for the instance."""


class InfeasibleTargetError(SchedulingError):
    """A target rollout contains an action that is masked when replayed."""


class SizeCapError(SchedulingError):
    """An exhaustive routine was called on an instance above its size cap."""


class ModeMismatchError(SchedulingError):
    """The requested MILP mode does not apply to the instance."""


class MalformedSolutionError(SchedulingError):
    """A MILP solution does not assign every task to exactly one pool."""


class ProfileError(SchedulingError):
    """A heterogeneity profile cannot produce a valid instance."""


class UnknownMethodError(SchedulingError):
    """A benchmark or CLI method name is not recognised."""
