"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
2 for violated preconditions, 3 for exhausted budgets and 4 for broken
invariants (which always indicate a bug).
"""


class BirkhoffLabError(Exception):
    exit_code = 4

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


class PreconditionError(BirkhoffLabError, ValueError):
    exit_code = 2


class BudgetError(BirkhoffLabError):
    exit_code = 3


class InvariantViolation(BirkhoffLabError, AssertionError):
    exit_code = 4


class RationalInput(PreconditionError):
    pass


class PrecisionExhausted(PreconditionError):
    pass


class InsufficientDepth(PreconditionError):
    pass


class UnsupportedExponent(PreconditionError):
    pass


class LevelTooSmall(PreconditionError):
    pass


class NoRoomForBump(PreconditionError):
    pass


class InsufficientK(PreconditionError):
    pass


class SmallDenominator(PreconditionError):
    def __init__(self, k, distance):
        super().__init__(f"frequency {k}: ||k alpha|| = {distance:.3e} is below 1e-12")
        self.k = k
        self.distance = distance


class MeshViolation(PreconditionError):
    pass


class BudgetExceeded(BudgetError):
    pass


class CaseSearchExhausted(BudgetError):
    pass


class DepthUnreachable(BudgetError):
    def __init__(self, k, message=""):
        super().__init__(f"stage {k} unreachable" + (f": {message}" if message else ""))
        self.k = k


class HorizonBudget(BudgetError):
    pass


class PartitionGap(InvariantViolation):
    pass


class CoverMismatch(InvariantViolation):
    pass
