"""Exception hierarchy for the workbench.

Every error raised on purpose derives from :class:`WorkbenchError`, so callers
(and the CLI) can separate input problems from genuine bugs.
"""


class WorkbenchError(Exception):
    pass


class DescriptorError(WorkbenchError):
    """A descriptor is malformed or its recursion does not terminate."""


class PreconditionError(WorkbenchError):
    pass


class ZeroWeightError(WorkbenchError, ZeroDivisionError):
    """A weight vanished where it is used as a denominator."""

    def __init__(self, n, what="weight"):
        super().__init__(f"{what} is zero at checkpoint n={n}")
        self.n = n


class HorizonError(WorkbenchError):
    """A stream or table ran out before the requested index."""


class InconclusiveError(WorkbenchError):
    def __init__(self, message, stall_index=None):
        super().__init__(message)
        self.stall_index = stall_index


class NoWitnessError(WorkbenchError):
    """A construction could not find the witnesses its proof consumes."""


class NotApplicableError(NoWitnessError):
    pass


class ConstructionStallError(WorkbenchError):
    def __init__(self, inequality, step):
        super().__init__(f"step {step}: no value satisfies {inequality} below horizon")
        self.inequality = inequality
        self.step = step


class CatalogLookupError(WorkbenchError, KeyError):
    pass


class InputError(WorkbenchError):
    """Caller-supplied data is incomplete (for example a map undefined on a needed point)."""
