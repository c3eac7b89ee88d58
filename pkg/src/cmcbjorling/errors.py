"""Exception hierarchy shared by all modules."""


class CMCError(Exception):
    """Base class for every error raised by the package."""


class NumericFailure(CMCError):
    """A numerical stage could not produce a result within tolerance."""


class NearSingularLoop(NumericFailure):
    pass


class NoConvergence(NumericFailure):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class NotInBigCell(NumericFailure):
    pass


class StructureViolation(NumericFailure):
    pass


class StepFailure(NumericFailure):
    pass


class NonUnitaryFrame(NumericFailure):
    pass


class FrameDiscontinuity(NumericFailure):
    pass


class GridTooCoarse(NumericFailure):
    pass


class RegularityLoss(NumericFailure):
    pass


class OutOfDomain(CMCError, ValueError):
    pass


class SingularCenter(OutOfDomain):
    pass


class NonRegularCurve(CMCError, ValueError):
    pass


class InvalidData(CMCError, ValueError):
    """Björling data or configuration violates a stated invariant."""


class UnknownExample(CMCError, KeyError):
    pass
