"""Exception hierarchy. Each error carries the CLI exit code it maps to."""


class InvCurvError(Exception):
    exit_code = 3


class PreconditionError(InvCurvError, ValueError):
    pass


class ThresholdViolation(InvCurvError, ValueError):
    """L <= 3 x0, or equivalently A0 <= (3/2) pi x0^2."""
    exit_code = 2


class DegenerateSpacing(InvCurvError, ValueError):
    pass


class TooFewSamples(InvCurvError, ValueError):
    pass


class NonConvexCurve(InvCurvError, ValueError):
    pass


class FormMismatch(InvCurvError):
    pass


class NoBracket(InvCurvError):
    pass


class AdmissibilityLost(InvCurvError):
    pass


class NewtonStall(InvCurvError):
    pass


class RootNotFound(InvCurvError):
    pass


class SingularForm(InvCurvError):
    pass


class StabilityFailure(InvCurvError):
    exit_code = 4


class MinimalityFailure(InvCurvError):
    exit_code = 5


class SteinerFailure(InvCurvError):
    exit_code = 6


class NotConvex(InvCurvError, ValueError):
    pass


class MultipleApexes(InvCurvError, ValueError):
    pass


class DegenerateCurvature(InvCurvError):
    pass
