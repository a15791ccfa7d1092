"""Exception types raised across the package."""


class ChrononError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(ChrononError):
    pass


class NotPSD(ChrononError):
    pass


class ShapeMismatch(ChrononError):
    pass


class InvalidEffects(ChrononError):
    pass


class NotStochastic(ChrononError):
    pass


class InvalidState(ChrononError):
    pass


class NotCPTP(ChrononError):
    pass


class NonHermitianSot(ChrononError):
    pass


class NotOrthogonal(ChrononError):
    pass


class NotStateLinear(ChrononError):
    pass


class NotPure(ChrononError):
    pass


class NotDaggerPreserving(ChrononError):
    pass


class NotTP(ChrononError):
    pass


class PreconditionViolated(ChrononError):
    pass


class SolveFailed(ChrononError):
    pass


class ClusteringFailed(ChrononError):
    pass


class ParseError(ChrononError):
    pass


class UnknownExample(ChrononError):
    pass
