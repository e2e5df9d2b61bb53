"""Exception hierarchy for bergman_ops."""


class BergmanOpsError(ValueError):
    """Base class for invalid inputs."""


class ConstantTermOutsideDisk(BergmanOpsError):
    pass


class InvalidAlpha(BergmanOpsError):
    pass


class PointOutsideDisk(BergmanOpsError):
    pass


class InvalidOrder(BergmanOpsError):
    pass


class WindowTooShort(BergmanOpsError):
    pass


class Inadmissible(BergmanOpsError):
    """The symbol fails the sufficient self-map bound."""


class SampleOutsideDomain(BergmanOpsError):
    pass


class PathDisagreement(RuntimeError):
    """Two independent computation paths of the same quantity disagree.

    This signals an implementation bug rather than a mathematical failure.
    """
