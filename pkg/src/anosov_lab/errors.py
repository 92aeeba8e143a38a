"""Exception hierarchy shared by all modules."""


class AnosovLabError(Exception):
    """Base class for every error raised by the package."""


class NonHyperbolic(AnosovLabError, ValueError):
    """Matrix is not a hyperbolic element of SL(2, Z)."""


class NonOrientable(AnosovLabError, ValueError):
    """Negative-trace automorphism: the suspended bundles are not orientable."""


class NonFinite(AnosovLabError, ValueError):
    pass


class OutOfChart(AnosovLabError):
    """Points too far apart for the local product structure."""


class IncompatibleSpec(AnosovLabError, ValueError):
    pass


class InsufficientGrid(AnosovLabError, ValueError):
    pass


class NonPositiveLambda(AnosovLabError):
    pass


class NotOnLeaf(AnosovLabError):
    """A point expected on an unstable leaf has a stable or flow component."""


class NoConvergence(AnosovLabError):
    pass


class NotSuspension(AnosovLabError, TypeError):
    pass


class SectionMismatch(AnosovLabError):
    pass


class NonPositiveReturn(AnosovLabError):
    pass


class NoSignChange(AnosovLabError):
    pass


class BadScale(AnosovLabError, ValueError):
    pass


class GridMismatch(AnosovLabError, ValueError):
    pass


class NoAccumulation(AnosovLabError):
    pass


class MissingArtifacts(AnosovLabError, FileNotFoundError):
    pass
