"""Exception hierarchy shared by all numerical routines."""


class ZnThomaeError(Exception):
    """Base class for every error raised by this package."""


class CurveInvalid(ZnThomaeError, ValueError):
    pass


class BranchPointProximity(ZnThomaeError, ValueError):
    pass


class TrackingAmbiguity(ZnThomaeError, RuntimeError):
    pass


class OutOfChart(ZnThomaeError, ValueError):
    pass


class EvenBranchPoint(ZnThomaeError, ValueError):
    pass


class PoleCollision(ZnThomaeError, ValueError):
    pass


class ContourDegenerate(ZnThomaeError, ValueError):
    pass


class QuadratureNoConvergence(ZnThomaeError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class SymmetryViolation(ZnThomaeError, RuntimeError):
    pass


class ResidueExtractionUnstable(ZnThomaeError, RuntimeError):
    pass


class InvalidPartition(ZnThomaeError, ValueError):
    pass


class DimensionMismatch(ZnThomaeError, ValueError):
    pass


class NotPositiveDefinite(ZnThomaeError, ValueError):
    pass


class NoneFound(ZnThomaeError, RuntimeError):
    pass


class DenominatorVanishes(ZnThomaeError, ZeroDivisionError):
    pass


class SingularCharacteristic(ZnThomaeError, ValueError):
    pass


class StepUnderflow(ZnThomaeError, RuntimeError):
    pass


class PoleAtBranchPoint(ZnThomaeError, ValueError):
    pass


class BranchCut(ZnThomaeError, ValueError):
    pass


class SeriesSlow(ZnThomaeError, RuntimeError):
    pass


class ConfigInvalid(ZnThomaeError, ValueError):
    pass
