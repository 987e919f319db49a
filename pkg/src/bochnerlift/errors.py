"""Exception hierarchy shared by all modules."""


class BochnerLiftError(Exception):
    """Base class for every error raised by the package."""


class UnsupportedOrder(BochnerLiftError, ValueError):
    pass


class DivergentKernel(BochnerLiftError):
    pass


class NegativeKernel(BochnerLiftError):
    pass


class TailDivergence(BochnerLiftError):
    pass


class QuadratureFailure(BochnerLiftError):
    pass


class OscillatoryQuadratureFailure(QuadratureFailure):
    pass


class SingularQuadratureFailure(QuadratureFailure):
    pass


class AliasingError(BochnerLiftError):
    pass


class InsufficientSmoothness(BochnerLiftError):
    pass


class MissingNormalDerivative(BochnerLiftError):
    pass


class NonIntegrable(BochnerLiftError):
    pass


class PositivityFailure(BochnerLiftError):
    pass


class EmptyK0(BochnerLiftError):
    pass


class NotSupersolution(BochnerLiftError):
    pass


class NotSubsolution(BochnerLiftError):
    pass
