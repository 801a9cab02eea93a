class MitigationError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MitigationError):
    pass


class NotUnitaryError(MitigationError):
    pass


class DecompositionError(MitigationError):
    pass


class UnresolvedGateError(MitigationError):
    pass


class ChannelError(MitigationError):
    pass


class OptimizerError(MitigationError):
    pass


class ConfigError(MitigationError):
    pass


class CircuitFormatError(MitigationError):
    pass
