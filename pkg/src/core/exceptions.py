class ChaosmarkError(Exception):
    pass


class DataFormatError(ChaosmarkError):
    pass


class PreconditionError(ChaosmarkError):
    pass


class LengthMismatchError(PreconditionError):
    pass


class DimensionMismatchError(PreconditionError):
    pass


class MissingMscError(PreconditionError):
    pass


class InsufficientStrategyError(PreconditionError):
    pass
