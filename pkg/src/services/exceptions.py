from src.core.exceptions import PreconditionError


class CapacityExceededError(PreconditionError):
    def __init__(self, n: int, m: int):
        super().__init__(
            f"watermark of N={n} bits does not fit in M={m} least significant "
            "coefficients"
        )
        self.n = n
        self.m = m


class PositionExhaustedError(PreconditionError):
    pass


class MissingOriginalError(PreconditionError):
    pass


class AttackParameterError(PreconditionError):
    pass
