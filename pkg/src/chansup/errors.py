"""Exception hierarchy shared by every module."""


class ChansupError(Exception):
    """Base class for all library errors."""


class DimensionError(ChansupError, ValueError):
    """Operand shapes or declared dimensions do not fit together."""


class ContractError(ChansupError, ValueError):
    """An input violates a documented precondition (Hermiticity, unitarity, ...)."""


class InvalidChannelError(ChansupError, ValueError):
    """Kraus operators with sum E^dag E not bounded by the identity."""


class NotAChannelError(ChansupError, ValueError):
    """A matrix offered as a Choi matrix is not positive semidefinite."""


class UnsupportedConversionError(ChansupError, ValueError):
    pass


class InvalidPhaseError(ChansupError, ValueError):
    """Phases that do not produce a unitary maximally superposed operation."""


class ZeroProbabilityBranchError(ChansupError, ValueError):
    pass


class UnsupportedTargetError(ChansupError, ValueError):
    pass


class ProtocolInconsistencyError(ChansupError, RuntimeError):
    """A simulated protocol produced ancilla states that are not orthonormal."""


class ParseError(ChansupError, ValueError):
    """Malformed input file; ``line`` and ``col`` locate the problem when known."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.line = line
        self.col = col
