class ScflowError(Exception):
    """Base class for all package errors."""


class DimensionError(ScflowError, ValueError):
    pass


class IncompatibleStructure(ScflowError, ValueError):
    """(omega, g) do not define an almost-hermitian structure."""


class NotALieAlgebra(ScflowError, ValueError):
    pass


class InvalidDatum(ScflowError, ValueError):
    """A family datum violates its defining invariants."""


class NotInvariantFamily(ScflowError, ValueError):
    """The reduced bracket flow is only defined on invariant families."""


class NonConvergence(ScflowError, RuntimeError):
    pass


class ShorthandSyntaxError(ScflowError, ValueError):
    def __init__(self, message, text, position):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")
