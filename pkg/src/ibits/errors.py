"""Exception types shared by all ibits modules."""


class ShapeError(ValueError):
    """Operands have incompatible or unexpected dimensions."""


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class CapacityError(RuntimeError):
    """A requested size exceeds a hard capacity guard."""


class ConsistencyError(ArithmeticError):
    """A quantity came out more negative than floating-point dust allows."""
