"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter point lies outside the admissible region."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function (e.g. |z| > 1)."""


class SizeError(ValueError):
    """A requested enumeration is too large."""


class AmbiguityError(ValueError):
    """The free energy has two global minimizers, so the magnetization is undefined."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message: str, last_iterate: float, residual: float):
        super().__init__(f"{message} (last iterate {last_iterate!r}, residual {residual!r})")
        self.last_iterate = last_iterate
        self.residual = residual
