"""Exception hierarchy shared by every module of the package."""


class DarbouxError(Exception):
    """Base class for all errors raised by darboux2l."""


# numerics
class StepUnderflow(DarbouxError, ArithmeticError):
    pass


class NonFiniteState(DarbouxError, ArithmeticError):
    pass


class NonFiniteValue(DarbouxError, ArithmeticError):
    pass


class GridTooCoarse(DarbouxError, ValueError):
    pass


# hypergeom
class PoleAtC(DarbouxError, ValueError):
    pass


class NoConvergence(DarbouxError, ArithmeticError):
    pass


# system
class OutOfRange(DarbouxError, ValueError):
    pass


class SingularPotential(DarbouxError, ArithmeticError):
    pass


# darboux / seeds
class DegenerateP(DarbouxError, ArithmeticError):
    """The p-vector (or q) vanishes, so the transform is singular at this time."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class RealityViolated(DarbouxError, ValueError):
    pass


class InconsistentPair(DarbouxError, ValueError):
    pass


class DegenerateInput(DarbouxError, ValueError):
    pass


# closed forms
class PoleHit(DarbouxError, ArithmeticError):
    pass


class ZeroA(DarbouxError, ArithmeticError):
    pass


# verify
class UnwrapFailure(DarbouxError, ValueError):
    pass


# cli
class UsageError(DarbouxError, ValueError):
    pass
