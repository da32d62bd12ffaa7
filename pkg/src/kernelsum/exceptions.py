"""Exception types raised across the package."""


class KernelSumError(Exception):
    """Base class for all errors raised by kernelsum."""


class DomainError(KernelSumError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConvergenceError(KernelSumError, ArithmeticError):
    """A series or quadrature did not reach the requested accuracy.

    The best available approximation is kept in ``partial`` so callers can
    inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConfigurationError(KernelSumError, ValueError):
    """Parameters cannot produce a valid setup (empty coefficient set, ...)."""


class ContractError(KernelSumError, ValueError):
    """Inputs violate a documented precondition of the operation."""


class UnsupportedKernelError(KernelSumError, NotImplementedError):
    """The kernel has no implementation for the requested method."""


class OracleBudgetError(KernelSumError, RuntimeError):
    """The exact reference sum would exceed the configured work budget."""
