"""Exception hierarchy."""


class HamiltonianError(Exception):
    """Base class for all errors raised by :mod:`hamext`."""


class DimensionError(HamiltonianError, ValueError):
    """Array shapes are inconsistent with the block size or the interval."""


class WeightError(HamiltonianError, ValueError):
    """A weight block is not Hermitian positive semi-definite."""


class SingularityError(HamiltonianError, ArithmeticError):
    """``I - A(t)`` or ``I - D(t)`` is (numerically) singular, so propagation is impossible."""

    def __init__(self, msg, site=None):
        super().__init__(msg)
        self.site = site


class DefinitenessError(HamiltonianError):
    """The window Gram matrix is singular: the definiteness surrogate fails."""


class MembershipError(HamiltonianError):
    """An element is not contained in the relation it was claimed to belong to."""


class ContainmentError(HamiltonianError):
    """One subspace was expected to lie inside another but does not."""

    def __init__(self, msg, max_angle=None):
        super().__init__(msg)
        self.max_angle = max_angle


class ResidualError(HamiltonianError):
    """A trajectory does not solve the system it was supplied for."""
