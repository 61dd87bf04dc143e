"""Exception types shared across the package."""


class LuqpiError(Exception):
    """Base class for package-specific failures."""


class CapacityError(LuqpiError):
    """Requested work exceeds the configured size budget."""


class MembershipError(LuqpiError):
    """An element is not a member of the expected algebraic structure."""


class InconsistentSampleError(LuqpiError):
    """A labeled sample contradicts the concept class it claims to come from."""


class LearningFailureError(LuqpiError):
    """No informative training data was available."""


class DegenerateDataError(LuqpiError):
    """Training data does not contain enough distinct classes."""


class StratificationError(LuqpiError):
    """A cross-validation fold cannot be stratified."""


class ConvergenceError(LuqpiError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
