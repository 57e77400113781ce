"""Exception types shared across the package."""


class MdkernError(Exception):
    pass


class ValidationError(MdkernError, ValueError):
    """Input violates a documented precondition."""


class SizeError(ValidationError):
    """Label set is larger than the configured enumeration cap."""


class EmbeddingError(MdkernError):
    """The Gram matrix of a kernel has an eigenvalue below the tolerance window."""

    def __init__(self, message, eigenvalue):
        super().__init__(message)
        self.eigenvalue = float(eigenvalue)


class SolverError(MdkernError):
    """The LP solver could not reach a trustworthy verdict."""


class EstimatorError(MdkernError):
    pass
