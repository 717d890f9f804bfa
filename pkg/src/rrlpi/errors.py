"""Exception and warning types raised across the package."""


class RRLPIError(Exception):
    """Base class for all errors raised by :mod:`rrlpi`."""


class ZeroColumn(RRLPIError, ValueError):
    def __init__(self, index):
        super().__init__(f"sample {index} is the zero vector; cosine similarity undefined")
        self.index = index


class NotSymmetric(RRLPIError, ValueError):
    pass


class NoConvergence(RRLPIError, ArithmeticError):
    def __init__(self, iterations):
        super().__init__(f"QL iteration did not converge after {iterations} sweeps")
        self.iterations = iterations


class IsolatedVertex(RRLPIError, ValueError):
    def __init__(self, index):
        super().__init__(f"vertex {index} has (near) zero degree; generalized problem undefined")
        self.index = index


class SingularSystem(RRLPIError, ArithmeticError):
    pass


class ConstantEmbedding(RRLPIError, ValueError):
    pass


class TooFewPoints(RRLPIError, ValueError):
    pass


class KTooLarge(RRLPIError, ValueError):
    pass


class EmptyGraph(RRLPIError, ValueError):
    pass


class NonEmptyRequired(RRLPIError, ValueError):
    pass


class DimensionMismatch(RRLPIError, ValueError):
    pass


class DomainViolation(RRLPIError, ValueError):
    pass


class RankDeficient(RRLPIError, ValueError):
    pass


class UnsupportedFormat(RRLPIError, ValueError):
    pass


class CorruptFile(RRLPIError, ValueError):
    pass


class DegenerateSpectrumWarning(UserWarning):
    """The second and third smallest eigenvalues coincide; the Fiedler vector is not unique."""
