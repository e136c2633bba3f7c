# Shared exception types.


class EmptyPolynomial(Exception):
    """Raised when an operation needs a non-zero Laurent polynomial."""


class SingularWeight(Exception):
    """A local Boltzmann weight has a vanishing denominator."""


class IncompatibleSector(Exception):
    """The requested sector does not exist for this system size."""


class NoConvergence(Exception):
    """An iterative solver ran out of iterations.

    Carries (iterations, residual) so callers can report both.
    """

    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations "
                         f"(last residual {residual:.3e})")


class IllConditionedFit(Exception):
    """Linear solve for eigenvalue-curve coefficients is ill conditioned."""


class NonDivisible(Exception):
    """Exact Laurent division left a non-negligible remainder."""

    def __init__(self, remainder_norm):
        self.remainder_norm = remainder_norm
        super().__init__(f"division remainder norm {remainder_norm:.3e}")


class PoleProximity(Exception):
    """Kernel evaluated too close to one of its poles."""


class SingularKMatrix(Exception):
    """k-space kernel matrix singular at some frequency."""


class BranchJump(Exception):
    """A logarithm developed a 2*pi discontinuity during iteration."""


class BranchCut(Exception):
    """Dilogarithm argument fell on the branch cut."""


class OutOfInterval(Exception):
    """Twist angle outside the admissible interval."""


class QuadratureFailure(Exception):
    """Adaptive quadrature did not reach the requested accuracy."""


class DegenerateSequence(Exception):
    """Finite-size estimates not monotone beyond noise level."""


class NumericalBreakdown(Exception):
    """Division by a near-zero difference in sequence acceleration."""
