"""Exception types shared across the solver stack."""


class TrskitError(Exception):
    """Base class for all trskit errors."""


class ParseError(TrskitError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class DimensionMismatch(TrskitError):
    pass


class NotPositiveDefinite(TrskitError):
    def __init__(self, pivot_index):
        self.pivot_index = pivot_index
        super().__init__(f"matrix is not positive definite (pivot {pivot_index} <= 0)")


class ConvergenceFailure(TrskitError):
    pass


class CycleGuardTripped(TrskitError):
    pass


class NotNonconvex(TrskitError):
    """Raised when the estimated minimum eigenvalue is nonnegative, so the
    eigenvalue-shift surrogate would be meaningless."""


class IterationCapExceeded(TrskitError):
    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class BadDirection(TrskitError):
    pass


class ProjectionNotConverged(TrskitError):
    def __init__(self, violation):
        self.violation = violation
        super().__init__(f"projection violation {violation:.3e} above tolerance")


class InfeasibleRegion(TrskitError):
    pass


class MaxItersExceeded(TrskitError):
    def __init__(self, best_point, best_gap):
        self.best_point = best_point
        self.best_gap = best_gap
        super().__init__(f"iteration budget exhausted, best gap estimate {best_gap:.3e}")


class TightnessNotCertified(TrskitError):
    """The convex relaxation value is only a lower bound: constraints are
    present, no boundary-push direction could be certified, and the minimizer
    is strictly inside the unit ball.  Carries the relaxation solution."""

    def __init__(self, solution, diagnostics):
        self.solution = solution
        self.diagnostics = diagnostics
        super().__init__(
            "relaxation not certified tight; "
            f"lower bound {solution.f_value:.12g}"
        )


class HollowConditionViolated(TrskitError):
    pass


class WitnessUnavailable(TrskitError):
    pass


class SpectrumPropertyViolated(TrskitError):
    def __init__(self, t, counts):
        self.t = t
        self.counts = counts
        super().__init__(f"negative-eigenvalue count {counts} unexpected at t={t}")


class DomainError(TrskitError):
    pass


class NoFeasibleGridPoint(TrskitError):
    pass
