"""Exception types raised by spinclone."""


class InvalidDimensionError(ValueError):
    """Hilbert space dimension below 2 (or otherwise unusable)."""


class EigenSolverError(ArithmeticError):
    pass


class DegeneracyDeficitError(ArithmeticError):
    """The top eigenspace has fewer than ``d`` vectors, so no isometry fits in it."""

    def __init__(self, dim, multiplicity):
        self.dim = dim
        self.multiplicity = multiplicity
        super().__init__(
            f"top eigenspace for d={dim} has multiplicity {multiplicity} < {dim}"
        )


class ConstraintInfeasibleError(ArithmeticError):
    """The Gram (isometry) condition has no PSD solution in the top eigenspace."""

    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (best residual {residual:.3e})")


class DimensionOverflowError(MemoryError):
    """Refuse to build a dense d^3 x d^3 object above the configured ceiling."""

    def __init__(self, dim, limit):
        self.dim = dim
        self.limit = limit
        super().__init__(
            f"d={dim} exceeds the dense d^3 ceiling (d <= {limit}, "
            f"matrix would be {dim**3}x{dim**3})"
        )


class FitError(ValueError):
    pass
