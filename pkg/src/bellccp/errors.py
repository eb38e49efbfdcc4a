"""Exception types shared across the package.

The CLI maps these onto exit codes, so solver code should raise the most
specific type that applies rather than bare ValueError/RuntimeError.
"""


class BellCcpError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(BellCcpError, ValueError):
    """A file does not conform to the documented on-disk format."""


class InvalidFunctionalError(BellCcpError, ValueError):
    """An operation required a valid Bell functional but validation failed.

    Carries the validation report in ``violations``.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid Bell functional: {lines}")


class DimensionMismatchError(BellCcpError, ValueError):
    """Objects passed to an operation do not share compatible dimensions."""


class EnumerationCapError(BellCcpError, RuntimeError):
    """An exact enumeration would exceed the configured cap."""


class NumericalBreakdownError(BellCcpError, RuntimeError):
    """A solver detected numerically inconsistent behaviour (e.g. a
    fixed-point iteration whose objective decreases, or a correlator table
    with a large imaginary residual)."""


class MarginalUniformityError(BellCcpError, RuntimeError):
    """Alice's local outcome distribution is not uniform, so the
    entangled-to-preparation construction is not guaranteed to be valid."""

    def __init__(self, worst_deviation, tol):
        self.worst_deviation = worst_deviation
        self.tol = tol
        super().__init__(
            f"nonuniform local marginals: worst deviation {worst_deviation:.3e} "
            f"exceeds tolerance {tol:.3e} (pass force=True to renormalize anyway)"
        )
