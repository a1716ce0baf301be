"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: ValidationError -> 2,
CapacityError -> 3, VerificationFailure -> 1.
"""


class ValidationError(ValueError):
    """Bad input: malformed files, broken invariants, dimension mismatches."""


class IncompleteSampleError(ValidationError):
    """The data contain a missing value; every formula here requires a complete sample."""


class AlgebraError(ValidationError):
    """Model-sum or loss-sum applied to incompatible operands."""


class CapacityError(RuntimeError):
    """A candidate-parent set or decision tree exceeds the configured cap."""


class VerificationFailure(RuntimeError):
    """An oracle-equivalence suite found a mismatch."""
