"""Error types shared across the package."""


class MonfermiError(Exception):
    """Base class for errors raised by this package."""


class ForbiddenOutcomeError(MonfermiError, ValueError):
    """A projective measurement outcome with (numerically) zero probability was requested."""


class CapacityError(MonfermiError, ValueError):
    """A brute-force routine was asked for a system size beyond its design capacity."""


class NumericalError(MonfermiError, RuntimeError):
    """A linear-algebra or consistency check failed; the message carries diagnostics."""


class NoSolutionError(MonfermiError, ValueError):
    """A root solve has no solution in the admissible domain."""


class InfeasibleLevelError(MonfermiError, ValueError):
    """A requested level set lies outside the range of the boundary function."""
