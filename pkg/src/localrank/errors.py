"""Exception hierarchy shared across the package.

Three families map onto the CLI's distinct exit codes: bad inputs or
parameters (ValidationError, exit 2), unreadable or malformed files
(FormatError, exit 3), and failures of the numerics themselves
(NumericalError, exit 4).
"""


class LocalRankError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(LocalRankError, ValueError):
    """Invalid data or parameters (non-finite entries, out-of-range J, ...)."""


class FormatError(LocalRankError, ValueError):
    """A matrix file could not be parsed; carries row/column context."""


class NumericalError(LocalRankError, RuntimeError):
    """The computation itself failed (e.g. unusable neighbor graph)."""


class DisconnectedGraphError(NumericalError):
    """K-NN graph split into several components; geodesics are undefined.

    Silently embedding the largest component would break the case
    correspondence the rank measures rely on, so this is always an error.
    """

    def __init__(self, component_sizes):
        self.component_sizes = list(component_sizes)
        sizes = ", ".join(str(s) for s in self.component_sizes)
        super().__init__(
            f"neighbor graph is disconnected: {len(self.component_sizes)} "
            f"components of sizes [{sizes}]; increase K or clean the data"
        )
