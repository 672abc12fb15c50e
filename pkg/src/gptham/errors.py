"""Exception types shared across the package."""


class GptHamError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(GptHamError, ValueError):
    """Inputs have incompatible or unsupported dimensions."""


class InvalidBasisError(GptHamError, ValueError):
    """Operator basis fails Hermiticity/tracelessness/orthogonality checks."""


class NotAStateError(GptHamError, ValueError):
    """A reconstructed density matrix has a negative eigenvalue.

    Carries the offending minimum eigenvalue in ``min_eigenvalue``.
    """

    def __init__(self, message: str, min_eigenvalue: float | None = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NonMonotoneGridError(GptHamError, ValueError):
    """Time grid is not strictly increasing from zero."""


class SymmetryError(GptHamError, ValueError):
    """Vertex set unsuitable for symmetry enumeration (off-origin centroid,
    degenerate span, ...)."""


class UnsupportedSpaceError(GptHamError, ValueError):
    """Operation needs symmetry metadata the state space does not carry."""


class InvalidTimeError(GptHamError, ValueError):
    """Requested time is not on the discrete lattice ``n * minimal_time``."""

    def __init__(self, message: str, minimal_time: float | None = None):
        super().__init__(message)
        self.minimal_time = minimal_time


class NoAdmissibleEvolutionError(GptHamError, ValueError):
    """The state space admits no evolution at all for this Hamiltonian."""


class InconsistentCycleError(GptHamError, ValueError):
    """Relative-energy equations contain a contradictory cycle."""


class DisconnectedGraphError(GptHamError, ValueError):
    """Relative-energy pair graph does not connect all levels."""
