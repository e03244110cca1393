"""Exception hierarchy shared by every verifier package."""

from typing import Iterable


class VerifierError(Exception):
    """Base class for all verifier errors."""


class ContractViolation(VerifierError):
    """A prover or session was used outside the single-query contract."""


class CapacityExceeded(VerifierError, ValueError):
    """A configured simulation or search cap would be exceeded."""


class TriangleCoverError(VerifierError, ValueError):
    """Some vertices lie in no triangle, so no cover exists."""

    def __init__(self, uncovered: Iterable[int]):
        self.uncovered = sorted(set(uncovered))
        super().__init__(f"No triangle contains vertices {self.uncovered}")


class PatternError(VerifierError, ValueError):
    """A measurement pattern is malformed or emitted an invalid basis."""


class ConfigError(VerifierError, ValueError):
    """A configuration or spec file is missing or invalid."""


class InapplicableStrategy(VerifierError):
    """A selftest precondition does not hold for the given strategy."""
