"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ContractForgeError(Exception):
    """Base class for every error raised by this package."""


class IngestError(ContractForgeError):
    """Raw input could not be turned into a data profile."""


class ContractSyntaxError(ContractForgeError):
    """Contract text is not well-formed JSON.

    Carries the 0-based character ``position`` plus 1-based ``line`` and
    ``column`` when they are known.
    """

    def __init__(self, message: str, position: int | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.position = position
        self.line = line
        self.column = column


class InvariantViolation(ContractForgeError):
    """A structurally valid document violates a contract invariant.

    ``invariant`` names the violated invariant so diagnostics can cite it.
    """

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class ExtractionFailure(ContractForgeError):
    """No contract could be recovered from a completion text."""


class BackendTransportError(ContractForgeError):
    """The completion backend could not be reached or answered garbage.

    Distinct from the fallback path: fallback is a successful generation
    outcome, transport failure is not.
    """


class RegistryError(ContractForgeError):
    """Base class for registry failures."""


class NotFoundError(RegistryError):
    """Unknown contract name or version."""


class RegistryTransportError(RegistryError):
    """The registry service could not be reached."""


class RegistryRejection(RegistryError):
    """Publish refused because the candidate is incompatible."""

    def __init__(self, reasons: list[str]):
        self.reasons = list(reasons)
        super().__init__("; ".join(self.reasons) or "incompatible contract")
