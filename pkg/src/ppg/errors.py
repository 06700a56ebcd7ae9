"""
Exception hierarchy for the PPG governance engine.

Every error raised by the package derives from PPGError so callers can catch
the whole family at once, while the leaf classes name the exact protocol
condition that failed.
"""

from typing import Any, Optional


class PPGError(Exception):
    """Base exception for all PPG errors.

    This exception carries an optional ``detail`` payload (a field name, an
    index, a line number...) that is appended to the string form.
    """

    def __init__(self, message: str, detail: Optional[Any] = None):
        """Initialize the exception.

        Args:
            message: Error message
            detail: Structured detail about the failure if available
        """
        super().__init__(message)
        self.detail = detail

    def __str__(self) -> str:
        """Return string representation of the exception."""
        base_msg = super().__str__()
        if self.detail is not None:
            return f"{base_msg} (Detail: {self.detail})"
        return base_msg


class ConfigurationError(PPGError):
    """Configuration could not be loaded or is invalid."""


class EmptyQList(PPGError):
    """A sweep was requested over an empty list of quorum values."""


# core

class GovernanceError(PPGError):
    """Errors raised by the governance state machine."""


class MissingField(GovernanceError):
    """A required proposal field is absent or empty."""


class MalformedImpactInputs(GovernanceError):
    """Impact inputs attached to a draft are not well-formed."""


class IllegalTransition(GovernanceError):
    """The (state, event) pair is not a row of the transition table."""


class NotInVotingState(GovernanceError):
    pass


class DuplicateNullifier(GovernanceError):
    """The participation nullifier was already consumed for this decision."""


class VetoWindowClosed(GovernanceError):
    pass


class TallyMismatch(GovernanceError):
    """An externally supplied tally disagrees with the recorded votes."""


# metrics

class MetricsError(PPGError):
    pass


class WeightSumViolation(MetricsError):
    pass


class NonPositiveBaseline(MetricsError):
    pass


class SigmaOutOfRange(MetricsError):
    pass


class ZeroEligiblePopulation(MetricsError):
    pass


class ComponentOutOfRange(MetricsError):
    pass


# identity

class IdentityError(PPGError):
    pass


class AttestationRejected(IdentityError):
    pass


class DuplicateCommitment(IdentityError):
    """Two credentials produced the same commitment; the RNG is broken."""


class EmptyRegistry(IdentityError):
    pass


class NotEligible(IdentityError):
    pass


class NullifierAlreadyConsumed(IdentityError):
    pass


# ledger

class LedgerError(PPGError):
    pass


class SerializationFailure(LedgerError):
    pass


class SigningFailure(LedgerError):
    pass


class IndexOutOfRange(LedgerError):
    pass


class MalformedFilter(LedgerError):
    pass


class LedgerFormatError(LedgerError):
    """A ledger file line could not be parsed into an entry."""


class LedgerFileExists(LedgerError):
    """A new ledger was pointed at a file that already holds entries."""


# sim

class SimulationError(PPGError):
    pass


class InvalidSimConfig(SimulationError):
    pass


class EmptyResults(SimulationError):
    pass


# gametheory

class GameTheoryError(PPGError):
    pass


class DomainViolation(GameTheoryError):
    pass


class PreconditionViolation(GameTheoryError):
    pass


# runtime

class RuntimeScenarioError(PPGError):
    pass


class ParseError(RuntimeScenarioError):
    """A scenario line could not be parsed; ``detail`` is the line number."""


class NoDecisions(RuntimeScenarioError):
    pass
