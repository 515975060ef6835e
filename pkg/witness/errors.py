"""
Exception hierarchy for the witness-function analyzer.
Library code raises these; only the command-line layer turns them into exit codes.
"""

from typing import Optional


class WitnessError(Exception):
    """Base class for every error raised by the analyzer."""


# ============================================================================
# PROTOCOL FILE ERRORS
# ============================================================================

class ProtocolParseError(WitnessError):
    """A protocol or context file could not be read."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        if self.column is None:
            return f"line {self.line}: {self.message}"
        return f"line {self.line}, column {self.column}: {self.message}"


class ProtocolSyntaxError(ProtocolParseError):
    """Malformed line or term."""


class UndeclaredSymbol(ProtocolParseError):
    """A name is used before being declared as agent, key or fresh value."""


class DuplicateDeclaration(ProtocolParseError):
    """A name is declared twice."""


# ============================================================================
# ANALYSIS ERRORS
# ============================================================================

class SortMismatch(WitnessError):
    """A substitution puts a term of the wrong sort into a sorted slot."""


class MissingLevel(WitnessError):
    """A key needed to decide protection has no declared security level."""

    def __init__(self, atom):
        self.atom = atom
        super().__init__(f"no security level declared for {atom}")


class NotPresent(WitnessError):
    """The analyzed atom occurs neither in the static part nor in any variable image."""


class ResourceBound(WitnessError):
    """A configured size cap of the intruder oracle was exceeded."""
