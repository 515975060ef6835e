"""
Witness-function secrecy analyzer.

Proves that a cryptographic protocol keeps its secrets by checking that the
security level of every atom a role sends is at least the level it had when
the role received it, using static bounds of a witness function.

Components:
- algebra: message terms and key inverses
- lattice: security levels and the typing context
- protocol: parsing, validation and generalized roles
- analysis: safe functions, unification and the growth check
- oracle: bounded intruder deduction and trace simulation
"""

from .errors import (
    DuplicateDeclaration, MissingLevel, NotPresent, ProtocolParseError, ProtocolSyntaxError,
    ResourceBound, SortMismatch, UndeclaredSymbol, WitnessError,
)

__version__ = "1.0.0"

__all__ = [
    'DuplicateDeclaration', 'MissingLevel', 'NotPresent', 'ProtocolParseError', 'ProtocolSyntaxError',
    'ResourceBound', 'SortMismatch', 'UndeclaredSymbol', 'WitnessError',
]
