"""Message algebra: terms, normal form, substitution and the key inverse table."""

from .keys import KeyTable
from .terms import (
    EMPTY, Atom, Dec, Empty, Enc, Pair, Sort, Term, Variable,
    atoms, enc, items, key, nonce, normalize, pair, payload_atoms, principal,
    render, substitute, subterms, variables,
)

__all__ = [
    'EMPTY', 'Atom', 'Dec', 'Empty', 'Enc', 'Pair', 'Sort', 'Term', 'Variable', 'KeyTable',
    'atoms', 'enc', 'items', 'key', 'nonce', 'normalize', 'pair', 'payload_atoms', 'principal',
    'render', 'substitute', 'subterms', 'variables',
]
