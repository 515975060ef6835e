"""
Seeded random terms over a small fixed vocabulary, with a typing context
that declares every key and nonce of that vocabulary.
"""

import random
from itertools import count
from typing import List

from witness.algebra.keys import KeyTable
from witness.algebra.terms import EMPTY, Atom, Enc, Pair, Sort, Term, Variable, normalize
from witness.lattice.context import TypingContext
from witness.lattice.levels import BOTTOM, SecurityLevel

PRINCIPALS = ("A", "B", "S", "C")
NONCE_LEVELS = {
    "n1": SecurityLevel.of("A", "B"),
    "n2": SecurityLevel.of("A", "B", "S"),
    "n3": BOTTOM,
}
KEY_LEVELS = {
    "k1": SecurityLevel.of("A", "B"),
    "k2": SecurityLevel.of("A", "S"),
    "k3": SecurityLevel.of("B", "S"),
    "k4": BOTTOM,
}


def vocabulary_context() -> TypingContext:
    table = KeyTable()
    for name in KEY_LEVELS:
        table.add_symmetric(name)
    return TypingContext({**NONCE_LEVELS, **KEY_LEVELS}, table)


def nonces() -> List[Atom]:
    return [Atom(name, Sort.NONCE) for name in NONCE_LEVELS]


class TermGenerator:
    """Random terms; the same seed always yields the same terms."""

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def atom(self) -> Atom:
        kind = self.rng.choice(("principal", "nonce", "nonce"))
        if kind == "principal":
            return Atom(self.rng.choice(PRINCIPALS), Sort.PRINCIPAL)
        return Atom(self.rng.choice(tuple(NONCE_LEVELS)), Sort.NONCE)

    def key(self) -> Atom:
        return Atom(self.rng.choice(tuple(KEY_LEVELS)), Sort.KEY)

    def term(self, depth: int = 3) -> Term:
        if depth == 0 or self.rng.random() < 0.3:
            return self.atom()
        if self.rng.random() < 0.5:
            return normalize(Pair(self.term(depth - 1), self.term(depth - 1)))
        return normalize(Enc(self.term(depth - 1), self.key()))

    def terms(self, count: int, depth: int = 3) -> List[Term]:
        return [self.term(depth) for _ in range(count)]

    def raw_term(self, depth: int = 3) -> Term:
        """Unnormalized closed term: pairs nest either way and may hold the empty message."""
        roll = self.rng.random()
        if depth == 0 or roll < 0.2:
            return self.atom()
        if roll < 0.3:
            return EMPTY
        if roll < 0.65:
            return Pair(self.raw_term(depth - 1), self.raw_term(depth - 1))
        return Enc(self.raw_term(depth - 1), self.key())

    def abstract(self, m: Term, prefix: str = "X", rate: float = 0.3) -> Term:
        """``m`` with random payload subterms replaced by variables ``X1``, ``X2``, ...

        Key positions are kept. The result is not normalized again.
        """
        names = count(1)

        def walk(t: Term) -> Term:
            if t != EMPTY and self.rng.random() < rate:
                return Variable(f"{prefix}{next(names)}")
            if isinstance(t, Pair):
                return Pair(walk(t.left), walk(t.right))
            if isinstance(t, Enc):
                return Enc(walk(t.body), t.key)
            return t

        return walk(m)
