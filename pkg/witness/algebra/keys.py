"""
Key inverse table.
Symmetric keys are their own inverse; asymmetric pairs are registered both ways.
"""

from typing import Dict, Iterator, Tuple

from .terms import Atom, Sort, Term


class KeyTable:
    """Involutive map from key names to the names of their inverses."""

    def __init__(self):
        self._inverse: Dict[str, str] = {}

    def add_symmetric(self, name: str) -> None:
        self._inverse[name] = name

    def add_pair(self, name: str, inverse_name: str) -> None:
        self._inverse[name] = inverse_name
        self._inverse[inverse_name] = name

    def inverse_name(self, name: str) -> str:
        # Unregistered keys are treated as symmetric
        return self._inverse.get(name, name)

    def inverse(self, k: Term) -> Term:
        """Inverse of a key term; session and instance tag are carried over."""
        if isinstance(k, Atom) and k.sort is Sort.KEY:
            return Atom(self.inverse_name(k.name), Sort.KEY, k.session, k.tag)
        return k

    def items(self) -> Iterator[Tuple[str, str]]:
        return iter(sorted(self._inverse.items()))

    def __contains__(self, name: str) -> bool:
        return name in self._inverse

    def __len__(self) -> int:
        return len(self._inverse)
