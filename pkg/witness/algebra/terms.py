"""
Message algebra for protocol analysis.
Atoms, variables, pairing and encryption, with the normal form that cancels
decryption against the matching encryption.
"""

from abc import ABC
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional, Set, TYPE_CHECKING

from ..errors import SortMismatch

if TYPE_CHECKING:
    from .keys import KeyTable


class Sort(str, Enum):
    """Sorts of atomic names. ANY is only used as a variable constraint."""

    PRINCIPAL = "principal"
    NONCE = "nonce"
    KEY = "key"
    ANY = "any"


class Term(ABC):
    """Base class of every message."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Term):
    """An indivisible name.

    ``session`` is the symbolic session of a fresh value (the i in N_b^i).
    ``tag`` marks an instantiation parameter (A_1, kas_2) that unification may bind.
    """

    name: str
    sort: Sort
    session: Optional[str] = None
    tag: Optional[int] = None

    @property
    def is_parameter(self) -> bool:
        return self.tag is not None

    def base(self) -> "Atom":
        """The declared atom this one instantiates (tag removed)."""
        if self.tag is None:
            return self
        return Atom(self.name, self.sort, self.session)


@dataclass(frozen=True)
class Variable(Term):
    name: str
    sort: Sort = Sort.ANY

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Enc(Term):
    body: Term
    key: Term


@dataclass(frozen=True)
class Dec(Term):
    """Decryption. Only exists until normalization cancels it."""

    body: Term
    key: Term


@dataclass(frozen=True)
class Empty(Term):
    """The neutral message."""

    def __str__(self) -> str:
        return "ε"


EMPTY = Empty()

Substitution = Mapping[Term, Term]


# ============================================================================
# CONSTRUCTION
# ============================================================================

def pair(*items: Term) -> Term:
    """Right-nested concatenation of ``items``, normalized."""
    if not items:
        return EMPTY
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Pair(item, result)
    return normalize(result)


def enc(body: Term, key: Term) -> Term:
    _check_key_slot(key)
    return normalize(Enc(body, key))


def principal(name: str, tag: Optional[int] = None) -> Atom:
    return Atom(name, Sort.PRINCIPAL, tag=tag)


def nonce(name: str, session: Optional[str] = None, tag: Optional[int] = None) -> Atom:
    return Atom(name, Sort.NONCE, session, tag)


def key(name: str, session: Optional[str] = None, tag: Optional[int] = None) -> Atom:
    return Atom(name, Sort.KEY, session, tag)


# ============================================================================
# NORMAL FORM
# ============================================================================

def normalize(m: Term, keys: Optional["KeyTable"] = None) -> Term:
    """Return the normal form of ``m``.

    Concatenations are flattened and rebuilt right-nested, the neutral message
    is dropped from composite terms, and dec(enc(x, k), k^-1) becomes x when a
    key table is given.
    """
    if isinstance(m, Pair):
        parts = [p for p in _items(normalize(m.left, keys)) + _items(normalize(m.right, keys))
                 if p != EMPTY]
        if not parts:
            return EMPTY
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = Pair(part, result)
        return result
    if isinstance(m, Enc):
        body = normalize(m.body, keys)
        if body == EMPTY:
            return EMPTY
        return Enc(body, normalize(m.key, keys))
    if isinstance(m, Dec):
        body = normalize(m.body, keys)
        dec_key = normalize(m.key, keys)
        if isinstance(body, Enc) and keys is not None and keys.inverse(body.key) == dec_key:
            return body.body
        if body == EMPTY:
            return EMPTY
        return Dec(body, dec_key)
    return m


def _items(m: Term) -> List[Term]:
    if isinstance(m, Pair):
        return _items(m.left) + _items(m.right)
    return [m]


def items(m: Term) -> List[Term]:
    """Components of a concatenation, left to right."""
    return _items(m)


# ============================================================================
# TRAVERSAL
# ============================================================================

def subterms(m: Term) -> Iterator[Term]:
    """Every subterm of ``m``, including ``m`` and encryption keys, pre-order."""
    yield m
    if isinstance(m, Pair):
        yield from subterms(m.left)
        yield from subterms(m.right)
    elif isinstance(m, (Enc, Dec)):
        yield from subterms(m.body)
        yield from subterms(m.key)


def atoms(m: Term) -> Set[Atom]:
    """Every atom of ``m`` at any depth, key positions included."""
    return {t for t in subterms(m) if isinstance(t, Atom)}


def variables(m: Term) -> Set[Variable]:
    return {t for t in subterms(m) if isinstance(t, Variable)}


def ordered_symbols(m: Term) -> List[Term]:
    """Atoms and variables of ``m`` in order of first occurrence, without repeats."""
    seen: Dict[Term, None] = {}
    for t in subterms(m):
        if isinstance(t, (Atom, Variable)) and t not in seen:
            seen[t] = None
    return list(seen)


def payload_atoms(m: Term) -> Set[Atom]:
    """Atoms of ``m`` that occur outside encryption-key positions."""
    found: Set[Atom] = set()

    def walk(t: Term) -> None:
        if isinstance(t, Atom):
            found.add(t)
        elif isinstance(t, Pair):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, (Enc, Dec)):
            walk(t.body)

    walk(m)
    return found


def is_closed(m: Term) -> bool:
    return not variables(m)


def size(m: Term) -> int:
    return sum(1 for _ in subterms(m))


# ============================================================================
# SUBSTITUTION
# ============================================================================

def substitutable(symbol: Term) -> bool:
    """Variables and instantiation parameters may be replaced."""
    return isinstance(symbol, Variable) or (isinstance(symbol, Atom) and symbol.is_parameter)


def sort_of(m: Term) -> Sort:
    if isinstance(m, (Atom, Variable)):
        return m.sort
    return Sort.ANY


def accepts(slot: Term, value: Term) -> bool:
    """Whether ``value`` may replace the sorted symbol ``slot``."""
    required = sort_of(slot)
    if required is Sort.ANY:
        return True
    return isinstance(value, (Atom, Variable)) and value.sort is required


def substitute(m: Term, sigma: Substitution, keys: Optional["KeyTable"] = None) -> Term:
    """Simultaneously replace the symbols of ``sigma`` in ``m``, then normalize.

    Raises:
        SortMismatch: a replacement breaks the sort of the replaced symbol or
            puts a non-key term in key position.
    """
    for symbol, value in sigma.items():
        if not substitutable(symbol):
            raise SortMismatch(f"{symbol} is not a variable or parameter")
        if not accepts(symbol, value):
            raise SortMismatch(f"{symbol} ({sort_of(symbol).value}) cannot be replaced by {value}")
    return normalize(_replace(m, sigma), keys)


def _replace(m: Term, sigma: Substitution) -> Term:
    if m in sigma:
        return sigma[m]
    if isinstance(m, Pair):
        return Pair(_replace(m.left, sigma), _replace(m.right, sigma))
    if isinstance(m, (Enc, Dec)):
        new_key = _replace(m.key, sigma)
        _check_key_slot(new_key)
        return type(m)(_replace(m.body, sigma), new_key)
    return m


def _check_key_slot(k: Term) -> None:
    if isinstance(k, (Atom, Variable)) and k.sort is Sort.KEY:
        return
    raise SortMismatch(f"{k} cannot be used as an encryption key")


def replace(m: Term, mapping: Mapping[Term, Term]) -> Term:
    """Simultaneous replacement without sort checks or normalization."""
    return _replace(m, mapping)


def rename(m: Term, mapping: Mapping[Term, Term]) -> Term:
    """Symbol renaming without sort checks, normalized."""
    return normalize(_replace(m, mapping))


# ============================================================================
# RENDERING
# ============================================================================

def render(m: Term, separator: str = ".") -> str:
    """Canonical text: bare names, dot-separated pairs, {body}key encryption."""
    if isinstance(m, Atom):
        text = m.name
        if m.tag is not None:
            text += f"_{m.tag}"
        if m.session is not None:
            text += f"^{m.session}"
        return text
    if isinstance(m, Variable):
        return m.name
    if isinstance(m, Pair):
        return separator.join(render(p, separator) for p in _items(m))
    if isinstance(m, Enc):
        return "{" + render(m.body, separator) + "}" + render(m.key, separator)
    if isinstance(m, Dec):
        return f"dec({render(m.body, separator)}, {render(m.key, separator)})"
    return "ε"
