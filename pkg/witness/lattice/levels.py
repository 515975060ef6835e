"""
Security levels.
Powerset lattice over principal names ordered by inclusion, where a smaller
set is a higher level: BOTTOM is everyone (public), TOP is no one.
"""

from typing import FrozenSet, Iterable, Optional, Union


class SecurityLevel:
    """An element of the powerset lattice of principals.

    ``principals`` is None for BOTTOM, the open-ended set of every principal
    (the intruder included), which is never enumerated.
    """

    __slots__ = ("principals",)

    def __init__(self, principals: Optional[Iterable[str]] = None):
        self.principals: Optional[FrozenSet[str]] = (
            None if principals is None else frozenset(principals)
        )

    @classmethod
    def of(cls, *names: str) -> "SecurityLevel":
        return cls(names)

    @property
    def is_bottom(self) -> bool:
        return self.principals is None

    @property
    def is_top(self) -> bool:
        return self.principals is not None and not self.principals

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SecurityLevel):
            return NotImplemented
        return self.principals == other.principals

    def __hash__(self) -> int:
        return hash(("level", self.principals))

    def __repr__(self) -> str:
        return f"SecurityLevel({render_level(self)})"

    def __str__(self) -> str:
        return render_level(self)


class UnknownLevel:
    """Marker for an atom or variable whose level is not declared."""

    _instance: Optional["UnknownLevel"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"

    __str__ = __repr__


BOTTOM = SecurityLevel(None)
TOP = SecurityLevel(())
UNKNOWN = UnknownLevel()

LevelOrUnknown = Union[SecurityLevel, UnknownLevel]


# ============================================================================
# LATTICE OPERATIONS
# ============================================================================

def meet(a: SecurityLevel, b: SecurityLevel) -> SecurityLevel:
    """Greatest lower bound: set union. BOTTOM absorbs."""
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    return SecurityLevel(a.principals | b.principals)


def join(a: SecurityLevel, b: SecurityLevel) -> SecurityLevel:
    """Least upper bound: set intersection. BOTTOM is neutral."""
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    return SecurityLevel(a.principals & b.principals)


def meet_all(levels: Iterable[SecurityLevel]) -> SecurityLevel:
    """Meet of a collection; TOP for an empty one."""
    result = TOP
    for level in levels:
        result = meet(result, level)
        if result.is_bottom:
            break
    return result


def geq(a: SecurityLevel, b: SecurityLevel) -> bool:
    """``a`` is at least as restrictive as ``b`` (a is a subset of b)."""
    if b.is_bottom:
        return True
    if a.is_bottom:
        return False
    return a.principals <= b.principals


def set_geq(levels: Iterable[LevelOrUnknown], a: SecurityLevel) -> bool:
    """Some known level of ``levels`` is above ``a``."""
    return any(isinstance(level, SecurityLevel) and geq(level, a) for level in levels)


# ============================================================================
# TEXT FORM
# ============================================================================

def render_level(level: LevelOrUnknown) -> str:
    if isinstance(level, UnknownLevel):
        return "UNKNOWN"
    if level.is_bottom:
        return "BOT"
    if level.is_top:
        return "TOP"
    return "{" + ",".join(sorted(level.principals)) + "}"


def parse_level(text: str) -> SecurityLevel:
    """Inverse of ``render_level``; also accepts ``public`` for BOTTOM.

    Raises:
        ValueError: the text is not a level.
    """
    text = text.strip()
    if text in ("BOT", "public"):
        return BOTTOM
    if text == "TOP":
        return TOP
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"expected a level such as {{A,B}}, public, BOT or TOP, got {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return TOP
    names = [n.strip() for n in inner.split(",")]
    if any(not n.isidentifier() for n in names):
        raise ValueError(f"malformed principal list {text!r}")
    return SecurityLevel(names)
