"""Security lattice and typing context."""

from .context import TypingContext
from .levels import (
    BOTTOM, TOP, UNKNOWN, LevelOrUnknown, SecurityLevel, UnknownLevel,
    geq, join, meet, meet_all, parse_level, render_level, set_geq,
)

__all__ = [
    'BOTTOM', 'TOP', 'UNKNOWN', 'LevelOrUnknown', 'SecurityLevel', 'UnknownLevel', 'TypingContext',
    'geq', 'join', 'meet', 'meet_all', 'parse_level', 'render_level', 'set_geq',
]
