"""
Safe functions.
Estimates how far an atom can travel given the encryptions that enclose it:
the outermost protective key of each occurrence, the principals travelling
with it under that key, and the MAX, N and EK combinations of the two.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from ..algebra.terms import Atom, Enc, Pair, Sort, Term, Variable, rename, render, subterms
from ..errors import MissingLevel, NotPresent
from ..lattice.context import TypingContext
from ..lattice.levels import (
    BOTTOM, TOP, UNKNOWN, LevelOrUnknown, SecurityLevel, geq, meet, meet_all,
)
from .derivation import derive_keep

logger = logging.getLogger(__name__)

Path = Tuple[str, ...]


class FunctionSelector(str, Enum):
    MAX = "max"
    N = "n"
    EK = "ek"


@dataclass(frozen=True)
class ProtectionSite:
    """One candidate protective encryption for one occurrence.

    ``shadowed`` is set when a non-protective key encloses the chosen one.
    """

    occurrence: Path
    key: Term
    key_level: SecurityLevel
    neighborhood: FrozenSet[str]
    shadowed: bool = False


# ============================================================================
# OCCURRENCES
# ============================================================================

def occurrences(alpha: Term, m: Term) -> Iterator[Tuple[Path, List[Tuple[Path, Enc]]]]:
    """Payload positions of ``alpha`` in ``m`` with their enclosing
    encryptions, outermost first. Key positions are not occurrences."""

    def walk(t: Term, path: Path, enclosing: List[Tuple[Path, Enc]]):
        if t == alpha:
            yield path, list(enclosing)
            return
        if isinstance(t, Pair):
            yield from walk(t.left, path + ("l",), enclosing)
            yield from walk(t.right, path + ("r",), enclosing)
        elif isinstance(t, Enc):
            enclosing.append((path, t))
            yield from walk(t.body, path + ("b",), enclosing)
            enclosing.pop()

    yield from walk(m, (), [])


def occurs(alpha: Term, m: Term) -> bool:
    return next(occurrences(alpha, m), None) is not None


def _principals_except(t: Term, skip: Path) -> FrozenSet[str]:
    found = set()

    def walk(node: Term, path: Path) -> None:
        if path == skip:
            return
        if isinstance(node, Atom) and node.sort is Sort.PRINCIPAL:
            found.add(node.name)
        elif isinstance(node, Pair):
            walk(node.left, path + ("l",))
            walk(node.right, path + ("r",))
        elif isinstance(node, Enc):
            walk(node.body, path + ("b",))

    walk(t, ())
    return frozenset(found)


# ============================================================================
# SAFE FUNCTIONS
# ============================================================================

class SafeFunction:
    """A safe function selected by ``selector``.

    Subclasses may override ``is_protective`` or ``site_value`` to obtain
    variants; the analysis only relies on ``evaluate``.
    """

    def __init__(self, selector: FunctionSelector = FunctionSelector.MAX):
        self.selector = FunctionSelector(selector)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.selector.value})"

    def is_protective(self, key: Term, key_level: LevelOrUnknown, level: SecurityLevel) -> bool:
        return isinstance(key_level, SecurityLevel) and geq(key_level, level)

    def site_value(self, site: ProtectionSite) -> SecurityLevel:
        neighborhood = SecurityLevel(site.neighborhood)
        if self.selector is FunctionSelector.N:
            return neighborhood
        if self.selector is FunctionSelector.EK:
            return site.key_level
        return meet(site.key_level, neighborhood)

    def _key_level(self, key: Term, ctx: TypingContext) -> LevelOrUnknown:
        if isinstance(key, Variable):
            return UNKNOWN
        level = ctx.inverse_level(key)
        if level is UNKNOWN:
            raise MissingLevel(render(ctx.inverse(key)))
        return level

    def sites_of(
        self, path: Path, enclosing: List[Tuple[Path, Enc]], level: LevelOrUnknown, ctx: TypingContext
    ) -> List[ProtectionSite]:
        """Sites of one occurrence: the outermost protective key for a known
        level, every enclosing atomic key for an unknown one."""
        sites = []
        shadowed = False
        for enc_path, node in enclosing:
            key_level = self._key_level(node.key, ctx)
            if not isinstance(key_level, SecurityLevel):
                shadowed = True
                continue
            if isinstance(level, SecurityLevel) and not self.is_protective(node.key, key_level, level):
                shadowed = True
                continue
            sites.append(ProtectionSite(
                occurrence=path,
                key=node.key,
                key_level=key_level,
                neighborhood=_principals_except(node.body, path[len(enc_path) + 1:]),
                shadowed=shadowed,
            ))
            if isinstance(level, SecurityLevel):
                break
        return sites

    def protective_sites(
        self, alpha: Term, m: Term, ctx: TypingContext, level: Optional[LevelOrUnknown] = None
    ) -> List[List[ProtectionSite]]:
        """Sites per occurrence of ``alpha`` in ``m``, in occurrence order."""
        level = ctx.level_of(alpha) if level is None else level
        return [self.sites_of(path, enclosing, level, ctx) for path, enclosing in occurrences(alpha, m)]

    def evaluate(
        self,
        alpha: Term,
        m: Union[Term, Iterable[Term]],
        ctx: TypingContext,
        level: Optional[LevelOrUnknown] = None,
    ) -> SecurityLevel:
        """Value of the function for ``alpha`` in a message or a set of messages.

        Args:
            alpha: Atom or variable block to evaluate
            m: One message, or an iterable of messages combined by meet
            ctx: Typing context supplying key levels
            level: Level to assume for ``alpha`` instead of the declared one

        Returns:
            SecurityLevel: TOP when alpha does not occur, BOTTOM when some
            occurrence is unprotected, else the meet of all site values

        Raises:
            MissingLevel: an enclosing key's inverse has no declared level
        """
        if not isinstance(m, Term):
            return meet_all(self.evaluate(alpha, single, ctx, level) for single in m)
        per_occurrence = self.protective_sites(alpha, m, ctx, level)
        if not per_occurrence:
            return TOP
        values = []
        for sites in per_occurrence:
            if not sites:
                return BOTTOM
            values.extend(self.site_value(site) for site in sites)
        return meet_all(values)


FunctionLike = Union[FunctionSelector, str, SafeFunction]


def as_function(function: FunctionLike) -> SafeFunction:
    if isinstance(function, SafeFunction):
        return function
    return SafeFunction(FunctionSelector(function))


def protective_sites(alpha: Term, m: Term, ctx: TypingContext, level: Optional[LevelOrUnknown] = None) -> List[ProtectionSite]:
    """All protection sites of ``alpha`` in ``m``, flattened over occurrences."""
    return [site for sites in SafeFunction().protective_sites(alpha, m, ctx, level) for site in sites]


def evaluate_F(
    function: FunctionLike,
    alpha: Term,
    m: Union[Term, Iterable[Term]],
    ctx: TypingContext,
    level: Optional[LevelOrUnknown] = None,
) -> SecurityLevel:
    return as_function(function).evaluate(alpha, m, ctx, level)


# ============================================================================
# FUNCTION ON A DERIVATIVE
# ============================================================================

def F_on_derivative(
    function: FunctionLike,
    alpha: Term,
    origin: Term,
    sigma: Mapping[Term, Term],
    ctx: TypingContext,
    level: Optional[LevelOrUnknown] = None,
) -> SecurityLevel:
    """Value for ``alpha`` read off an origin pattern under a unifier.

    The origin's parameters are instantiated first. If the image of ``alpha``
    then occurs statically, it is evaluated in place; otherwise each origin
    variable whose image carries it is evaluated as an opaque block and the
    results are met.

    Raises:
        NotPresent: alpha is in neither the static part nor a variable image.
        MissingLevel: propagated from the evaluation.
    """
    f = as_function(function)
    level = ctx.level_of(alpha) if level is None else level
    parameters = {s: v for s, v in sigma.items() if isinstance(s, Atom)}
    static = rename(origin, parameters)
    target = sigma.get(alpha, alpha)

    if occurs(target, static):
        return f.evaluate(target, derive_keep(static, target), ctx, level)

    carriers = [
        x for x in _ordered_variables(origin)
        if any(t == target for t in subterms(sigma.get(x, x)))
    ]
    if not carriers:
        raise NotPresent(f"{render(alpha)} does not occur in {render(origin)} under the unifier")
    return meet_all(f.evaluate(x, derive_keep(static, x), ctx, UNKNOWN) for x in carriers)


def _ordered_variables(m: Term) -> List[Variable]:
    seen = []
    for t in subterms(m):
        if isinstance(t, Variable) and t not in seen:
            seen.append(t)
    return seen
