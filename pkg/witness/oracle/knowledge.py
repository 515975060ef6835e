"""
Intruder knowledge.
Bounded Dolev-Yao deduction: splitting pairs and decrypting with known
inverse keys, plus pairing and encryption restricted to the subterms of the
input, with the provenance of every derived term.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from ..algebra.keys import KeyTable
from ..algebra.terms import Enc, Pair, Term, normalize, render, size, subterms
from ..errors import ResourceBound

logger = logging.getLogger(__name__)

DEFAULT_CAP = 20000


@dataclass(frozen=True)
class Derivation:
    """How a term entered the knowledge: rule name, premises and round."""

    rule: str
    premises: Tuple[Term, ...] = ()
    round: int = 0


class Knowledge:
    """A finite set of closed normalized terms with provenance."""

    def __init__(self, terms: Iterable[Term] = (), keys: Optional[KeyTable] = None, cap: int = DEFAULT_CAP):
        self.keys = keys if keys is not None else KeyTable()
        self.cap = cap
        self.provenance: Dict[Term, Derivation] = {}
        for t in terms:
            self._add(normalize(t, self.keys), Derivation("given"))

    # ------------------------------------------------------------------
    # Set interface
    # ------------------------------------------------------------------

    @property
    def terms(self) -> FrozenSet[Term]:
        return frozenset(self.provenance)

    def __contains__(self, t: Term) -> bool:
        return t in self.provenance

    def __iter__(self) -> Iterator[Term]:
        return iter(self.provenance)

    def __len__(self) -> int:
        return len(self.provenance)

    def sorted_terms(self) -> List[Term]:
        """Deterministic order: smaller terms first, then by text."""
        return sorted(self.provenance, key=lambda t: (size(t), render(t)))

    def _add(self, t: Term, derivation: Derivation) -> bool:
        if t in self.provenance:
            return False
        self.provenance[t] = derivation
        if len(self.provenance) > self.cap:
            raise ResourceBound(f"intruder knowledge exceeded {self.cap} terms")
        return True

    # ------------------------------------------------------------------
    # Deduction
    # ------------------------------------------------------------------

    def learn(self, t: Term, round_: int = 0) -> "Knowledge":
        """Add an intercepted message and saturate decomposition."""
        self._add(normalize(t, self.keys), Derivation("given", (), round_))
        self.decompose(round_)
        return self

    def decompose(self, round_: int = 0) -> int:
        """Split pairs and decrypt with known inverses until nothing changes.

        Returns:
            int: Number of terms added
        """
        added = 0
        frontier = list(self.provenance)
        while frontier:
            fresh: List[Term] = []
            for t in frontier:
                for conclusion, derivation in self._decompositions(t, round_):
                    if self._add(conclusion, derivation):
                        fresh.append(conclusion)
            # a newly learned key may open a ciphertext seen earlier
            for t in list(self.provenance):
                if isinstance(t, Enc) and self.keys.inverse(t.key) in fresh:
                    if self._add(t.body, Derivation("decrypt", (t, self.keys.inverse(t.key)), round_)):
                        fresh.append(t.body)
            added += len(fresh)
            frontier = fresh
        return added

    def _decompositions(self, t: Term, round_: int) -> Iterator[Tuple[Term, Derivation]]:
        if isinstance(t, Pair):
            yield t.left, Derivation("split", (t,), round_)
            yield t.right, Derivation("split", (t,), round_)
        elif isinstance(t, Enc):
            inverse = self.keys.inverse(t.key)
            if inverse in self.provenance:
                yield t.body, Derivation("decrypt", (t, inverse), round_)

    def compose(self, universe: Iterable[Term], round_: int) -> int:
        """One round of pairing and encryption, building only members of ``universe``."""
        built = []
        for u in universe:
            if u in self.provenance:
                continue
            if isinstance(u, Pair) and u.left in self.provenance and u.right in self.provenance:
                built.append((u, Derivation("pair", (u.left, u.right), round_)))
            elif isinstance(u, Enc) and u.body in self.provenance and u.key in self.provenance:
                built.append((u, Derivation("encrypt", (u.body, u.key), round_)))
        return sum(1 for t, d in built if self._add(t, d))

    def derives(self, t: Term) -> bool:
        """Whether ``t`` can be built from the knowledge by pairing and encryption."""
        t = normalize(t, self.keys)
        if t in self.provenance:
            return True
        if isinstance(t, Pair):
            return self.derives(t.left) and self.derives(t.right)
        if isinstance(t, Enc):
            return self.derives(t.key) and self.derives(t.body)
        return False

    # ------------------------------------------------------------------
    # Provenance
    # ------------------------------------------------------------------

    def explain(self, t: Term) -> List[str]:
        """Derivation of ``t``, premises before conclusions, one rule per line.

        Raises:
            KeyError: ``t`` is not known.
        """
        if t not in self.provenance:
            raise KeyError(render(t))
        lines: List[str] = []
        done: Set[Term] = set()

        def visit(node: Term) -> None:
            if node in done:
                return
            done.add(node)
            derivation = self.provenance[node]
            for premise in derivation.premises:
                visit(premise)
            premises = ", ".join(render(p) for p in derivation.premises)
            suffix = f" from {premises}" if premises else ""
            lines.append(f"[{derivation.round}] {derivation.rule}: {render(node)}{suffix}")

        visit(t)
        return lines


def closure(
    terms: Iterable[Term],
    keys: Optional[KeyTable] = None,
    depth: int = 4,
    cap: int = DEFAULT_CAP,
    universe: Iterable[Term] = (),
) -> Knowledge:
    """Bounded deduction closure.

    Each round saturates decomposition and then composes once, stopping
    early at a fixpoint. Composition only produces subterms of the input
    (and of ``universe``).

    Raises:
        ValueError: depth is negative.
        ResourceBound: the knowledge exceeds ``cap`` terms.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    terms = list(terms)
    knowledge = Knowledge(terms, keys, cap)
    targets = {normalize(s, knowledge.keys) for t in list(terms) + list(universe) for s in subterms(t)}
    ordered_targets = sorted(targets, key=lambda t: (size(t), render(t)))
    for round_ in range(1, depth + 1):
        changed = knowledge.decompose(round_)
        changed += knowledge.compose(ordered_targets, round_)
        if not changed:
            break
    logger.debug(f"🧠 Closure of {len(terms)} terms has {len(knowledge)} members")
    return knowledge
