"""
Derivation of messages.
Erases chosen variables from a pattern so that only the part relevant to one
atom or variable block remains.
"""

from typing import Iterable

from ..algebra.terms import EMPTY, Enc, Pair, Term, Variable, normalize, variables


def derive(m: Term, erased: Iterable[Term]) -> Term:
    """``m`` with every variable in ``erased`` replaced by the empty message.

    Names in ``erased`` that are not variables of ``m`` are ignored. The
    result is normalized, so erased pair slots collapse and encryptions of
    nothing disappear.
    """
    targets = {v for v in erased if isinstance(v, Variable)}
    if not targets:
        return normalize(m)
    return normalize(_erase(m, targets))


def _erase(m: Term, targets: set) -> Term:
    if isinstance(m, Variable):
        return EMPTY if m in targets else m
    if isinstance(m, Pair):
        return Pair(_erase(m.left, targets), _erase(m.right, targets))
    if isinstance(m, Enc):
        return Enc(_erase(m.body, targets), m.key)
    return m


def derive_keep(m: Term, keep: Term) -> Term:
    """Erase every variable of ``m`` that does not occur in ``keep``.

    ``keep`` may be an atom, a variable or a composite block. When it is an
    atom all variables go; when it is a composite the variables inside it
    stay so that the block still occurs in the result.
    """
    return derive(m, variables(m) - variables(keep))
