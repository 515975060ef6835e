"""
Witness analysis.
Computes the static lower and upper bounds of the witness function for each
atom a role sends, and decides whether every such atom's level only grows
between reception and emission.
"""

import logging
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, computed_field, field_serializer

from ..algebra.terms import Atom, Sort, Term, Variable, ordered_symbols, payload_atoms, render
from ..errors import MissingLevel, NotPresent
from ..lattice.context import TypingContext
from ..lattice.levels import BOTTOM, TOP, SecurityLevel, geq, meet, meet_all, render_level
from ..protocol.models import Protocol
from ..protocol.roles import GeneralizedMessageSet, GeneralizedRole, collect_generalized_messages, extract_roles
from .derivation import derive_keep
from .safe_functions import FunctionLike, F_on_derivative, as_function, occurs
from .unification import origins

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    OK = "Ok"
    VIOLATION = "Violation"
    VACUOUS = "Vacuous"


class Overall(str, Enum):
    SECURE = "Secure"
    NOT_PROVED = "NotProved"


class _ReportModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class StepVerdict(_ReportModel):
    """One row of the report: one atom of one role's final send."""

    role: str
    atom: Term
    received: List[Term]
    sent: Term
    lower: SecurityLevel
    rhs: SecurityLevel
    verdict: Verdict
    notes: List[str] = []

    @field_serializer("atom", "sent")
    def _render_term(self, term: Term) -> str:
        return render(term)

    @field_serializer("received")
    def _render_terms(self, terms: List[Term]) -> List[str]:
        return [render(t) for t in terms]

    @field_serializer("lower", "rhs")
    def _render_level(self, level: SecurityLevel) -> str:
        return render_level(level)

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATION


class SkippedAtom(_ReportModel):
    role: str
    atom: Term
    reason: str

    @field_serializer("atom")
    def _render_atom(self, atom: Term) -> str:
        return render(atom)


class AnalysisReport(_ReportModel):
    protocol: str
    function: str
    rows: List[StepVerdict]
    skipped: List[SkippedAtom] = []

    @computed_field
    @property
    def overall(self) -> Overall:
        return Overall.SECURE if all(row.holds for row in self.rows) else Overall.NOT_PROVED

    @property
    def secure(self) -> bool:
        return self.overall is Overall.SECURE

    def violations(self) -> List[StepVerdict]:
        return [row for row in self.rows if not row.holds]


# ============================================================================
# BOUNDS
# ============================================================================

def upper_bound(alpha: Term, m: Term, function: FunctionLike, ctx: TypingContext) -> SecurityLevel:
    """Function value on the derivative of ``m`` that keeps only ``alpha``."""
    return as_function(function).evaluate(alpha, derive_keep(m, alpha), ctx)


def lower_bound(
    alpha: Term, m: Term, messages: GeneralizedMessageSet, function: FunctionLike, ctx: TypingContext
) -> SecurityLevel:
    """Meet over every origin of ``m`` of the function on its derivative."""
    if not occurs(alpha, m):
        return TOP
    level = ctx.level_of(alpha)
    values = []
    for origin in origins(m, messages.entries):
        target = origin.renaming.get(alpha, alpha)
        try:
            values.append(F_on_derivative(function, target, origin.entry, origin.unifier, ctx, level))
        except NotPresent:
            logger.debug(f"➖ {render(alpha)} not carried by origin {render(origin.entry)}")
    return meet_all(values)


# ============================================================================
# ANALYSIS
# ============================================================================

def analyzed_symbols(role: GeneralizedRole, position: int):
    """Symbols checked for a send: its payload atoms that are not principal
    identities, its variables, then variables received earlier and not sent.

    Returns:
        tuple: (analyzed symbols, atoms skipped because they only occur as keys)
    """
    sent = role.events[position].pattern
    payload = payload_atoms(sent)
    analyzed: List[Term] = []
    skipped: List[Term] = []
    for symbol in ordered_symbols(sent):
        if isinstance(symbol, Atom):
            if symbol.sort is Sort.PRINCIPAL:
                continue
            (analyzed if symbol in payload else skipped).append(symbol)
    for symbol in ordered_symbols(sent):
        if isinstance(symbol, Variable) and occurs(symbol, sent):
            analyzed.append(symbol)
    for received in role.received_before(position):
        for symbol in ordered_symbols(received):
            if isinstance(symbol, Variable) and symbol not in analyzed and occurs(symbol, received):
                analyzed.append(symbol)
    return analyzed, skipped


def check_step(
    role: GeneralizedRole,
    position: int,
    alpha: Term,
    function: FunctionLike,
    ctx: TypingContext,
    messages: GeneralizedMessageSet,
) -> StepVerdict:
    """Decide the growth condition for ``alpha`` at the send ``role.events[position]``."""
    event = role.events[position]
    if event.direction != "send":
        raise ValueError(f"event {position} of {role.label} is not a send")
    sent = event.pattern
    received = role.received_before(position)
    declared = ctx.level_of(alpha)
    notes: List[str] = []

    try:
        lower = lower_bound(alpha, sent, messages, function, ctx)
        rhs = declared if isinstance(declared, SecurityLevel) else TOP
        for m in received:
            rhs = meet(rhs, upper_bound(alpha, m, function, ctx))
    except MissingLevel as e:
        return StepVerdict(
            role=role.label, atom=alpha, received=received, sent=sent,
            lower=BOTTOM, rhs=declared if isinstance(declared, SecurityLevel) else TOP,
            verdict=Verdict.VIOLATION, notes=[str(e)],
        )

    if rhs.is_bottom:
        verdict = Verdict.VACUOUS
    elif geq(lower, rhs):
        verdict = Verdict.OK
    else:
        verdict = Verdict.VIOLATION

    f = as_function(function)
    for sites in f.protective_sites(alpha, derive_keep(sent, alpha), ctx):
        for site in sites:
            if site.shadowed and isinstance(declared, SecurityLevel):
                notes.append(f"protective key {render(site.key)} is enclosed by a non-protective key")

    return StepVerdict(
        role=role.label, atom=alpha, received=received, sent=sent,
        lower=lower, rhs=rhs, verdict=verdict, notes=notes,
    )


class WitnessAnalyzer:
    """Runs the growth check over every generalized role of a protocol.

    Args:
        protocol: A validated protocol
        function: Safe function to use (selector name or instance)
        ctx: Typing context (defaults to the protocol's own)
        session: Symbolic session tag for fresh values
    """

    def __init__(
        self,
        protocol: Protocol,
        function: FunctionLike = "max",
        ctx: Optional[TypingContext] = None,
        session: str = "i",
    ):
        self.protocol = protocol
        self.function = as_function(function)
        self.ctx = ctx if ctx is not None else protocol.context()
        self.roles = extract_roles(protocol, session)
        self.messages = collect_generalized_messages(self.roles)

    def analyze(self) -> AnalysisReport:
        rows: List[StepVerdict] = []
        skipped: List[SkippedAtom] = []
        for role in self.roles:
            if not role.ends_with_send:
                continue
            position = len(role.events) - 1
            symbols, key_only = analyzed_symbols(role, position)
            skipped.extend(SkippedAtom(role=role.label, atom=a, reason="key position only") for a in key_only)
            for alpha in symbols:
                row = check_step(role, position, alpha, self.function, self.ctx, self.messages)
                logger.debug(f"🔎 {role.label} {render(alpha)}: {row.verdict.value}")
                rows.append(row)

        report = AnalysisReport(
            protocol=self.protocol.name,
            function=self.function.selector.value,
            rows=rows,
            skipped=skipped,
        )
        glyph = "✅" if report.secure else "❌"
        logger.info(f"{glyph} {self.protocol.name}: {len(rows)} rows, {report.overall.value}")
        return report


def analyze(
    protocol: Protocol, function: FunctionLike = "max", ctx: Optional[TypingContext] = None
) -> AnalysisReport:
    """Growth check of every role's final send; see ``WitnessAnalyzer``."""
    return WitnessAnalyzer(protocol, function, ctx).analyze()

