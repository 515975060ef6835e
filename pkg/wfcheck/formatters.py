"""
Report formatting for the wfcheck command line.
Renders analysis reports, roles, origins, levels and oracle results as
aligned text tables or as stable JSON.
"""

import json
from typing import Iterable, List, Optional, Sequence

from colorama import Fore, Style

from witness.algebra.terms import Term, render
from witness.analysis.unification import Origin
from witness.analysis.witness import AnalysisReport, Verdict
from witness.lattice.levels import LevelOrUnknown, render_level
from witness.oracle.invariance import Counterexample
from witness.oracle.simulator import SimulationResult
from witness.protocol.models import Diagnostic
from witness.protocol.roles import GeneralizedMessageSet, GeneralizedRole

EMPTY_SET = "∅"


class ReportFormatter:
    """Handles all output formatting for the command line."""

    VERDICT_COLORS = {
        Verdict.OK: Fore.GREEN,
        Verdict.VACUOUS: Fore.CYAN,
        Verdict.VIOLATION: Fore.RED,
    }

    def __init__(self, fmt: str = "table", color: bool = True):
        self.fmt = fmt
        self.color = color

    @property
    def json_mode(self) -> bool:
        return self.fmt == "json"

    # ------------------------------------------------------------------
    # Analysis
    # ------------------------------------------------------------------

    def format_report(self, report: AnalysisReport) -> str:
        """
        Render an analysis report.

        The table has one line per analyzed atom, in report order, followed
        by skipped atoms, row notes and the overall verdict.

        Args:
            report: Result of the witness analysis

        Returns:
            str: Formatted report
        """
        if self.json_mode:
            return report.model_dump_json(indent=2)

        headers = ["Role", "Atom", "Received", "Sent", "Lower", "Rhs", "Verdict"]
        rows = [
            [
                row.role,
                render(row.atom),
                "; ".join(render(m) for m in row.received) or EMPTY_SET,
                render(row.sent),
                render_level(row.lower),
                render_level(row.rhs),
                row.verdict.value,
            ]
            for row in report.rows
        ]
        lines = [f"Protocol {report.protocol} (function {report.function.upper()})", ""]
        if rows:
            colors = [self.VERDICT_COLORS[row.verdict] for row in report.rows]
            lines += self._table(headers, rows, highlight=len(headers) - 1, colors=colors)
        else:
            lines.append("No send steps to analyze.")

        if report.skipped:
            lines.append("")
            for skipped in report.skipped:
                lines.append(f"skipped {render(skipped.atom)} in {skipped.role}: {skipped.reason}")

        notes = [(row.role, render(row.atom), note) for row in report.rows for note in row.notes]
        if notes:
            lines.append("")
            for role, atom, note in notes:
                lines.append(self._paint(f"note {role} {atom}: {note}", Fore.YELLOW))

        lines.append("")
        overall_color = Fore.GREEN if report.secure else Fore.RED
        lines.append(self._paint(f"Overall: {report.overall.value}", overall_color + Style.BRIGHT))
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # Roles and origins
    # ------------------------------------------------------------------

    def format_roles(
        self,
        roles: List[GeneralizedRole],
        messages: Optional[GeneralizedMessageSet] = None,
        intruder: str = "I",
    ) -> str:
        if self.json_mode:
            payload = {"roles": [self._role_json(role) for role in roles]}
            if messages is not None:
                payload["messages"] = messages.model_dump(mode="json")["entries"]
            return self._dump(payload)

        lines: List[str] = []
        for role in roles:
            lines.append(self._paint(f"{role.label}:", Style.BRIGHT))
            lines += [f"  {e.display(role.session, intruder)}" for e in role.events]
        if messages is not None:
            lines.append("")
            lines.append(self._paint(f"Generalized messages ({len(messages.entries)}):", Style.BRIGHT))
            lines += [f"  {render(entry)}" for entry in messages.entries]
        return "\n".join(lines)

    @staticmethod
    def _role_json(role: GeneralizedRole) -> dict:
        return {
            "role": role.label,
            "principal": role.principal,
            "session": role.session,
            "events": [
                {"direction": e.direction, "index": e.index, "sender": e.sender,
                 "receiver": e.receiver, "pattern": render(e.pattern)}
                for e in role.events
            ],
        }

    def format_origins(self, query: Term, found: Sequence[Origin]) -> str:
        if self.json_mode:
            return self._dump({
                "query": render(query),
                "origins": [
                    {"entry": render(o.entry), "unifier": {render(k): render(v) for k, v in o.unifier.items()}}
                    for o in found
                ],
            })
        lines = [f"Origins of {render(query)}: {len(found)}"]
        for number, origin in enumerate(found, start=1):
            lines.append(f"  {number}. {render(origin.entry)}")
            lines.append(f"     σ = {origin.unifier.render()}")
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # Single evaluation
    # ------------------------------------------------------------------

    def format_level(self, function: str, alpha: Term, term: Term, level: LevelOrUnknown) -> str:
        if self.json_mode:
            return self._dump({
                "function": function,
                "atom": render(alpha),
                "term": render(term),
                "level": render_level(level),
            })
        return f"F_{function.upper()}({render(alpha)}, {render(term)}) = {render_level(level)}"

    # ------------------------------------------------------------------
    # Oracle
    # ------------------------------------------------------------------

    def format_oracle(
        self,
        result: SimulationResult,
        counterexamples: Optional[List[Counterexample]] = None,
    ) -> str:
        if self.json_mode:
            payload = {"simulation": result.model_dump(mode="json")}
            if counterexamples is not None:
                payload["counterexamples"] = [c.model_dump(mode="json") for c in counterexamples]
            return self._dump(payload)

        lines = [
            f"Simulated {result.sessions} session(s) to depth {result.depth}: "
            f"{result.traces_explored} states explored"
        ]
        if result.secure:
            lines.append(self._paint("No secret leaked.", Fore.GREEN))
        for name in result.leaked:
            lines.append(self._paint(f"Leaked {name}:", Fore.RED + Style.BRIGHT))
            lines += [f"  {step}" for step in result.witnesses.get(name, [])] or ["  (initially known)"]

        if counterexamples is not None:
            lines.append("")
            if not counterexamples:
                lines.append(self._paint("Invariance holds on every deducible message.", Fore.GREEN))
            for c in counterexamples:
                lines.append(self._paint(
                    f"Counterexample: {render(c.atom)} in {render(c.message)} has "
                    f"{render_level(c.value)}, below {render_level(c.reference)}",
                    Fore.RED,
                ))
                lines += [f"  {step}" for step in c.derivation]
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # Diagnostics
    # ------------------------------------------------------------------

    def format_diagnostic(self, diagnostic: Diagnostic) -> str:
        color = Fore.RED if diagnostic.severity == "error" else Fore.YELLOW
        return self._paint(str(diagnostic), color)

    def format_error(self, message: str) -> str:
        return self._paint(f"error: {message}", Fore.RED)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _paint(self, text: str, color: str) -> str:
        if not self.color:
            return text
        return f"{color}{text}{Style.RESET_ALL}"

    def _table(
        self,
        headers: List[str],
        rows: List[List[str]],
        highlight: Optional[int] = None,
        colors: Optional[Iterable[str]] = None,
    ) -> List[str]:
        """Left-aligned columns; the ``highlight`` column is coloured per row after padding."""
        widths = [max(len(cell) for cell in column) for column in zip(headers, *rows)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        for row, color in zip(rows, colors or [None] * len(rows)):
            cells = [cell.ljust(w) for cell, w in zip(row, widths)]
            if highlight is not None and color is not None:
                cells[highlight] = self._paint(cells[highlight], color)
            lines.append("  ".join(cells).rstrip())
        return lines

    @staticmethod
    def _dump(payload: dict) -> str:
        return json.dumps(payload, indent=2, ensure_ascii=False)
