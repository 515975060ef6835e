"""
Protocol file parser.
Reads the line-oriented protocol language into a Protocol, reads context
override files, and renders a Protocol back to its canonical text.
"""

import logging
import re
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from ..algebra.terms import Atom, Enc, Sort, Term, Variable, pair, render as render_term, replace, subterms
from ..errors import DuplicateDeclaration, ProtocolSyntaxError, UndeclaredSymbol
from ..lattice.context import TypingContext
from ..lattice.levels import SecurityLevel, parse_level
from .models import FreshDecl, KeyDecl, Protocol, Step

logger = logging.getLogger(__name__)

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_TOKEN = re.compile(rf"\s*(?:(?P<ident>{IDENT})|(?P<punct>[{{}},]))")
_MSG = re.compile(rf"^msg\s+(?P<index>\d+)\s+(?P<sender>{IDENT})\s*->\s*(?P<receiver>{IDENT})\s*:(?P<term>.*)$")
_SYMKEY = re.compile(rf"^symkey\s+(?P<name>{IDENT})\s+level\s+(?P<level>.+)$")
_ASYMKEY = re.compile(
    rf"^asymkey\s+(?P<name>{IDENT})\s*/\s*(?P<inverse>{IDENT})\s+level\s+(?P<level>.+?)\s*/\s*(?P<inverse_level>.+)$"
)
_FRESH = re.compile(rf"^fresh\s+(?P<sort>nonce|key)\s+(?P<name>{IDENT})\s+by\s+(?P<by>{IDENT})\s+level\s+(?P<level>.+)$")
_KNOWS = re.compile(rf"^knows\s+(?P<agent>{IDENT})\s*:(?P<atoms>.*)$")
_LEVEL = re.compile(rf"^level\s+(?P<name>{IDENT})\s+(?P<level>.+)$")

Resolver = Callable[[str, int], Term]


# ============================================================================
# TERMS
# ============================================================================

class TermParser:
    """Recursive-descent parser for message terms.

    Grammar::

        seq  := unit (',' unit)*
        unit := IDENT | '{' seq '}' IDENT

    ``resolve`` maps an identifier (and its column) to an atom, raising
    UndeclaredSymbol for unknown names.
    """

    def __init__(self, text: str, resolve: Resolver, line: Optional[int] = None, offset: int = 0):
        self.text = text
        self.resolve = resolve
        self.line = line
        self.offset = offset
        self.tokens = self._tokenize()
        self.pos = 0

    def _tokenize(self) -> List[Tuple[str, str, int]]:
        tokens = []
        i = 0
        while i < len(self.text):
            if self.text[i:].strip() == "":
                break
            match = _TOKEN.match(self.text, i)
            if match is None:
                column = i + len(self.text[i:]) - len(self.text[i:].lstrip()) + 1
                raise self._error(f"unexpected character {self.text[column - 1]!r}", column)
            kind = "ident" if match.group("ident") else "punct"
            value = match.group(kind)
            tokens.append((kind, value, match.start(kind) + 1))
            i = match.end()
        return tokens

    def _error(self, message: str, column: Optional[int] = None) -> ProtocolSyntaxError:
        col = None if column is None else column + self.offset
        return ProtocolSyntaxError(message, self.line, col)

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, expected: str) -> Tuple[str, str, int]:
        token = self._peek()
        if token is None:
            raise self._error(f"expected {expected} but the term ended", len(self.text) + 1)
        self.pos += 1
        return token

    def parse(self) -> Term:
        if not self.tokens:
            raise self._error("empty term", 1)
        term = self._seq()
        extra = self._peek()
        if extra is not None:
            raise self._error(f"unexpected {extra[1]!r}", extra[2])
        return term

    def _seq(self) -> Term:
        parts = [self._unit()]
        while (token := self._peek()) is not None and token[1] == ",":
            self.pos += 1
            parts.append(self._unit())
        return pair(*parts)

    def _unit(self) -> Term:
        kind, value, column = self._next("a name or '{'")
        if kind == "ident":
            return self.resolve(value, column + self.offset)
        if value != "{":
            raise self._error(f"unexpected {value!r}", column)
        body = self._seq()
        kind, value, close_col = self._next("'}'")
        if value != "}":
            raise self._error(f"expected '}}' but found {value!r}", close_col)
        kind, value, key_col = self._next("an encryption key")
        if kind != "ident":
            raise self._error(f"expected an encryption key but found {value!r}", key_col)
        k = self.resolve(value, key_col + self.offset)
        if isinstance(k, Variable):
            k = Variable(k.name, Sort.KEY)
        elif k.sort is not Sort.KEY:
            raise self._error(f"{value} is not a key and cannot encrypt", key_col)
        return Enc(body, k)


def parse_term(
    text: str,
    protocol: Protocol,
    line: Optional[int] = None,
    offset: int = 0,
    allow_variables: bool = False,
) -> Term:
    """Parse a term whose names are declared in ``protocol``.

    With ``allow_variables`` undeclared names are read as variables. A name
    stands for one variable throughout the term; it has sort key if it is
    used in key position anywhere, and is unconstrained otherwise.

    Raises:
        ProtocolSyntaxError: malformed term.
        UndeclaredSymbol: a name is not declared and variables are not allowed.
    """
    def resolve(name: str, column: int) -> Term:
        sort = protocol.sort_of(name)
        if sort is None:
            if allow_variables:
                return Variable(name)
            raise UndeclaredSymbol(f"undeclared name {name}", line, column)
        return Atom(name, sort)

    term = TermParser(text, resolve, line, offset).parse()
    keys = {t.name for t in subterms(term) if isinstance(t, Variable) and t.sort is Sort.KEY}
    return replace(term, {Variable(name): Variable(name, Sort.KEY) for name in keys})


# ============================================================================
# PROTOCOL FILES
# ============================================================================

class ProtocolParser:
    """Single-use parser for one protocol file."""

    def __init__(self, text: str, intruder: str = "I"):
        self.text = text
        self.intruder = intruder
        self.name: Optional[str] = None
        self.agents: List[str] = []
        self.keys: List[KeyDecl] = []
        self.fresh: List[FreshDecl] = []
        self.steps: List[Step] = []
        self.secrets: List[str] = []
        self.knows: Dict[str, List[str]] = {}
        self._declared: Dict[str, int] = {}

    def parse(self) -> Protocol:
        for number, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            self._statement(line, number)
        if self.name is None:
            raise ProtocolSyntaxError("missing 'protocol <name>' line")
        if not self.agents:
            raise ProtocolSyntaxError("missing 'agents' line")
        protocol = self._build()
        logger.debug(f"📄 Parsed protocol {protocol.name}: {len(protocol.steps)} steps")
        return protocol

    def _build(self) -> Protocol:
        return Protocol(
            name=self.name,
            agents=self.agents,
            keys=self.keys,
            fresh=self.fresh,
            steps=self.steps,
            secrets=self.secrets,
            knows=self.knows,
        )

    # ------------------------------------------------------------------
    # Statements
    # ------------------------------------------------------------------

    def _statement(self, line: str, number: int) -> None:
        indent = len(line) - len(line.lstrip())
        line = line.strip()
        keyword = line.split(None, 1)[0]
        handler = {
            "protocol": self._protocol,
            "agents": self._agents,
            "symkey": self._symkey,
            "asymkey": self._asymkey,
            "fresh": self._fresh,
            "knows": self._knows,
            "msg": self._msg,
            "secret": self._secret,
        }.get(keyword)
        if handler is None:
            raise ProtocolSyntaxError(f"unknown statement {keyword!r}", number, indent + 1)
        handler(line, number, indent)

    def _protocol(self, line: str, number: int, indent: int) -> None:
        parts = line.split()
        if len(parts) != 2 or not re.fullmatch(IDENT, parts[1]):
            raise ProtocolSyntaxError("expected 'protocol <name>'", number, indent + 1)
        if self.name is not None:
            raise DuplicateDeclaration("protocol name given twice", number, indent + 1)
        self.name = parts[1]

    def _agents(self, line: str, number: int, indent: int) -> None:
        names = self._name_list(line[len("agents"):], number, indent + len("agents"))
        if not names:
            raise ProtocolSyntaxError("expected at least one agent", number, indent + 1)
        for name, column in names:
            if name == self.intruder:
                raise ProtocolSyntaxError(f"{name} is reserved for the intruder", number, column)
            self._declare(name, number, column)
            self.agents.append(name)

    def _symkey(self, line: str, number: int, indent: int) -> None:
        match = _SYMKEY.match(line)
        if match is None:
            raise ProtocolSyntaxError("expected 'symkey <k> level {...}'", number, indent + 1)
        self._declare(match["name"], number, indent + match.start("name") + 1)
        level = self._level(match["level"], number, indent + match.start("level") + 1)
        self.keys.append(KeyDecl(name=match["name"], level=level, line=number))

    def _asymkey(self, line: str, number: int, indent: int) -> None:
        match = _ASYMKEY.match(line)
        if match is None:
            raise ProtocolSyntaxError("expected 'asymkey <k> / <k_inv> level <level> / <level>'", number, indent + 1)
        self._declare(match["name"], number, indent + match.start("name") + 1)
        self._declare(match["inverse"], number, indent + match.start("inverse") + 1)
        self.keys.append(KeyDecl(
            name=match["name"],
            inverse=match["inverse"],
            level=self._level(match["level"], number, indent + match.start("level") + 1),
            inverse_level=self._level(match["inverse_level"], number, indent + match.start("inverse_level") + 1),
            line=number,
        ))

    def _fresh(self, line: str, number: int, indent: int) -> None:
        match = _FRESH.match(line)
        if match is None:
            raise ProtocolSyntaxError("expected 'fresh nonce|key <x> by <agent> level <level>'", number, indent + 1)
        if match["by"] not in self.agents:
            raise UndeclaredSymbol(f"unknown agent {match['by']}", number, indent + match.start("by") + 1)
        self._declare(match["name"], number, indent + match.start("name") + 1)
        self.fresh.append(FreshDecl(
            name=match["name"],
            sort=match["sort"],
            generator=match["by"],
            level=self._level(match["level"], number, indent + match.start("level") + 1),
            line=number,
        ))

    def _knows(self, line: str, number: int, indent: int) -> None:
        match = _KNOWS.match(line)
        if match is None:
            raise ProtocolSyntaxError("expected 'knows <agent> : <atom>, ...'", number, indent + 1)
        agent = match["agent"]
        if agent != self.intruder and agent not in self.agents:
            raise UndeclaredSymbol(f"unknown agent {agent}", number, indent + match.start("agent") + 1)
        names = self._name_list(match["atoms"], number, indent + match.start("atoms"))
        for name, column in names:
            if agent != self.intruder and name not in self._declared:
                raise UndeclaredSymbol(f"undeclared name {name}", number, column)
        self.knows.setdefault(agent, []).extend(n for n, _ in names)

    def _msg(self, line: str, number: int, indent: int) -> None:
        match = _MSG.match(line)
        if match is None:
            raise ProtocolSyntaxError("expected 'msg <n> <A> -> <B> : <term>'", number, indent + 1)
        for role in ("sender", "receiver"):
            if match[role] not in self.agents:
                raise UndeclaredSymbol(f"unknown agent {match[role]}", number, indent + match.start(role) + 1)
        if match["sender"] == match["receiver"]:
            raise ProtocolSyntaxError(
                f"sender and receiver are both {match['sender']}", number, indent + match.start("receiver") + 1
            )
        payload = parse_term(match["term"], self._build_partial(), number, indent + match.start("term"))
        self.steps.append(Step(
            index=int(match["index"]),
            sender=match["sender"],
            receiver=match["receiver"],
            payload=payload,
            line=number,
        ))

    def _secret(self, line: str, number: int, indent: int) -> None:
        names = self._name_list(line[len("secret"):], number, indent + len("secret"))
        if not names:
            raise ProtocolSyntaxError("expected 'secret <atom>, ...'", number, indent + 1)
        for name, column in names:
            if name not in self._declared:
                raise UndeclaredSymbol(f"undeclared secret {name}", number, column)
            if name in self.secrets:
                raise DuplicateDeclaration(f"{name} is already a secret", number, column)
            self.secrets.append(name)

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _declare(self, name: str, number: int, column: int) -> None:
        if name in self._declared:
            raise DuplicateDeclaration(
                f"{name} is already declared on line {self._declared[name]}", number, column
            )
        self._declared[name] = number

    def _level(self, text: str, number: int, column: int) -> SecurityLevel:
        try:
            return parse_level(text)
        except ValueError as e:
            raise ProtocolSyntaxError(str(e), number, column)

    def _name_list(self, text: str, number: int, offset: int) -> List[Tuple[str, int]]:
        names = []
        for match in re.finditer(r"[^,\s]+", text):
            if not re.fullmatch(IDENT, match.group()):
                raise ProtocolSyntaxError(f"invalid name {match.group()!r}", number, offset + match.start() + 1)
            names.append((match.group(), offset + match.start() + 1))
        return names

    def _build_partial(self) -> Protocol:
        return Protocol(name=self.name or "", agents=self.agents, keys=self.keys, fresh=self.fresh)


def parse(text: str, intruder: str = "I") -> Protocol:
    """Parse protocol source text.

    Raises:
        ProtocolSyntaxError: malformed statement or term.
        UndeclaredSymbol: a name is used before being declared.
        DuplicateDeclaration: a name is declared twice.
    """
    return ProtocolParser(text, intruder).parse()


def parse_file(path: Union[str, Path], intruder: str = "I") -> Protocol:
    """Read and parse a protocol file. FileNotFoundError propagates."""
    text = Path(path).read_text(encoding="utf-8")
    logger.info(f"📂 Loading protocol from {path}")
    return parse(text, intruder)


# ============================================================================
# CONTEXT OVERRIDES
# ============================================================================

def parse_context(text: str, protocol: Protocol, intruder: str = "I") -> TypingContext:
    """Apply a context override file to the protocol's own context.

    Accepted lines are ``level <atom> <level>`` and ``knows I : <atoms>``;
    ``knows`` lines add to the intruder's initial knowledge.
    """
    base = protocol.context(intruder)
    levels: Dict[str, SecurityLevel] = {}
    knowledge = set(base.intruder_knowledge)
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        level_match = _LEVEL.match(line)
        knows_match = _KNOWS.match(line)
        if level_match:
            name = level_match["name"]
            sort = protocol.sort_of(name)
            if sort is None:
                raise UndeclaredSymbol(f"undeclared name {name}", number, level_match.start("name") + 1)
            if sort is Sort.PRINCIPAL:
                raise ProtocolSyntaxError(f"{name} is a principal and always public", number, 1)
            try:
                levels[name] = parse_level(level_match["level"])
            except ValueError as e:
                raise ProtocolSyntaxError(str(e), number, level_match.start("level") + 1)
        elif knows_match and knows_match["agent"] == intruder:
            for match in re.finditer(r"[^,\s]+", knows_match["atoms"]):
                name = match.group()
                sort = protocol.sort_of(name)
                knowledge.add(Atom(name, sort if sort is not None else Sort.NONCE))
        else:
            raise ProtocolSyntaxError(
                f"expected 'level <atom> <level>' or 'knows {intruder} : ...'", number, 1
            )
    logger.debug(f"🧩 Context overrides: {len(levels)} levels, {len(knowledge)} intruder atoms")
    return base.with_overrides(levels, knowledge)


# ============================================================================
# RENDERING
# ============================================================================

def _dsl_level(level: SecurityLevel) -> str:
    if level.is_bottom:
        return "public"
    return "{" + ",".join(sorted(level.principals)) + "}"


def render(protocol: Protocol) -> str:
    """Canonical text of ``protocol``; ``parse`` reads it back unchanged."""
    lines = [f"protocol {protocol.name}", "agents " + " ".join(protocol.agents)]
    for decl in protocol.keys:
        if decl.inverse is None:
            lines.append(f"symkey {decl.name} level {_dsl_level(decl.level)}")
        else:
            inverse_level = decl.inverse_level or decl.level
            lines.append(
                f"asymkey {decl.name} / {decl.inverse} level {_dsl_level(decl.level)} / {_dsl_level(inverse_level)}"
            )
    for decl in protocol.fresh:
        lines.append(f"fresh {decl.sort} {decl.name} by {decl.generator} level {_dsl_level(decl.level)}")
    for agent, names in protocol.knows.items():
        lines.append(f"knows {agent} : " + ", ".join(names))
    for step in protocol.steps:
        lines.append(f"msg {step.index} {step.sender} -> {step.receiver} : {render_term(step.payload, ', ')}")
    if protocol.secrets:
        lines.append("secret " + ", ".join(protocol.secrets))
    return "\n".join(lines) + "\n"
