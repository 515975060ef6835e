"""
wfcheck command line.
Click group and sub-commands; every invocation is turned into a RunConfig
and executed by ``run``, which maps analyzer errors to exit codes.
"""

import logging
import sys
from pathlib import Path
from typing import Literal, Optional

import click
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from witness.analysis.safe_functions import FunctionSelector
from witness.errors import MissingLevel, ProtocolParseError, ResourceBound, SortMismatch

from .commands import EXIT_INPUT, EXIT_RESOURCE, HANDLERS
from .core.config import settings
from .formatters import ReportFormatter

logger = logging.getLogger(__name__)

Subcommand = Literal["analyze", "roles", "origins", "eval", "oracle"]


class RunConfig(BaseModel):
    """One validated command-line invocation."""

    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    input: Path
    function: FunctionSelector = FunctionSelector(settings.default_function)
    format: Literal["table", "json"] = settings.default_format
    context: Optional[Path] = None

    # Sub-command arguments
    term: Optional[str] = None
    atom: Optional[str] = None
    messages: bool = False

    # Oracle bounds
    sessions: int = Field(settings.oracle_sessions, ge=1)
    depth: int = Field(settings.oracle_depth, ge=0)
    check_invariant: bool = False
    knowledge_cap: int = Field(settings.knowledge_cap, ge=1)
    state_cap: int = Field(settings.state_cap, ge=1)
    candidate_cap: int = Field(settings.candidate_cap, ge=1)

    intruder: str = settings.intruder_name
    session: str = settings.session_symbol
    color: bool = settings.color

    @model_validator(mode="after")
    def _check_arguments(self) -> "RunConfig":
        if self.subcommand in ("origins", "eval") and not self.term:
            raise ValueError(f"{self.subcommand} needs --term")
        if self.subcommand == "eval" and not self.atom:
            raise ValueError("eval needs --atom")
        return self


def run(config: RunConfig) -> int:
    """
    Execute one invocation.

    Args:
        config: Validated run configuration

    Returns:
        int: 0 secure or success, 1 violation, leak or counterexample,
        2 parse, validation or input error, 3 resource bound exceeded
    """
    formatter = ReportFormatter(config.format, config.color)
    logger.info(f"🔍 {config.subcommand} {config.input}")
    try:
        return HANDLERS[config.subcommand](config, formatter)
    except FileNotFoundError as e:
        click.echo(formatter.format_error(f"no such file: {e.filename}"), err=True)
        return EXIT_INPUT
    except ProtocolParseError as e:
        click.echo(formatter.format_error(str(e)), err=True)
        return EXIT_INPUT
    except (MissingLevel, SortMismatch) as e:
        click.echo(formatter.format_error(str(e)), err=True)
        return EXIT_INPUT
    except ResourceBound as e:
        click.echo(formatter.format_error(f"resource bound exceeded: {e}"), err=True)
        return EXIT_RESOURCE


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose or settings.debug else settings.log_level.upper()
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


# ============================================================================
# COMMAND LINE
# ============================================================================

FUNCTION_OPTION = click.option(
    "--function", "-f",
    type=click.Choice([s.value for s in FunctionSelector], case_sensitive=False),
    default=settings.default_function, show_default=True,
    help="Safe function: max, n or ek",
)
FORMAT_OPTION = click.option(
    "--format", "fmt",
    type=click.Choice(["table", "json"]),
    default=settings.default_format, show_default=True,
    help="Output format",
)
PROTOCOL_ARGUMENT = click.argument("file", type=click.Path(dir_okay=False, path_type=Path))


def _dispatch(ctx: click.Context, **fields) -> None:
    try:
        config = RunConfig(color=ctx.obj["color"], **fields)
    except ValidationError as e:
        for error in e.errors():
            click.echo(f"error: {error['msg']}", err=True)
        ctx.exit(EXIT_INPUT)
    ctx.exit(run(config))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(settings.app_version, prog_name=settings.app_name)
@click.option("--verbose", "-v", is_flag=True, help="Log analysis steps to standard error")
@click.option("--no-color", is_flag=True, help="Disable coloured output")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, no_color: bool):
    """Prove secrecy of cryptographic protocols with witness functions."""
    configure_logging(verbose)
    ctx.obj = {"color": settings.color and not no_color}


@cli.command()
@PROTOCOL_ARGUMENT
@FUNCTION_OPTION
@FORMAT_OPTION
@click.option("--context", type=click.Path(dir_okay=False, path_type=Path), help="Level and knowledge overrides")
@click.pass_context
def analyze(ctx: click.Context, file: Path, function: str, fmt: str, context: Optional[Path]):
    """Check that every role's sends never lower an atom's security level."""
    _dispatch(ctx, subcommand="analyze", input=file, function=function, format=fmt, context=context)


@cli.command()
@PROTOCOL_ARGUMENT
@FORMAT_OPTION
@click.option("--messages", is_flag=True, help="Also list the generalized message set")
@click.pass_context
def roles(ctx: click.Context, file: Path, fmt: str, messages: bool):
    """Print the generalized roles of a protocol."""
    _dispatch(ctx, subcommand="roles", input=file, format=fmt, messages=messages)


@cli.command()
@PROTOCOL_ARGUMENT
@FORMAT_OPTION
@click.option("--term", "-t", required=True, help="Message to look up; undeclared names are variables")
@click.pass_context
def origins(ctx: click.Context, file: Path, fmt: str, term: str):
    """List the generalized messages that unify with a term."""
    _dispatch(ctx, subcommand="origins", input=file, format=fmt, term=term)


@cli.command(name="eval")
@FUNCTION_OPTION
@FORMAT_OPTION
@click.option("--atom", "-a", required=True, help="Atom or variable to evaluate")
@click.option("--term", "-t", required=True, help="Message to evaluate in")
@click.option(
    "--context", required=True, type=click.Path(dir_okay=False, path_type=Path),
    help="Protocol file supplying keys, levels and declarations",
)
@click.pass_context
def evaluate(ctx: click.Context, function: str, fmt: str, atom: str, term: str, context: Path):
    """Evaluate a safe function on one atom of one message."""
    _dispatch(ctx, subcommand="eval", input=context, function=function, format=fmt, atom=atom, term=term)


@cli.command()
@PROTOCOL_ARGUMENT
@FUNCTION_OPTION
@FORMAT_OPTION
@click.option("--sessions", "-s", type=int, default=settings.oracle_sessions, show_default=True)
@click.option("--depth", "-d", type=int, default=settings.oracle_depth, show_default=True)
@click.option("--check-invariant", is_flag=True, help="Also check the function cannot be lowered by deduction")
@click.pass_context
def oracle(
    ctx: click.Context, file: Path, function: str, fmt: str, sessions: int, depth: int, check_invariant: bool
):
    """Search bounded executions for leaked secrets."""
    _dispatch(
        ctx, subcommand="oracle", input=file, function=function, format=fmt,
        sessions=sessions, depth=depth, check_invariant=check_invariant,
    )


def main() -> None:
    cli(prog_name=settings.app_name)


if __name__ == "__main__":
    main()
