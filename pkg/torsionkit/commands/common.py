# commands/common.py
import logging
from typing import Callable

import typer
from rich.console import Console
from sqlmodel import SQLModel

from torsionkit.errors import TorsionKitError
from torsionkit.models import to_json

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_UNEQUAL = 1
EXIT_INPUT = 2


def emit(model: SQLModel) -> None:
    """Writes the single JSON document of this invocation to stdout."""
    typer.echo(to_json(model))


def run_safe(fn: Callable[[], int | None]) -> None:
    """Runs a command body and maps failures to exit codes."""
    try:
        code = fn() or EXIT_OK
    except (TorsionKitError, ValueError) as e:
        # pydantic ValidationError and JSONDecodeError are both ValueErrors
        logger.error(f"Command failed: {e}", exc_info=True)
        console.print(f"[red bold]Error:[/red bold] {e}")
        raise typer.Exit(code=EXIT_INPUT)
    except OSError as e:
        console.print(f"[red bold]Error:[/red bold] {e}")
        raise typer.Exit(code=EXIT_INPUT)
    if code != EXIT_OK:
        raise typer.Exit(code=code)
