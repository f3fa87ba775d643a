# main.py

# --- Imports ---
import logging
from typing import Optional, Sequence

import typer

from torsionkit.commands import algebra, surfaces, verify
from torsionkit.config import configure_logging

logger = logging.getLogger(__name__)

# --- Application ---
app = typer.Typer(
    name="torsionkit",
    help=(
        "Exact Reidemeister torsion of surfaces built from pants.\n\n"
        "Every command writes one JSON document to stdout.\n"
        "Exit codes: 0=success or identity holds, 1=identity fails, 2=bad input."
    ),
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides TORSIONKIT_LOG_LEVEL."),
) -> None:
    configure_logging(log_level.upper() if log_level else None)
    logger.info("torsionkit starting")


# --- Include Commands ---
app.command("build")(surfaces.build)
app.command("homology")(surfaces.homology)
app.command("decompose")(surfaces.decompose)
app.command("torsion")(algebra.torsion)
app.add_typer(verify.app, name="verify")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the CLI and returns its exit code instead of exiting."""
    try:
        app(args=list(argv) if argv is not None else None, prog_name="torsionkit")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else (0 if e.code is None else 2)
    return 0


if __name__ == "__main__":
    raise SystemExit(run())
