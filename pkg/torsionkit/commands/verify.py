# commands/verify.py
import logging
from pathlib import Path
from typing import Optional

import typer

from torsionkit.commands.common import EXIT_OK, EXIT_UNEQUAL, console, emit, run_safe
from torsionkit.models import load_complex, verification_read
from torsionkit.services import formulas
from torsionkit.services.complex import validate
from torsionkit.services.formulas import VerificationReport

logger = logging.getLogger(__name__)

app = typer.Typer(help="Check an identity and emit a verification report.", no_args_is_help=True)


def _report(report: VerificationReport) -> int:
    style = "green" if report.holds else "red"
    console.print(f"[{style}]{report.identity}[/{style}]: lhs = {report.lhs}, rhs = {report.rhs}, holds = {report.holds}")
    failed = [name for name, ok in report.checks.items() if not ok]
    if failed:
        console.print(f"Failed checks: {', '.join(failed)}")
    emit(verification_read(report))
    return EXIT_OK if report.holds else EXIT_UNEQUAL


@app.command()
def thm1(
    seed: Optional[int] = typer.Option(None, "--seed"),
    rescale: bool = typer.Option(False, "--rescale", help="Rescale the pants basis by random rationals."),
) -> None:
    """Squared pants torsion against the period data of the doubled pants."""
    run_safe(lambda: _report(formulas.thm1_verify(seed=seed, rescale=rescale)))


@app.command()
def thm2(
    genus: int = typer.Argument(...),
    boundary: int = typer.Argument(...),
    seed: Optional[int] = typer.Option(None, "--seed"),
) -> None:
    """Torsion of Σ_{g,n} against the product of its pants torsions."""
    run_safe(lambda: _report(formulas.thm2_verify(genus, boundary, seed=seed)))


@app.command()
def case3(genus: int = typer.Argument(...)) -> None:
    """Closing gluing Σ_{g-1,1} ∪ Σ_{1,1}."""
    run_safe(lambda: _report(formulas.case3_verify(genus)))


@app.command()
def mv(genus: int = typer.Argument(...), boundary: int = typer.Argument(...)) -> None:
    """Adapted-basis multiplicativity at every gluing step."""
    run_safe(lambda: _report(formulas.mv_verify(genus, boundary)))


@app.command()
def period(genus: int = typer.Argument(...), seed: Optional[int] = typer.Option(None, "--seed")) -> None:
    """Torsion of a closed surface against its period-matrix prediction."""
    run_safe(lambda: _report(formulas.period_verify(genus, seed=seed)))


@app.command()
def independence(
    file: Path = typer.Argument(..., exists=True, dir_okay=False),
    trials: Optional[int] = typer.Option(None, "--trials"),
    seed: Optional[int] = typer.Option(None, "--seed"),
) -> None:
    """Torsion under random boundary bases and sections."""
    def body():
        c = load_complex(file.read_text())
        validate(c)
        return _report(formulas.independence_verify(c, trials=trials, seed=seed))

    run_safe(body)


@app.command()
def calculators(
    seed: Optional[int] = typer.Option(None, "--seed"),
    trials: Optional[int] = typer.Option(None, "--trials"),
) -> None:
    """Handlebody identity and multiplicativity of the 3-manifold calculators."""
    run_safe(lambda: _report(formulas.calculators_verify(seed=seed, trials=trials)))
