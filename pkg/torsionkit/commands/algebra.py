# commands/algebra.py
import logging
from pathlib import Path
from typing import Optional

import typer

from torsionkit.commands.common import EXIT_UNEQUAL, console, emit, run_safe
from torsionkit.config import get_settings
from torsionkit.models import load_complex, torsion_report
from torsionkit.services.complex import homology, standard_bases, validate
from torsionkit.services.torsion import Convention, random_choices
from torsionkit.services.torsion import torsion as compute_torsion

logger = logging.getLogger(__name__)


def torsion(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="Complex or surface JSON."),
    seed: Optional[int] = typer.Option(None, "--seed", help="First seed for the random choices."),
    trials: Optional[int] = typer.Option(None, "--trials", min=0, help="Number of seeded random choices."),
    convention: Convention = typer.Option(Convention.LITERAL, "--convention", case_sensitive=False),
) -> None:
    """Torsion with the cell-induced homology bases, default and random choices."""
    def body():
        settings = get_settings()
        first = settings.seed if seed is None else seed
        count = settings.trials if trials is None else trials
        c = load_complex(file.read_text())
        validate(c)
        data = homology(c)
        h = standard_bases(data)
        reference = compute_torsion(c, h, convention=convention, data=data)
        values = [
            compute_torsion(c, h, random_choices(c, data, seed=first + k), convention=convention, data=data)
            for k in range(count)
        ]
        report = torsion_report(reference, values, first)
        console.print(f"|T| = {report.abs} over {count} random choices")
        emit(report)
        return 0 if report.choice_independent else EXIT_UNEQUAL

    run_safe(body)
