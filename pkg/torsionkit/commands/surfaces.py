# commands/surfaces.py
import logging
from pathlib import Path
from typing import Optional

import typer

from torsionkit.commands.common import console, emit, run_safe
from torsionkit.models import decomposition_report, homology_report, load_complex, surface_to_payload
from torsionkit.services import surf
from torsionkit.services.complex import BasedChainComplex, homology as compute_homology, validate

logger = logging.getLogger(__name__)

NAMED_SURFACES = {
    "circle": surf.circle,
    "cylinder": surf.cylinder,
    "pants": surf.pants,
}


def _named(name: str) -> surf.SurfaceComplex:
    try:
        return NAMED_SURFACES[name]()
    except KeyError:
        raise typer.BadParameter(f"Unknown surface {name!r}; choose one of {sorted(NAMED_SURFACES)}.", param_hint="--named") from None


def _build(genus: Optional[int], boundary: Optional[int], named: Optional[str]) -> surf.SurfaceComplex:
    if named is not None:
        return _named(named)
    if genus is None or boundary is None:
        raise typer.BadParameter("Give both G and N, or --named.")
    x, _ = surf.surface(genus, boundary)
    return x


def build(
    genus: Optional[int] = typer.Argument(None, help="Genus g."),
    boundary: Optional[int] = typer.Argument(None, help="Number of boundary circles n."),
    named: Optional[str] = typer.Option(None, "--named", help="circle, cylinder or pants."),
) -> None:
    """Emit the cell structure of Σ_{g,n} or of a named piece."""
    def body():
        x = _build(genus, boundary, named)
        console.print(f"Built surface with cells {x.complex.dims}, χ = {x.euler_characteristic}")
        emit(surface_to_payload(x))

    run_safe(body)


def _homology_source(target: Optional[str], boundary: Optional[int], named: Optional[str]) -> BasedChainComplex:
    """FILE, or G N, or --named."""
    if named is not None:
        return _named(named).complex
    if target is None:
        raise typer.BadParameter("Give FILE, G N or --named.")
    if boundary is not None:
        try:
            genus = int(target)
        except ValueError:
            raise typer.BadParameter(f"Genus must be an integer, got {target!r}.", param_hint="G") from None
        return surf.surface(genus, boundary)[0].complex
    path = Path(target)
    if not path.is_file():
        raise typer.BadParameter(f"File {target!r} does not exist.", param_hint="FILE")
    return load_complex(path.read_text())


def homology(
    target: Optional[str] = typer.Argument(None, metavar="FILE|G", help="Complex or surface JSON, or the genus g."),
    boundary: Optional[int] = typer.Argument(None, metavar="[N]", help="Number of boundary circles n, after G."),
    named: Optional[str] = typer.Option(None, "--named", help="circle, cylinder or pants."),
) -> None:
    """Betti numbers and homology representatives."""
    def body():
        c = _homology_source(target, boundary, named)
        validate(c)
        data = compute_homology(c)
        console.print(f"Betti numbers: {data.betti}")
        emit(homology_report(c, data))

    run_safe(body)


def decompose(
    genus: int = typer.Argument(..., help="Genus g."),
    boundary: int = typer.Argument(..., help="Number of boundary circles n."),
) -> None:
    """Emit the pants decomposition of Σ_{g,n}."""
    def body():
        d = surf.pants_decomposition(genus, boundary)
        console.print(f"Σ_({genus},{boundary}) splits into {d.piece_count} pieces")
        emit(decomposition_report(d))

    run_safe(body)
