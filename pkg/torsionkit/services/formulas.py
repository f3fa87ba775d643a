# services/formulas.py
"""Identity verifiers and torsion calculators built on the surface pipeline.

Every identity is compared in squared form where a square root would appear,
so all values stay exact rationals.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Sequence

import numpy as np

from torsionkit.config import get_settings
from torsionkit.errors import CalculatorError, SurfaceError
from torsionkit.models import les_report, pairing_report
from torsionkit.services.complex import BasedChainComplex, GradedBases, homology, standard_bases
from torsionkit.services.mv import AdaptedStep, MVBases, adapt_pieces, adapt_whole, multiplicativity
from torsionkit.services.pairing import fundamental_class, period_determinants, symplectic_basis
from torsionkit.services.ratlin import BasisList
from torsionkit.services.surf import SurfaceComplex, assemble, double, pants, surface
from torsionkit.services.torsion import Convention, random_choices, torsion, torsion_of_direct_sum, torsion_oracle

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity check.

    ``equal`` compares ``lhs`` and ``rhs`` only; ``checks`` holds the side
    conditions verified along the way.
    """
    identity: str
    lhs: Fraction
    rhs: Fraction
    witness: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def holds(self) -> bool:
        return self.equal and all(self.checks.values())


# --- Helpers ---

def _random_factor(rng: np.random.Generator) -> Fraction:
    numerator = int(rng.integers(1, 6)) * (1 if rng.integers(0, 2) else -1)
    return Fraction(numerator, int(rng.integers(1, 5)))


def _basis_strings(basis: BasisList) -> list[list[str]]:
    return [[str(a) for a in v] for v in basis]


def _bases_strings(h: GradedBases) -> list[list[list[str]]]:
    return [_basis_strings(h[q]) for q in range(len(h))]


def _abs_torsion(c: BasedChainComplex, h: GradedBases, convention: Convention = Convention.LITERAL) -> Fraction:
    return torsion(c, h, convention=convention).abs_value


def _rescaled(h: GradedBases, factors: Sequence[Sequence[Fraction]]) -> GradedBases:
    for q, row in enumerate(factors):
        for i, f in enumerate(row):
            h = h.scaled(q, i, f)
    return h


def _step_witness(step: AdaptedStep) -> dict[str, Any]:
    return {
        "sequence": les_report(step.sequence, step.adapted, step.les_torsion).model_dump(mode="json"),
        "dims": list(step.sequence.dims),
        "normalization": str(step.normalization),
        "coefficient_determinants": {str(p): str(d) for p, d in step.adapted.coefficient_determinants().items()},
    }


# --- Pants torsion and the doubled pants ---

def thm1_verify(seed: int | None = None, rescale: bool = False) -> VerificationReport:
    """|T(pants)|² against the period data of the doubled pants.

    The pants basis is the standard one, optionally rescaled by random
    rationals drawn from ``seed``; both copies carry the same basis. The
    closed surface gets the adapted basis that makes the sequence torsion 1.
    """
    p = pants()
    x, dec = double(p)
    start = MVBases.standard(dec)
    factors: list[list[Fraction]] = []
    if rescale:
        rng = np.random.default_rng(get_settings().seed if seed is None else seed)
        factors = [[_random_factor(rng) for _ in range(len(start.a[q]))] for q in range(len(start.a))]
        start = MVBases(start.x, _rescaled(start.a, factors), _rescaled(start.b, factors), start.i)

    step = adapt_whole(dec, start)
    hx = step.bases.x
    lhs = _abs_torsion(dec.a, step.bases.a) * _abs_torsion(dec.b, step.bases.b)
    whole = _abs_torsion(x.complex, hx)
    det_period, det_delta = period_determinants(x, hx[1].vectors, hx[0][0], hx[2][0])
    rhs = abs(det_period / det_delta)

    lhs_reciprocal = (
        _abs_torsion(dec.a, step.bases.a, Convention.RECIPROCAL)
        * _abs_torsion(dec.b, step.bases.b, Convention.RECIPROCAL)
    )
    rhs_reciprocal = abs(det_delta / det_period)

    gamma = symplectic_basis(x)
    fundamental = fundamental_class(x)
    canonical = GradedBases((homology(x.complex).representatives[0], gamma.cycles,
                             BasisList(len(fundamental), (fundamental,))))
    canonical_period, canonical_delta = period_determinants(x, gamma.cycles.vectors, canonical[0][0], fundamental)
    canonical_torsion = _abs_torsion(x.complex, canonical)

    report = VerificationReport(
        identity="thm1",
        lhs=lhs,
        rhs=rhs,
        witness={
            "convention": Convention.LITERAL.value,
            "pants_torsion": str(_abs_torsion(p.complex, step.bases.a)),
            "whole_torsion": str(whole),
            "det_period": str(det_period),
            "det_delta": str(det_delta),
            "rhs_orientation": "det_period/det_delta",
            "reciprocal": {"lhs": str(lhs_reciprocal), "rhs": str(rhs_reciprocal)},
            "rescale_factors": [[str(f) for f in row] for row in factors],
            "adapted_whole_basis": _bases_strings(hx),
            "degree_factors": [str(f) for f in torsion(x.complex, hx).degree_factors],
            "sequence": _step_witness(step),
            "pairing": pairing_report(x, hx).model_dump(mode="json"),
            "canonical": {
                "det_period": str(canonical_period),
                "det_delta": str(canonical_delta),
                "whole_torsion": str(canonical_torsion),
            },
        },
        checks={
            "whole_equals_pants_squared": lhs == whole,
            "reciprocal_orientation": lhs_reciprocal == rhs_reciprocal,
            "canonical_period_is_one": canonical_period == 1 and canonical_delta == 1,
            "canonical_torsion_is_one": canonical_torsion == 1,
        },
    )
    logger.info(f"thm1: lhs={lhs}, rhs={rhs}, holds={report.holds}")
    return report


# --- Product over pants: walk the assembly tree ---

@dataclass(frozen=True)
class PantsWalk:
    """Result of propagating a basis of Σ_{g,n} down to its pants."""
    surface: SurfaceComplex
    basis: GradedBases
    pants_factors: tuple[Fraction, ...]
    other_factors: tuple[Fraction, ...]
    steps: tuple[dict[str, Any], ...]
    checks: dict[str, bool]


def walk_pants(g: int, n: int, scale: Fraction | None = None) -> PantsWalk:
    """Runs the adapted-basis step at every gluing, from Σ_{g,n} down to the pants.

    ``scale`` multiplies the first degree-1 basis vector of Σ_{g,n} first.
    Leaves that are not pants are cylinders with their standard bases.
    """
    assembly = assemble(g, n)
    top = assembly.surface
    basis = standard_bases(homology(top.complex))
    if scale is not None and len(basis) > 1 and len(basis[1]):
        basis = basis.scaled(1, 0, scale)
    built_by = {id(step.x): step for step in assembly.steps}
    pants_ids = {id(piece) for piece in assembly.pieces}
    pants_factors: list[Fraction] = []
    other_factors: list[Fraction] = []
    steps: list[dict[str, Any]] = []
    checks: dict[str, bool] = {}
    final_basis = basis

    def walk(x: SurfaceComplex, h: GradedBases) -> None:
        nonlocal final_basis
        step = built_by.get(id(x))
        if step is None:
            value = _abs_torsion(x.complex, h)
            (pants_factors if id(x) in pants_ids else other_factors).append(value)
            return
        adapted = adapt_pieces(step.decomposition, h, absorb="a", normalize_closed=step.case == "case3")
        if x is top:
            final_basis = adapted.bases.x
        lhs, rhs = multiplicativity(step.decomposition, adapted.bases, adapted.sequence)
        label = f"{step.case}:{','.join(step.circles)}"
        checks[label] = abs(lhs) == abs(rhs)
        steps.append({"case": step.case, "circles": list(step.circles), **_step_witness(adapted)})
        walk(step.a, adapted.bases.a)
        walk(step.b, adapted.bases.b)

    walk(top, basis)
    return PantsWalk(top, final_basis, tuple(pants_factors), tuple(other_factors), tuple(steps), checks)


def thm2_verify(g: int, n: int, seed: int | None = None) -> VerificationReport:
    """|T(Σ_{g,n})| against the product of its 2g−2+n pants torsions.

    The degree-1 basis of Σ_{g,n} is rescaled by a random rational drawn from
    ``seed`` before the walk.
    """
    rng = np.random.default_rng(get_settings().seed if seed is None else seed)
    scale = _random_factor(rng)
    result = walk_pants(g, n, scale)
    lhs = _abs_torsion(result.surface.complex, result.basis)
    rhs = prod(result.pants_factors, start=Fraction(1))
    expected = 2 * g - 2 + n
    checks = dict(result.checks)
    checks["pants_count"] = len(result.pants_factors) == expected
    checks["cylinders_trivial"] = all(f == 1 for f in result.other_factors)
    report = VerificationReport(
        identity="thm2",
        lhs=lhs,
        rhs=rhs,
        witness={
            "genus": g,
            "boundary": n,
            "scale": str(scale),
            "factor_count": len(result.pants_factors),
            "expected_factor_count": expected,
            "pants_factors": [str(f) for f in result.pants_factors],
            "cylinder_factors": [str(f) for f in result.other_factors],
            "surface_basis": _bases_strings(result.basis),
            "steps": list(result.steps),
        },
        checks=checks,
    )
    logger.info(f"thm2 ({g},{n}): lhs={lhs}, rhs={rhs}, holds={report.holds}")
    return report


def case3_verify(g: int) -> VerificationReport:
    """One closing step Σ_{g−1,1} ∪ Σ_{1,1} with δ_2 normalized."""
    if g < 2:
        raise SurfaceError(f"Closing a surface from two pieces needs genus at least 2, got {g}.")
    assembly = assemble(g, 0)
    step = assembly.steps_of("case3")[-1]
    dec = step.decomposition
    adapted = adapt_pieces(dec, normalize_closed=True)
    bases = adapted.bases
    lhs = _abs_torsion(dec.x, bases.x)
    t_a = _abs_torsion(dec.a, bases.a)
    t_b = _abs_torsion(dec.b, bases.b)
    t_i = _abs_torsion(dec.i, bases.i)
    rhs = t_a * t_b / t_i
    report = VerificationReport(
        identity="case3",
        lhs=lhs,
        rhs=rhs,
        witness={
            "genus": g,
            "rest_torsion": str(t_a),
            "torus_torsion": str(t_b),
            "circle_torsion": str(t_i),
            **_step_witness(adapted),
        },
        checks={"both_sides_positive": lhs > 0 and rhs > 0},
    )
    logger.info(f"case3 g={g}: lhs={lhs}, rhs={rhs}")
    return report


def mv_verify(g: int, n: int) -> VerificationReport:
    """Adapted-basis multiplicativity at every gluing step of Σ_{g,n}."""
    assembly = assemble(g, n)
    lhs = rhs = Fraction(1)
    steps = []
    checks: dict[str, bool] = {}
    for step in assembly.steps:
        adapted = adapt_pieces(step.decomposition, normalize_closed=step.case == "case3")
        left, right = multiplicativity(step.decomposition, adapted.bases, adapted.sequence)
        lhs *= abs(left)
        rhs *= abs(right)
        label = f"{step.case}:{','.join(step.circles)}"
        checks[label] = abs(left) == abs(right) and adapted.les_torsion == 1
        steps.append({"case": step.case, "circles": list(step.circles), "lhs": str(left), "rhs": str(right),
                      "factors": [str(f) for f in adapted.adapted.factors()], **_step_witness(adapted)})
    report = VerificationReport("mv", lhs, rhs, {"genus": g, "boundary": n, "steps": steps}, checks)
    logger.info(f"mv ({g},{n}): {len(steps)} steps, holds={report.holds}")
    return report


def independence_verify(c: BasedChainComplex, h: GradedBases | None = None, trials: int | None = None,
                        seed: int | None = None) -> VerificationReport:
    """Torsion with the default choices against ``trials`` seeded random choices."""
    settings = get_settings()
    trials = settings.trials if trials is None else trials
    seed = settings.seed if seed is None else seed
    if trials < 1:
        raise CalculatorError(f"trials must be positive, got {trials}.")
    data = homology(c)
    if h is None:
        h = standard_bases(data)
    reference = torsion(c, h, data=data)
    values = [torsion(c, h, random_choices(c, data, seed=seed + k), data=data) for k in range(trials)]
    mismatched = [seed + k for k, v in enumerate(values) if v.abs_value != reference.abs_value]
    witness: dict[str, Any] = {
        "trials": trials,
        "seed": seed,
        "default": str(reference.value),
        "values": [str(v.value) for v in values],
        "mismatched_seeds": mismatched,
    }
    checks = {"signs_agree": all(v.value == reference.value for v in values)}
    if c.total_dim <= settings.oracle_max_dim:
        oracle = torsion_oracle(c, h)
        witness["oracle"] = str(oracle.value)
        checks["oracle_agrees"] = oracle.value == reference.value
    worst = next((v.abs_value for v in values if v.abs_value != reference.abs_value), reference.abs_value)
    return VerificationReport("independence", reference.abs_value, worst, witness, checks)


def closed_surface_torsion(x: SurfaceComplex, h: GradedBases, convention: Convention = Convention.LITERAL) -> Fraction:
    """|T(Σ_g, h)| predicted from the period matrix and Δ_{0,2} alone."""
    det_period, det_delta = period_determinants(x, h[1].vectors, h[0][0], h[2][0])
    ratio = abs(det_period / det_delta)
    return ratio if convention is Convention.LITERAL else 1 / ratio


def period_verify(g: int, seed: int | None = None) -> VerificationReport:
    """Direct torsion of a rescaled basis of Σ_g against its period-data prediction."""
    x, _ = surface(g, 0)
    rng = np.random.default_rng(get_settings().seed if seed is None else seed)
    data = homology(x.complex)
    fundamental = fundamental_class(x)
    h = GradedBases((data.representatives[0], data.representatives[1], BasisList(len(fundamental), (fundamental,))))
    factors = [[_random_factor(rng) for _ in range(len(h[q]))] for q in range(3)]
    h = _rescaled(h, factors)
    lhs = _abs_torsion(x.complex, h)
    rhs = closed_surface_torsion(x, h)
    reciprocal = _abs_torsion(x.complex, h, Convention.RECIPROCAL)
    return VerificationReport(
        identity="period",
        lhs=lhs,
        rhs=rhs,
        witness={"genus": g, "rescale_factors": [[str(f) for f in row] for row in factors]},
        checks={"reciprocal_orientation": reciprocal == closed_surface_torsion(x, h, Convention.RECIPROCAL)},
    )


# --- Calculators ---

def _nonzero(name: str, value) -> Fraction:
    value = Fraction(value)
    if value == 0:
        raise CalculatorError(f"{name} must be nonzero.")
    return value


def double_3mfd_torsion(pants_torsions: Sequence[Sequence], mv_torsion) -> Fraction:
    """|T(N)|² from the pants torsions of each closed boundary surface and the sequence torsion.

    Boundary component i contributes its 2g_i − 2 pants.
    """
    mv = _nonzero("mv_torsion", mv_torsion)
    if not pants_torsions:
        raise CalculatorError("At least one boundary component is needed.")
    total = Fraction(1)
    for i, component in enumerate(pants_torsions):
        if not component:
            raise CalculatorError(f"Boundary component {i} has no pants torsions.")
        if len(component) % 2:
            raise CalculatorError(f"Boundary component {i} has {len(component)} pants; a closed surface has 2g−2.")
        for t in component:
            total *= abs(_nonzero("pants torsion", t))
    return total * abs(mv)


def handlebody_torsion_squared(pants_torsions: Sequence) -> Fraction:
    return double_3mfd_torsion([pants_torsions], 1)


def product_manifold_torsion(tM, tSigma, chiM: int, chiSigma: int, tH) -> Fraction:
    """|T(M × Σ)|² = |tM|^χ(Σ) · |tSigma|^χ(M) · |tH|."""
    tM = abs(_nonzero("tM", tM))
    tSigma = abs(_nonzero("tSigma", tSigma))
    tH = abs(_nonzero("tH", tH))
    return tM ** int(chiSigma) * tSigma ** int(chiM) * tH


def product_manifold_torsion_from_pants(tM, pants_torsions: Sequence, chiM: int, chiSigma: int, tH) -> Fraction:
    """Same as ``product_manifold_torsion`` with |T(Σ)| expanded into its pants."""
    if not pants_torsions or len(pants_torsions) != -chiSigma:
        raise CalculatorError(f"A closed surface with Euler characteristic {chiSigma} has {-chiSigma} pants.")
    t_sigma = prod((abs(_nonzero("pants torsion", t)) for t in pants_torsions), start=Fraction(1))
    return product_manifold_torsion(tM, t_sigma, chiM, chiSigma, tH)


def calculators_verify(seed: int | None = None, trials: int | None = None) -> VerificationReport:
    """Handlebody identity for genus 2 and 3, the torsion of their disjoint union, and multiplicativity on random inputs."""
    settings = get_settings()
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    trials = settings.trials if trials is None else trials
    checks: dict[str, bool] = {}
    handlebodies = []
    lhs = rhs = Fraction(1)
    walks = [walk_pants(g, 0) for g in (2, 3)]
    for g, result in zip((2, 3), walks):
        boundary = _abs_torsion(result.surface.complex, result.basis)
        squared = handlebody_torsion_squared(result.pants_factors)
        lhs *= squared
        rhs *= boundary
        handlebodies.append({"genus": g, "pants_factors": [str(f) for f in result.pants_factors],
                             "torsion_squared": str(squared), "boundary_torsion": str(boundary)})
        checks[f"handlebody_{g}"] = squared == boundary
    # the two closed surfaces side by side
    disjoint = torsion_of_direct_sum(walks[0].surface.complex, walks[0].basis,
                                     walks[1].surface.complex, walks[1].basis).abs_value
    checks["disjoint_union"] = disjoint == rhs

    failures = []
    for k in range(trials):
        r = _random_factor(rng)
        pants_list = [[_random_factor(rng) for _ in range(2)], [_random_factor(rng) for _ in range(4)]]
        mv = _random_factor(rng)
        base = double_3mfd_torsion(pants_list, mv)
        scaled = [[pants_list[0][0] * r, *pants_list[0][1:]], pants_list[1]]
        if double_3mfd_torsion(scaled, mv) != abs(r) * base or double_3mfd_torsion(pants_list, mv * r) != abs(r) * base:
            failures.append(k)
        tM, tS, tH = (_random_factor(rng) for _ in range(3))
        chiM, chiS = int(rng.integers(-4, 5)), -2 * int(rng.integers(1, 4))
        p0 = product_manifold_torsion(tM, tS, chiM, chiS, tH)
        if (product_manifold_torsion(tM * r, tS, chiM, chiS, tH) != abs(r) ** chiS * p0
                or product_manifold_torsion(tM, tS * r, chiM, chiS, tH) != abs(r) ** chiM * p0
                or product_manifold_torsion(tM, tS, chiM, chiS, tH * r) != abs(r) * p0):
            failures.append(k)
    checks["multiplicativity"] = not failures
    report = VerificationReport(
        identity="calculators",
        lhs=lhs,
        rhs=rhs,
        witness={"handlebodies": handlebodies, "disjoint_union_torsion": str(disjoint), "trials": trials, "failed_trials": sorted(set(failures))},
        checks=checks,
    )
    logger.info(f"calculators: holds={report.holds}")
    return report
