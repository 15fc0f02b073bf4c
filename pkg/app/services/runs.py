"""
Verification runs shared by the command line and the HTTP API.

Each run returns a RunRecord; `negative_finding` marks a verified negative result
(a non-free action, an invalid witness, a failed hypothesis).
"""
from typing import List, Optional, Sequence
import logging

from app.core.exceptions import LatticeInputError, PreconditionError
from app.core.reference_data import PUBLISHED_INDEX_TABLE
from app.models.schemas import (
    ActionRequest,
    FamilyRow,
    HodgeReport,
    IndexReport,
    LatticeReport,
    MukaiReport,
    RunRecord,
    ScanRow,
    VerdictRecord,
    WitnessRequest,
)
from app.services import cycles, lattice, numerics
from app.services.lattice import IntegralLattice, MukaiVector
from app.services.torsion import parse_product_point

logger = logging.getLogger(__name__)

LATTICE_NAMES = ("k3", "antiinvariant-k3", "invariant-k3", "e8", "h", "ns", "file")


def run_indices(n: Optional[int] = None, b2: Optional[int] = None, family: Optional[str] = None) -> RunRecord:
    if n is None and b2 is None and family is None:
        raise PreconditionError("Give at least one of n, b2 and family")
    report = IndexReport(n=n, b2=b2, family=family)
    if family is not None:
        invariants = numerics.family_invariants(family, n)
        report.n = invariants.n
        report.b2 = b2 = invariants.b2
        report.candidates = sorted(numerics.family_index_candidates(family, invariants.n))
    if report.n is not None:
        report.admissible = sorted(numerics.admissible_indices(report.n))
    if b2 is not None:
        report.phi_bound = sorted(numerics.phi_bound_indices(b2))
        if b2 in PUBLISHED_INDEX_TABLE:
            diff = numerics.index_table_diff(b2)
            report.published = diff["published"]
            report.published_only = diff["published_only"]
            report.computed_only = diff["computed_only"]
    return RunRecord(command="indices", parameters={"n": n, "b2": b2, "family": family},
                     result=report.model_dump())


def run_hodge(n: int, d: int) -> RunRecord:
    summary = numerics.shape_summary(numerics.EnriquesShape(n, d))
    return RunRecord(command="hodge", parameters={"n": n, "d": d}, result=HodgeReport(**summary).model_dump())


def run_families(n: int = 1) -> RunRecord:
    rows = []
    for family in numerics.Family:
        invariants = numerics.family_invariants(family, None if family.value.startswith("ogrady") else n)
        rows.append(FamilyRow(
            family=family.value, n=invariants.n, dim=invariants.dim, chi=invariants.chi, b2=invariants.b2,
            candidates=sorted(numerics.family_index_candidates(family, invariants.n)),
        ).model_dump())
    return RunRecord(command="families", parameters={"n": n}, result=rows)


def run_action(request: ActionRequest, expect_free: bool = False) -> RunRecord:
    spec = request.to_spec()
    n = request.n
    levels = request.level_pair()
    parameters = request.model_dump(exclude_none=True)

    if request.mode == "scan":
        if spec.is_lieberman:
            raise PreconditionError("scan needs a bielliptic row")
        entries = cycles.scan_z(spec.row, n, with_bruteforce=request.with_bruteforce)
        rows = [ScanRow.from_entry(entry).model_dump() for entry in entries]
        free = sum(1 for row in rows if row["status"] == cycles.VerdictStatus.FREE_BY_CRITERION.value)
        return RunRecord(command="action", parameters=parameters, result=rows,
                         negative_finding=expect_free and free == 0)

    if request.mode == "invariance":
        report = cycles.invariance_bruteforce(spec, n, levels)
        result = {
            "criterion": cycles.invariance_criterion(spec, n),
            "bruteforce": report.holds,
            "checked": report.checked,
            "levels": list(report.levels),
            "counterexample": report.counterexample.to_strings() if report.counterexample else None,
            "image_sum": str(report.image_sum) if report.image_sum else None,
        }
        return RunRecord(command="action", parameters=parameters, result=result,
                         negative_finding=not report.holds)

    verdicts = []
    if request.mode in ("criterion", "coherence"):
        verdicts.append(cycles.freeness_criterion(spec, n))
    if request.mode in ("bruteforce", "coherence"):
        verdicts.append(cycles.freeness_bruteforce(spec, n, levels))
    result = None
    if request.mode == "coherence":
        result = {"coherent": cycles.CoherenceReport(*verdicts).coherent}
    not_free = any(v.status == cycles.VerdictStatus.NOT_FREE for v in verdicts)
    return RunRecord(
        command="action",
        parameters=parameters,
        result=result,
        verdicts=[VerdictRecord.from_verdict(spec, n, v) for v in verdicts],
        negative_finding=expect_free and not_free,
    )


def run_verify_witness(request: WitnessRequest) -> RunRecord:
    spec = request.to_spec()
    points = [parse_product_point(p, spec.basis_e, spec.basis_f) for p in request.points]
    cycle = cycles.ZeroCycle.of(points, spec.kernel)
    valid = cycles.verify_witness(spec, request.n, cycle, request.element_power)
    logger.info(f"Witness for {spec.label}, n={request.n}: {'valid' if valid else 'invalid'}")
    return RunRecord(
        command="verify-witness",
        parameters=request.model_dump(exclude_none=True),
        result={"valid": valid, "cycle": cycle.to_strings()},
        negative_finding=not valid,
    )


def run_fixed_lengths(request: ActionRequest, max_len: int) -> RunRecord:
    spec = request.to_spec()
    report = cycles.fixed_cycle_length_check(spec, max_len, request.level_pair())
    result = {
        "holds": report.holds,
        "d": report.d,
        "lengths": list(report.lengths_with_fixed),
        "counts": {str(k): v for k, v in report.counts.items()},
        "examples": {str(k): c.to_strings() for k, c in report.examples.items()},
        "levels": list(report.levels),
    }
    return RunRecord(command="fixed-lengths", parameters={**request.model_dump(exclude_none=True),
                                                          "max_len": max_len},
                     result=result, negative_finding=not report.holds)


def run_q2hilb(set_size: int, n: int) -> RunRecord:
    free = cycles.q2hilb_model_check(set_size, n)
    return RunRecord(command="q2hilb", parameters={"set_size": set_size, "n": n},
                     result={"free": free, "n_odd": n % 2 == 1}, negative_finding=not free)


def lattice_report(name: str, target: IntegralLattice, basis: Optional[Sequence[Sequence[int]]] = None,
                   expected: Optional[IntegralLattice] = None, root_bound: Optional[int] = None) -> LatticeReport:
    det = lattice.determinant(target)
    roots = None
    if root_bound is not None:
        roots = len(lattice.roots_in_box(target, -2, root_bound))
    return LatticeReport(
        name=name,
        rank=target.rank,
        gram=[list(row) for row in target.gram],
        signature=list(lattice.signature(target)),
        determinant=det,
        even=lattice.is_even(target),
        discriminant=lattice.discriminant_group(target) if det else [],
        basis=[list(v) for v in basis] if basis is not None else None,
        matches_target=target.gram == expected.gram if expected is not None else None,
        root_bound=root_bound,
        roots=roots,
    )


def run_lattice(name: str, root_bound: Optional[int] = None, gram: Optional[List[List[int]]] = None) -> RunRecord:
    """
    Raises:
        LatticeInputError: If the name is unknown or a given Gram matrix is malformed
    """
    basis = expected = None
    if name in ("k3", "antiinvariant-k3", "invariant-k3"):
        k3, involution = lattice.k3_lattice_with_involution()
        target = k3
        if name != "k3":
            sub = lattice.eigenlattice(k3, involution, -1 if name == "antiinvariant-k3" else 1)
            target, basis = sub.lattice, sub.basis
            if name == "antiinvariant-k3":
                h = lattice.hyperbolic_plane()
                expected = lattice.direct_sum(lattice.e8(-2), h, lattice.twist(h, 2))
            else:
                expected = lattice.direct_sum(lattice.e8(-2), lattice.twist(lattice.hyperbolic_plane(), 2))
    elif name == "e8":
        target = lattice.e8(-1)
    elif name == "h":
        target = lattice.hyperbolic_plane()
    elif name == "ns":
        target = lattice.enriques_ns_model()
    elif name == "file":
        if gram is None:
            raise LatticeInputError("lattice 'file' needs a Gram matrix")
        target = IntegralLattice(gram, name="file")
    else:
        raise LatticeInputError(f"Unknown lattice {name!r}; choose from {', '.join(LATTICE_NAMES)}")
    report = lattice_report(name, target, basis, expected, root_bound)
    return RunRecord(command="lattice", parameters={"name": name, "root_bound": root_bound},
                     result=report.model_dump(), negative_finding=report.matches_target is False)


def run_mukai(r: int, chi: int, l: Optional[List[int]] = None) -> RunRecord:
    ns = lattice.enriques_ns_model()
    v = MukaiVector.from_chi(r, l if l is not None else [0] * ns.rank, chi)
    report = MukaiReport.from_report(lattice.moduli_admissibility(v, ns, chi))
    return RunRecord(command="mukai", parameters={"r": r, "l": list(v.l), "chi": chi},
                     result=report.model_dump(), negative_finding=not report.admissible)
