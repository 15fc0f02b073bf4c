from pydantic import BaseModel, Field, field_validator
from typing import Any, Dict, List, Literal, Optional

from app.core.config import settings
from app.core.exceptions import InvalidActionSpecError, VerificationError
from app.core.reference_data import get_row
from app.services.cycles import ActionSpec, FreenessVerdict, ScanEntry
from app.services.lattice import AdmissibilityReport
from app.services.torsion import PeriodBasis, optional_point
from app.utils.validators import parse_levels


class ActionRequest(BaseModel):
    row: Optional[int] = Field(default=None, ge=1, le=7)
    lieberman: bool = False
    n: int = Field(..., ge=1)
    z: Optional[str] = None
    a: Optional[str] = None
    a_prime: Optional[str] = None
    levels: Optional[List[int]] = None
    mode: Literal["criterion", "bruteforce", "scan", "invariance", "coherence"] = "criterion"
    with_bruteforce: bool = False

    @field_validator("levels")
    @classmethod
    def check_levels(cls, value):
        if value is not None:
            try:
                parse_levels(value)
            except VerificationError as e:
                raise ValueError(str(e))
        return value

    def to_spec(self) -> ActionSpec:
        """
        Build the action described by the request

        Raises:
            InvalidActionSpecError: If neither or both of row and lieberman are given
            PointSyntaxError: If a point does not parse
        """
        if self.lieberman == (self.row is not None):
            raise InvalidActionSpecError("Give exactly one of --row and --lieberman")
        if self.lieberman:
            a = optional_point(self.a, PeriodBasis.GENERIC)
            if a is None:
                raise InvalidActionSpecError("The Lieberman involution needs --a")
            return ActionSpec.lieberman(a, optional_point(self.a_prime, PeriodBasis.GENERIC))
        basis = PeriodBasis(get_row(self.row)["basis"])
        return ActionSpec.bielliptic(self.row, optional_point(self.z, basis))

    def level_pair(self):
        return parse_levels(self.levels)


class WitnessRequest(ActionRequest):
    points: List[str] = Field(..., min_length=1)
    element_power: int = Field(default=1, ge=1)


class MukaiRequest(BaseModel):
    r: int
    l: Optional[List[int]] = None
    chi: int


class VerdictRecord(BaseModel):
    spec: str
    n: int
    status: str
    condition_fired: str
    element: Optional[str] = None
    element_power: Optional[int] = None
    criterion_value: Optional[str] = None
    levels: Optional[List[int]] = None
    witness: Optional[List[str]] = None
    notes: List[str] = []

    @classmethod
    def from_verdict(cls, spec: ActionSpec, n: int, verdict: FreenessVerdict) -> "VerdictRecord":
        return cls(
            spec=spec.label,
            n=n,
            status=verdict.status.value,
            condition_fired=verdict.condition_fired,
            element=verdict.element,
            element_power=verdict.element_power,
            criterion_value=str(verdict.criterion_value) if verdict.criterion_value is not None else None,
            levels=list(verdict.levels) if verdict.levels else None,
            witness=verdict.witness.to_strings() if verdict.witness else None,
            notes=list(verdict.notes),
        )


class ScanRow(BaseModel):
    z: str
    status: str
    condition_fired: str
    element: Optional[str] = None
    bruteforce_status: Optional[str] = None

    @classmethod
    def from_entry(cls, entry: ScanEntry) -> "ScanRow":
        return cls(
            z=str(entry.z),
            status=entry.verdict.status.value,
            condition_fired=entry.verdict.condition_fired,
            element=entry.verdict.element,
            bruteforce_status=entry.bruteforce.status.value if entry.bruteforce else None,
        )


class IndexReport(BaseModel):
    n: Optional[int] = None
    b2: Optional[int] = None
    family: Optional[str] = None
    admissible: Optional[List[int]] = None
    phi_bound: Optional[List[int]] = None
    candidates: Optional[List[int]] = None
    published: Optional[List[int]] = None
    published_only: Optional[List[int]] = None
    computed_only: Optional[List[int]] = None


class HodgeReport(BaseModel):
    n: int
    d: int
    dim: int
    chi: int
    hodge_row: List[int]
    alternating_sum: int
    fundamental_group_order: int
    canonical_class_order: int
    torsion_of_picard: str


class FamilyRow(BaseModel):
    family: str
    n: int
    dim: int
    chi: int
    b2: int
    candidates: List[int]


class LatticeReport(BaseModel):
    name: str
    rank: int
    gram: List[List[int]]
    signature: List[int]
    determinant: int
    even: bool
    discriminant: List[int]
    basis: Optional[List[List[int]]] = None
    matches_target: Optional[bool] = None
    root_bound: Optional[int] = None
    roots: Optional[int] = None


class MukaiReport(BaseModel):
    r: int
    l: List[int]
    s: int
    chi: int
    v_squared: int
    dim: int
    n: int
    primitive: bool
    chi_odd: bool
    nonnegative: bool
    n_odd: bool
    quotient_dim: int
    quotient_index: int
    quotient_chi: Optional[int] = None
    admissible: bool
    failures: List[str] = []
    notes: List[str] = []

    @classmethod
    def from_report(cls, report: AdmissibilityReport) -> "MukaiReport":
        v = report.vector
        return cls(
            r=v.r, l=list(v.l), s=v.s, chi=report.chi, v_squared=report.v_squared, dim=report.dim,
            n=report.n, primitive=report.primitive, chi_odd=report.chi_odd, nonnegative=report.nonnegative,
            n_odd=report.n_odd, quotient_dim=report.quotient_dim, quotient_index=report.quotient_index,
            quotient_chi=report.quotient_chi, admissible=report.admissible,
            failures=list(report.failures), notes=list(report.notes),
        )


class RunRecord(BaseModel):
    command: str
    parameters: Dict[str, Any]
    result: Any = None
    verdicts: List[VerdictRecord] = []
    version: str = settings.VERSION
    seed: Optional[int] = None
    negative_finding: bool = False
