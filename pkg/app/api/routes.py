from fastapi import APIRouter, Body, HTTPException, Query
from typing import List, Optional
import logging

from app.core.exceptions import VerificationError
from app.models.schemas import ActionRequest, MukaiRequest, RunRecord, WitnessRequest
from app.services import runs

router = APIRouter()
logger = logging.getLogger(__name__)


def _run(call, *args, **kwargs) -> RunRecord:
    """Run a verification, mapping domain errors to HTTP 400"""
    try:
        return call(*args, **kwargs)
    except VerificationError as e:
        logger.warning(f"{type(e).__name__}: {e}")
        raise HTTPException(status_code=400, detail=f"{type(e).__name__}: {e}")


@router.get("/indices", response_model=RunRecord)
def get_indices(n: Optional[int] = None, b2: Optional[int] = None, family: Optional[str] = None):
    """Possible indices for n, b2 or a known family"""
    return _run(runs.run_indices, n, b2, family)


@router.get("/hodge", response_model=RunRecord)
def get_hodge(n: int, d: int):
    return _run(runs.run_hodge, n, d)


@router.get("/families", response_model=RunRecord)
def get_families(n: int = Query(default=1, ge=1)):
    return _run(runs.run_families, n)


@router.post("/action", response_model=RunRecord)
def post_action(request: ActionRequest, expect_free: bool = False):
    """Invariance and freeness verdicts for a group action"""
    return _run(runs.run_action, request, expect_free)


@router.post("/verify-witness", response_model=RunRecord)
def post_verify_witness(request: WitnessRequest):
    return _run(runs.run_verify_witness, request)


@router.post("/fixed-lengths", response_model=RunRecord)
def post_fixed_lengths(request: ActionRequest, max_len: int = Query(default=6, ge=1)):
    return _run(runs.run_fixed_lengths, request, max_len)


@router.get("/q2hilb", response_model=RunRecord)
def get_q2hilb(set_size: int, n: int):
    return _run(runs.run_q2hilb, set_size, n)


@router.get("/lattice/{name}", response_model=RunRecord)
def get_lattice(name: str, roots_bound: Optional[int] = None):
    return _run(runs.run_lattice, name, roots_bound)


@router.post("/lattice", response_model=RunRecord)
def post_lattice(gram: List[List[int]] = Body(...), roots_bound: Optional[int] = None):
    """Report on a Gram matrix given in the request body"""
    return _run(runs.run_lattice, "file", roots_bound, gram)


@router.post("/mukai", response_model=RunRecord)
def post_mukai(request: MukaiRequest):
    return _run(runs.run_mukai, request.r, request.chi, request.l)
