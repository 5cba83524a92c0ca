# Bounds Router - FR-005
from fastapi import APIRouter, Query
from typing import Optional

from app.geometry import bounds
from app.schemas.bounds import FeasibilityReport, CountBoundResponse, MinKResponse, SignPatternResponse

router = APIRouter(prefix="/bounds", tags=["bounds"])


@router.get("/feasibility", response_model=FeasibilityReport)
def feasibility(
    n: int = Query(..., ge=1),
    R: float = Query(..., gt=2),
    K: int = Query(..., ge=1),
    d: Optional[int] = None
):
    """Union-bound margins for |K| points in a d-dimensional affine span"""
    return bounds.theorem_feasibility(n, R, K, d)


@router.get("/min-k", response_model=MinKResponse)
def min_k(n: int = Query(..., ge=1), R: float = Query(..., gt=2)):
    """Smallest |K| for which the union bound goes through"""
    return bounds.min_k_response(n, R)


@router.get("/ell-m", response_model=FeasibilityReport)
def ell_m(n: int = Query(..., ge=1), m: int = Query(..., ge=2)):
    return bounds.ell_m_feasibility(n, m)


@router.get("/sign-pattern", response_model=SignPatternResponse)
def sign_pattern(M: float, N: int, D: int = 1):
    return bounds.sign_pattern_response(M, N, D)


@router.get("/count-bound", response_model=CountBoundResponse)
def count_bound(n: int = Query(..., ge=1), R: float = Query(..., gt=0)):
    """Upper bounds on the size of a 1/3-separated set on the torus"""
    return bounds.count_bound_response(n, R)
