from pydantic import BaseModel
from typing import Optional


class FeasibilityReport(BaseModel):
    n: int
    R: float
    K_size: int
    x: float
    kprime: int
    d: int
    M: float
    log_M: float
    N: int
    D: int = 1
    subset_separation: float = 5.0

    # natural log throughout, except the threshold which is log base 2
    log_event_count_bound: float
    log_event_count_intermediate: Optional[float] = None
    log_single_event_bound: float
    log_single_event_exact: float  # kprime * ln(1 - x/2)
    union_log_margin: float  # log_event_count_bound + log_single_event_bound
    margin_a: float
    margin_b: float
    feasible: bool

    threshold_log2: float  # 10^{4n} * log2(R)
    meets_threshold: bool  # K_size > threshold_log2


class CountBoundResponse(BaseModel):
    n: int
    R: float
    intermediate: float
    final: float
    volume_count: float  # R^n / vol(B(t/2))
    gamma_bound_holds: bool


class MinKResponse(BaseModel):
    n: int
    R: float
    min_K: int
    kprime: int
    threshold_log2: float
    ratio_to_threshold: float


class SignPatternResponse(BaseModel):
    M: float
    N: int
    D: int
    bound: float
    log_bound: float
