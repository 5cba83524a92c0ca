from pydantic import BaseModel
from typing import Any, List, Optional


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[Any] = None


class CoveringCertificate(BaseModel):
    passed: bool
    radius: float
    grid_pitch: float
    refine_depth: int = 0
    slack: float  # g * sqrt(n) / 2
    grid_points: int
    refined_cells: int = 0
    max_grid_distance: float  # farthest pitch-g grid point from the set
    uncovered: int = 0
    witness: Optional[List[float]] = None


class Certificate(BaseModel):
    name: str
    passed: bool
    checks: List[CheckResult] = []

    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class BuildReport(BaseModel):
    n: int
    R: float
    t: float
    x: float
    standard_x: bool
    seed: int
    strategy: str
    p_size: int
    count_bound_intermediate: float
    count_bound_final: float
    covering: Optional[CoveringCertificate] = None  # None for sets read from disk
    q_size: int
    s_size: int
    min_s_distance: Optional[float] = None


class VerificationReport(BaseModel):
    passed: bool
    checks: List[CheckResult]
    red_pair: Certificate


class RedPairWitness(BaseModel):
    first: List[float]
    second: List[float]
    distance: float
    trial: int


class SearchReport(BaseModel):
    kind: str  # red-pair, blue-line, blue-placement
    found: bool
    trials: int
    seed: int
    m: Optional[int] = None
    points: Optional[List[List[float]]] = None
    base: Optional[List[float]] = None
    direction: Optional[List[float]] = None
    rotation: Optional[List[List[float]]] = None
    translation: Optional[List[float]] = None
    distance: Optional[float] = None
    wall_time: Optional[float] = None


class BlueRunReport(BaseModel):
    exact: bool
    longest: Optional[int] = None  # None means no bound was reached (unbounded)
    m_max: int
    trials: Optional[int] = None
    seed: Optional[int] = None


class SweepRow(BaseModel):
    n: int
    R: float
    t: float
    x: float
    standard_x: bool
    seed: int
    strategy: str
    p_size: int
    count_bound_intermediate: float
    count_bound_final: float
    q_size: int
    s_size: int
    min_s_distance: Optional[float] = None
    red_density: float
    s_prob_site: Optional[int] = None
    s_prob_exact: Optional[float] = None
    s_prob_mc: Optional[float] = None
    longest_blue_run: Optional[int] = None
    exact_blue_run: Optional[int] = None
    separation_pass: bool
    covering_pass: bool
    count_bound_pass: bool
    neighbour_count_pass: bool
    red_pair_pass: bool
