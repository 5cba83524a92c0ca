from pydantic import BaseModel, Field
from typing import List, Literal, Optional
from datetime import datetime


class ColoringCreate(BaseModel):
    n: int = Field(..., ge=1)
    R: float
    t: float = 1.0 / 3.0
    x: Optional[float] = None  # defaults to 20^-n
    seed: int = 0
    strategy: Literal["random-darts", "grid-greedy"] = "random-darts"
    allow_small_R: bool = False
    max_darts: Optional[int] = None


class ColoringResponse(BaseModel):
    id: int
    n: int
    R: float
    t: float
    x: float
    seed: int
    strategy: str
    tie_tol: float
    p_size: int
    q_size: int
    s_size: int
    min_s_distance: Optional[float] = None
    covering_passed: bool
    path: str
    created_at: datetime

    class Config:
        from_attributes = True


class ColorResponse(BaseModel):
    point: List[float]
    color: str


class SearchRequest(BaseModel):
    trials: int = Field(10_000, ge=1)
    seed: int = 0
    m: int = Field(2, ge=1)
    k_points: Optional[List[List[float]]] = None  # blue placement of a general K
