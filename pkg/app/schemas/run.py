from pydantic import BaseModel
from typing import Any, Dict, Optional
from datetime import datetime


class RunConfig(BaseModel):
    """Everything needed to replay a run: subcommand, flags, global seed, output format"""
    subcommand: str
    seed: int = 0
    format: str = "text"
    workers: Optional[int] = None
    options: Dict[str, Any] = {}


class RunResponse(BaseModel):
    id: int
    subcommand: str
    config: Dict[str, Any]
    report: Optional[Any] = None
    exit_status: int
    coloring_id: Optional[int] = None
    created_at: datetime
