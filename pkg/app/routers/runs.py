# Run Log Router - FR-007
from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session
from sqlalchemy import desc
from typing import List, Optional, Sequence
from pydantic import BaseModel
import json
import logging

from app.database import get_db
from app.models.run_record import RunRecord
from app.schemas.run import RunConfig, RunResponse

router = APIRouter(prefix="/runs", tags=["runs"])
logger = logging.getLogger(__name__)


def record_run(db: Session, config: RunConfig, reports: Sequence[BaseModel], exit_status: int = 0,
               coloring_id: Optional[int] = None) -> RunRecord:
    """Persist one service-side run next to its reports"""
    run = RunRecord(
        subcommand=config.subcommand,
        coloring_id=coloring_id,
        config=config.model_dump_json(),
        report=json.dumps([r.model_dump(mode="json") for r in reports]),
        exit_status=exit_status,
    )
    db.add(run)
    db.commit()
    db.refresh(run)
    logger.info("recorded run %d (%s, exit %d)", run.id, run.subcommand, exit_status)
    return run


def to_response(run: RunRecord) -> RunResponse:
    return RunResponse(
        id=run.id,
        subcommand=run.subcommand,
        config=json.loads(run.config),
        report=json.loads(run.report) if run.report else None,
        exit_status=run.exit_status,
        coloring_id=run.coloring_id,
        created_at=run.created_at,
    )


@router.get("", response_model=List[RunResponse])
def list_runs(
    subcommand: Optional[str] = None,
    coloring_id: Optional[int] = None,
    failed_only: bool = False,
    limit: int = 100,
    db: Session = Depends(get_db)
):
    """Query recorded runs, newest first"""
    query = db.query(RunRecord)

    if subcommand:
        query = query.filter(RunRecord.subcommand == subcommand)
    if coloring_id:
        query = query.filter(RunRecord.coloring_id == coloring_id)
    if failed_only:
        query = query.filter(RunRecord.exit_status != 0)

    runs = query.order_by(desc(RunRecord.created_at), desc(RunRecord.id)).limit(limit).all()
    return [to_response(r) for r in runs]


@router.get("/{run_id}", response_model=RunResponse)
def get_run(run_id: int, db: Session = Depends(get_db)):
    run = db.query(RunRecord).filter(RunRecord.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return to_response(run)
