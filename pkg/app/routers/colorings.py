# Colorings Router - FR-002
from fastapi import APIRouter, Depends, HTTPException, Query
from sqlalchemy.orm import Session
from sqlalchemy import desc
from pydantic import ValidationError
from pathlib import Path
from typing import List, Optional

from app.config import SETTINGS
from app.database import get_db
from app.geometry import storage
from app.geometry.battery import (
    blue_run_reports,
    blue_search_report,
    build_report,
    make_coloring,
    red_search_report,
    verification_battery,
)
from app.geometry.coloring import Coloring
from app.geometry.separated import Strategy
from app.models import ColoringRecord
from app.routers.runs import record_run
from app.schemas.coloring import ColorResponse, ColoringCreate, ColoringResponse, SearchRequest
from app.schemas.reports import BlueRunReport, BuildReport, SearchReport, VerificationReport
from app.schemas.run import RunConfig

router = APIRouter(prefix="/colorings", tags=["colorings"])


def get_record(db: Session, coloring_id: int) -> ColoringRecord:
    record = db.query(ColoringRecord).filter(ColoringRecord.id == coloring_id).first()
    if not record:
        raise HTTPException(status_code=404, detail="Coloring not found")
    return record


def load_coloring(record: ColoringRecord) -> Coloring:
    return storage.read_coloring(record.path)


def _run_config(subcommand: str, seed: int, **options) -> RunConfig:
    return RunConfig(subcommand=subcommand, seed=seed, format="json-lines", options=options)


@router.post("", response_model=ColoringResponse)
def create_coloring(data: ColoringCreate, db: Session = Depends(get_db)):
    """Build, certify and color; the coloring file goes to the data directory"""
    try:
        coloring = make_coloring(
            data.n, data.R, data.seed, t=data.t, x=data.x, strategy=Strategy(data.strategy),
            allow_small_R=data.allow_small_R, max_darts=data.max_darts,
        )
    except ValidationError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    report = build_report(coloring)

    record = ColoringRecord(
        n=report.n,
        R=report.R,
        t=report.t,
        x=report.x,
        seed=report.seed,
        strategy=report.strategy,
        tie_tol=coloring.config.tie_tol,
        p_size=report.p_size,
        q_size=report.q_size,
        s_size=report.s_size,
        min_s_distance=report.min_s_distance,
        covering_passed=bool(report.covering and report.covering.passed),
    )
    db.add(record)
    db.flush()
    record.path = str(Path(SETTINGS["data_dir"]) / f"coloring-{record.id}.txt")
    storage.write_coloring(coloring, record.path)
    db.commit()
    db.refresh(record)

    options = data.model_dump(exclude={"seed"})
    record_run(db, _run_config("build", data.seed, out=record.path, **options), [report], coloring_id=record.id)
    return record


@router.get("", response_model=List[ColoringResponse])
def list_colorings(
    n: Optional[int] = None,
    skip: int = 0,
    limit: int = 100,
    db: Session = Depends(get_db)
):
    """List stored colorings, newest first"""
    query = db.query(ColoringRecord)
    if n:
        query = query.filter(ColoringRecord.n == n)
    return query.order_by(desc(ColoringRecord.id)).offset(skip).limit(limit).all()


@router.get("/{coloring_id}", response_model=ColoringResponse)
def get_coloring(coloring_id: int, db: Session = Depends(get_db)):
    return get_record(db, coloring_id)


@router.get("/{coloring_id}/report", response_model=BuildReport)
def get_build_report(coloring_id: int, db: Session = Depends(get_db)):
    """Sizes and site-count bounds of a stored coloring (its set is re-read uncertified)"""
    return build_report(load_coloring(get_record(db, coloring_id)))


@router.get("/{coloring_id}/color", response_model=ColorResponse)
def color_point(
    coloring_id: int,
    at: str = Query(..., description="x1,...,xn"),
    db: Session = Depends(get_db)
):
    """Color of one point of E^n"""
    coloring = load_coloring(get_record(db, coloring_id))
    try:
        point = [float(v) for v in at.split(",") if v.strip()]
    except ValueError:
        raise HTTPException(status_code=400, detail=f"cannot parse point {at!r}")
    return ColorResponse(point=point, color=coloring.color(point).value)


@router.post("/{coloring_id}/verify", response_model=VerificationReport)
def verify_coloring(coloring_id: int, db: Session = Depends(get_db)):
    """Full verification battery, re-certifying the covering"""
    record = get_record(db, coloring_id)
    report = verification_battery(load_coloring(record), reverify=True)
    record_run(db, _run_config("verify", record.seed, coloring=record.path), [report],
               exit_status=0 if report.passed else 1, coloring_id=record.id)
    return report


@router.post("/{coloring_id}/search-red", response_model=SearchReport)
def search_red(coloring_id: int, request: SearchRequest, db: Session = Depends(get_db)):
    record = get_record(db, coloring_id)
    report = red_search_report(load_coloring(record), request.trials, request.seed)
    record_run(db, _run_config("search-red", request.seed, coloring=record.path, trials=request.trials),
               [report], exit_status=1 if report.found else 0, coloring_id=record.id)
    return report


@router.post("/{coloring_id}/search-blue", response_model=SearchReport)
def search_blue(coloring_id: int, request: SearchRequest, db: Session = Depends(get_db)):
    """Blue l_m search, or a blue placement of K when k_points is given"""
    record = get_record(db, coloring_id)
    report = blue_search_report(load_coloring(record), request.m, request.trials, request.seed,
                                k_points=request.k_points)
    record_run(db, _run_config("search-blue", request.seed, coloring=record.path, m=request.m,
                               trials=request.trials, k_points=request.k_points),
               [report], coloring_id=record.id)
    return report


@router.post("/{coloring_id}/exact-1d", response_model=List[BlueRunReport])
def exact_1d(
    coloring_id: int,
    m_max: Optional[int] = None,
    trials: Optional[int] = None,
    seed: int = 0,
    db: Session = Depends(get_db)
):
    """Exact longest blue l_m of a 1-D coloring (plus the Monte Carlo run when trials is given)"""
    record = get_record(db, coloring_id)
    reports = blue_run_reports(load_coloring(record), m_max, trials, seed)
    record_run(db, _run_config("exact-1d", seed, coloring=record.path, m_max=m_max, trials=trials),
               reports, coloring_id=record.id)
    return reports
