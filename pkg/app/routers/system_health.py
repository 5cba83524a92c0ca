# System Health Router - FR-008
from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session
from sqlalchemy import func, text
from datetime import datetime
import platform

import numpy
import scipy

from app import __version__
from app.database import get_db
from app.models import ColoringRecord, RunRecord

router = APIRouter(prefix="/system", tags=["system"])


@router.get("/health")
def health_check(db: Session = Depends(get_db)):
    """Health check including the database connection"""
    try:
        db.execute(text("SELECT 1"))
        db_status = "connected"
    except Exception as e:
        db_status = f"error: {str(e)}"

    return {
        "status": "healthy" if db_status == "connected" else "degraded",
        "timestamp": datetime.utcnow().isoformat(),
        "version": __version__,
        "database": db_status,
        "system": {
            "platform": platform.system(),
            "python_version": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        }
    }


@router.get("/stats")
def system_stats(db: Session = Depends(get_db)):
    """Counts of stored colorings and recorded runs"""
    colorings = db.query(func.count(ColoringRecord.id)).scalar() or 0
    total_runs = db.query(func.count(RunRecord.id)).scalar() or 0
    failed_runs = db.query(func.count(RunRecord.id)).filter(RunRecord.exit_status != 0).scalar() or 0

    by_subcommand = db.query(
        RunRecord.subcommand, func.count(RunRecord.id)
    ).group_by(RunRecord.subcommand).all()

    by_dimension = db.query(
        ColoringRecord.n, func.count(ColoringRecord.id)
    ).group_by(ColoringRecord.n).all()

    return {
        "colorings": colorings,
        "colorings_by_dimension": {str(n): count for n, count in by_dimension},
        "runs": {
            "total": total_runs,
            "failed": failed_runs,
            "by_subcommand": {name: count for name, count in by_subcommand},
        },
        "largest_coloring": db.query(func.max(ColoringRecord.p_size)).scalar(),
    }
