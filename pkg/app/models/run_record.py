# Run Log - FR-007
from sqlalchemy import Column, Integer, String, DateTime, ForeignKey, Text
from datetime import datetime
from app.database import Base


class RunRecord(Base):
    """One build, verification or search executed by the service"""
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)

    subcommand = Column(String, nullable=False, index=True)  # build, verify, search-red, ...
    coloring_id = Column(Integer, ForeignKey("colorings.id"), nullable=True)

    config = Column(Text, nullable=False)  # JSON of the RunConfig
    report = Column(Text, nullable=True)  # JSON of the report records
    exit_status = Column(Integer, default=0)  # same codes as the CLI

    created_at = Column(DateTime, default=datetime.utcnow)
