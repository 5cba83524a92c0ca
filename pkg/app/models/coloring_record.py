# Coloring Records - FR-002
from sqlalchemy import Column, Integer, String, Float, Boolean, DateTime
from datetime import datetime
from app.database import Base


class ColoringRecord(Base):
    """A built coloring: its parameters, sizes and where its file lives"""
    __tablename__ = "colorings"

    id = Column(Integer, primary_key=True, index=True)

    # Parameters
    n = Column(Integer, nullable=False)
    R = Column(Float, nullable=False)
    t = Column(Float, nullable=False)
    x = Column(Float, nullable=False)
    seed = Column(Integer, nullable=False)
    strategy = Column(String, nullable=False)  # random-darts, grid-greedy
    tie_tol = Column(Float, nullable=False)

    # Sizes
    p_size = Column(Integer, nullable=False)
    q_size = Column(Integer, nullable=False)
    s_size = Column(Integer, nullable=False)
    min_s_distance = Column(Float, nullable=True)  # None when |S| < 2

    covering_passed = Column(Boolean, default=False)
    path = Column(String, nullable=False, default="")

    created_at = Column(DateTime, default=datetime.utcnow)
