from .coloring_record import ColoringRecord
from .run_record import RunRecord

__all__ = ["ColoringRecord", "RunRecord"]
