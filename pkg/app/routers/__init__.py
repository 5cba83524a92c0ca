from .colorings import router as colorings_router
from .bounds import router as bounds_router
from .runs import router as runs_router
from .settings import router as settings_router
from .system_health import router as system_health_router

__all__ = [
    "colorings_router",
    "bounds_router",
    "runs_router",
    "settings_router",
    "system_health_router",
]
