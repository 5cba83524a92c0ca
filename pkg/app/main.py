from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from contextlib import asynccontextmanager
from pathlib import Path
import logging

from app import __version__
from app.config import SETTINGS, configure_logging
from app.database import engine, Base
from app.errors import RamseyError
from app.routers import (
    colorings_router,
    bounds_router,
    runs_router,
    settings_router,
    system_health_router,
)

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Startup and shutdown events"""
    configure_logging()
    # Create tables
    Base.metadata.create_all(bind=engine)
    Path(SETTINGS["data_dir"]).mkdir(parents=True, exist_ok=True)
    logger.info("serving colorings from %s", SETTINGS["data_dir"])
    yield
    # Shutdown


app = FastAPI(
    title=SETTINGS["service_name"],
    description="Build, color and attack periodic red/blue colorings of E^n",
    version=__version__,
    lifespan=lifespan,
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(RamseyError)
async def ramsey_error_handler(request: Request, exc: RamseyError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


# Include routers
app.include_router(colorings_router)
app.include_router(bounds_router)
app.include_router(runs_router)
app.include_router(settings_router)
app.include_router(system_health_router)


@app.get("/")
def root():
    return {
        "name": SETTINGS["service_name"],
        "version": __version__,
        "status": "running"
    }


@app.get("/health")
def health_check():
    return {"status": "healthy"}
