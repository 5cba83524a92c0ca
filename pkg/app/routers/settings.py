from fastapi import APIRouter

from app.config import SETTINGS

router = APIRouter(prefix="/settings", tags=["settings"])


@router.get("")
def get_all_settings():
    """Get all engine settings (the database URL is not exposed)"""
    return {k: v for k, v in SETTINGS.items() if k != "database_url"}


@router.get("/construction")
def get_construction_settings():
    return SETTINGS["construction"]


@router.get("/search")
def get_search_settings():
    return SETTINGS["search"]
