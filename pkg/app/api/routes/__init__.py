"""Versioned HTTP surface: gate tools under /gates, background sweeps under /sweeps."""
from fastapi import APIRouter
from .public import public_router

API_PREFIX = "/api/v1"

global_router = APIRouter(
    prefix=API_PREFIX
)

global_router.include_router(public_router)

__all__ = ['global_router', 'API_PREFIX']
