from fastapi import APIRouter


sweeps_router = APIRouter(
    prefix="/sweeps"
)
