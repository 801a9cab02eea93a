from fastapi import APIRouter
from .gates import gates_router
from .sweeps import sweeps_router

public_router = APIRouter(
    prefix=""
)

public_router.include_router(gates_router)
public_router.include_router(sweeps_router)
