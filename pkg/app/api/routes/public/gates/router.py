from fastapi import APIRouter


gates_router = APIRouter(
    prefix="/gates"
)
