from dataclasses import asdict
from http import HTTPStatus

from fastapi import Depends, HTTPException
from sqlalchemy.ext.asyncio import AsyncSession

from app import store
from app.database import get_db
from .router import sweeps_router
import app.dto.responses as responses


@sweeps_router.get(
    "/{sweep_id}/records",
    response_model=responses.RecordsResponse,
    status_code=HTTPStatus.OK
)
async def get_records(sweep_id: int, db: AsyncSession = Depends(get_db)):
    sweep = await store.get_sweep(sweep_id, db)
    if sweep is None:
        raise HTTPException(status_code=HTTPStatus.NOT_FOUND, detail=f"sweep {sweep_id} not found")
    records = await store.load_records(sweep_id, db)
    return responses.RecordsResponse.model_validate({
        "sweep_id": sweep_id,
        "status": sweep.status,
        "records": [asdict(r) for r in records]
    })
