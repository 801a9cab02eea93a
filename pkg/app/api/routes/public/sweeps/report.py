from http import HTTPStatus

from fastapi import Depends, HTTPException
from sqlalchemy.ext.asyncio import AsyncSession

from app import store
from app.database import get_db
from app.experiments import report
from .router import sweeps_router
import app.dto.responses as responses


@sweeps_router.get(
    "/{sweep_id}/report",
    response_model=responses.ReportResponse,
    status_code=HTTPStatus.OK
)
async def get_report(sweep_id: int, db: AsyncSession = Depends(get_db)):
    records = await store.load_records(sweep_id, db)
    if not records:
        raise HTTPException(status_code=HTTPStatus.NOT_FOUND, detail=f"no records for sweep {sweep_id}")
    return responses.ReportResponse.model_validate({"sweep_id": sweep_id, **report(records)})
