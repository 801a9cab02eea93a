import logging

from sqlalchemy.ext.asyncio import AsyncSession
from starlette import status
from starlette.concurrency import run_in_threadpool

from app import store
from app.config import settings
from app.database import async_session, get_db
from app.errors import MitigationError
from app.experiments import SweepSpec, run_sweep
from .router import sweeps_router
from fastapi import Body, Depends, BackgroundTasks
import app.dto.responses as responses

logger = logging.getLogger(__name__)


async def background_sweep(sweep_id: int, spec: SweepSpec):
    async with async_session() as db:
        await store.set_status(sweep_id, 'running', db)
        try:
            failures: list[dict] = []
            records = await run_in_threadpool(run_sweep, spec, settings.workers, failures)
        except MitigationError as exc:
            logger.warning("sweep %d failed: %s", sweep_id, exc)
            await store.set_status(sweep_id, 'failed', db, error=str(exc))
            return
        except Exception as exc:
            logger.exception("sweep %d crashed", sweep_id)
            await store.set_status(sweep_id, 'failed', db, error=f"{type(exc).__name__}: {exc}")
            return
        await store.save_records(sweep_id, records, db)
        error = f"{len(failures)} failed evaluations" if failures else None
        await store.set_status(sweep_id, 'done', db, error=error)


@sweeps_router.post(
    "",
    response_model=responses.SweepStartedResponse,
    status_code=status.HTTP_202_ACCEPTED
)
async def start_sweep(background_tasks: BackgroundTasks, spec: SweepSpec = Body(...),
                      db: AsyncSession = Depends(get_db)):
    sweep_id = await store.create_sweep(spec, db)
    background_tasks.add_task(background_sweep, sweep_id, spec)
    return {"sweep_id": sweep_id, "message": "Sweep started!"}
