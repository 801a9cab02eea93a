import logging
from dataclasses import asdict

from sqlalchemy import select, update
from sqlalchemy.ext.asyncio import AsyncSession

from app.experiments import CSV_COLUMNS, ResultRecord, SweepSpec
from app.models import ResultRow, Sweep

logger = logging.getLogger(__name__)


async def create_sweep(spec: SweepSpec, db: AsyncSession) -> int:
    sweep = Sweep(spec=spec.model_dump_json(), status='pending')
    db.add(sweep)
    await db.commit()
    return sweep.id


async def get_sweep(sweep_id: int, db: AsyncSession) -> Sweep | None:
    return await db.get(Sweep, sweep_id)


async def set_status(sweep_id: int, status: str, db: AsyncSession, error: str | None = None):
    await db.execute(update(Sweep).where(Sweep.id == sweep_id).values(status=status, error=error))
    await db.commit()


async def save_records(sweep_id: int, records: list[ResultRecord], db: AsyncSession):
    db.add_all(ResultRow(fk_sweep_id=sweep_id, **asdict(r)) for r in records)
    await db.commit()
    logger.info("stored %d records for sweep %d", len(records), sweep_id)


async def load_records(sweep_id: int, db: AsyncSession) -> list[ResultRecord]:
    result = await db.execute(
        select(ResultRow).where(ResultRow.fk_sweep_id == sweep_id).order_by(ResultRow.id)
    )
    return [ResultRecord(**{c: getattr(row, c) for c in CSV_COLUMNS}) for row in result.scalars()]
