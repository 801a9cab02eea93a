from datetime import datetime, timezone

from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import declarative_base

Base = declarative_base()


class Sweep(Base):
    __tablename__ = 'sweep'
    id = Column(Integer, primary_key=True, index=True)
    created_at = Column(DateTime, nullable=False, default=lambda: datetime.now(timezone.utc))
    spec = Column(Text, nullable=False)
    status = Column(String, nullable=False, default='pending')
    error = Column(Text)


class ResultRow(Base):
    __tablename__ = 'result_record'
    id = Column(Integer, primary_key=True, index=True)
    fk_sweep_id = Column(Integer, ForeignKey('sweep.id'), nullable=False, index=True)
    target_id = Column(Integer, nullable=False)
    alpha = Column(Float, nullable=False)
    beta = Column(Float, nullable=False)
    gamma = Column(Float, nullable=False)
    strategy = Column(String, nullable=False)
    parasitic_deg = Column(Float, nullable=False)
    noise_preset = Column(String, nullable=False)
    fidelity = Column(Float, nullable=False)
    n2q = Column(Integer, nullable=False)
    nrx = Column(Integer, nullable=False)
    nrz = Column(Integer, nullable=False)
    duration_ns = Column(Float, nullable=False)
    converged = Column(Boolean, nullable=False)
