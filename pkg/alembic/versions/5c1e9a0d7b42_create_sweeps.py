"""create sweeps

Revision ID: 5c1e9a0d7b42
Revises: 
Create Date: 2026-10-18 12:04:31.218514

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '5c1e9a0d7b42'
down_revision: Union[str, None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    op.create_table('sweep',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('created_at', sa.DateTime(), nullable=False),
    sa.Column('spec', sa.Text(), nullable=False),
    sa.Column('status', sa.String(), nullable=False),
    sa.Column('error', sa.Text(), nullable=True),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_sweep_id'), 'sweep', ['id'], unique=False)
    op.create_table('result_record',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('fk_sweep_id', sa.Integer(), nullable=False),
    sa.Column('target_id', sa.Integer(), nullable=False),
    sa.Column('alpha', sa.Float(), nullable=False),
    sa.Column('beta', sa.Float(), nullable=False),
    sa.Column('gamma', sa.Float(), nullable=False),
    sa.Column('strategy', sa.String(), nullable=False),
    sa.Column('parasitic_deg', sa.Float(), nullable=False),
    sa.Column('noise_preset', sa.String(), nullable=False),
    sa.Column('fidelity', sa.Float(), nullable=False),
    sa.Column('n2q', sa.Integer(), nullable=False),
    sa.Column('nrx', sa.Integer(), nullable=False),
    sa.Column('nrz', sa.Integer(), nullable=False),
    sa.Column('duration_ns', sa.Float(), nullable=False),
    sa.Column('converged', sa.Boolean(), nullable=False),
    sa.ForeignKeyConstraint(['fk_sweep_id'], ['sweep.id'], ),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_result_record_id'), 'result_record', ['id'], unique=False)
    op.create_index(op.f('ix_result_record_fk_sweep_id'), 'result_record', ['fk_sweep_id'], unique=False)


def downgrade() -> None:
    op.drop_index(op.f('ix_result_record_fk_sweep_id'), table_name='result_record')
    op.drop_index(op.f('ix_result_record_id'), table_name='result_record')
    op.drop_table('result_record')
    op.drop_index(op.f('ix_sweep_id'), table_name='sweep')
    op.drop_table('sweep')
