from pydantic import BaseModel, ConfigDict, Field

from app.recompile import LayerKind

GateSpec = str | list[list[list[float] | float]]


class KakRequest(BaseModel):
    model_config = ConfigDict(extra='forbid')

    matrix: GateSpec


class MitigateRequest(BaseModel):
    model_config = ConfigDict(extra='forbid')

    parasitic: GateSpec


class RecompileRequest(BaseModel):
    model_config = ConfigDict(extra='forbid')

    target: GateSpec
    native: GateSpec = 'sqrt_iswap_dag'
    parasitic: GateSpec = 'identity'
    max_gates: int = Field(default=3, ge=0)
    layers: LayerKind = LayerKind.FULL
    seed: int = 0
    restarts: int = Field(default=20, ge=1)
