from pydantic import BaseModel, ConfigDict

from app.gates import matrix_to_pairs
from app.kak import KakDecomposition
from app.mitigate import MitigationPlan
from app.recompile import RecompileResult


class KakResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    alpha: float
    beta: float
    gamma: float
    k1: list[list[list[float]]]
    k2: list[list[list[float]]]
    k3: list[list[list[float]]]
    k4: list[list[list[float]]]
    global_phase: list[float]

    @classmethod
    def from_decomposition(cls, kak: KakDecomposition) -> 'KakResponse':
        return cls(
            alpha=kak.alpha,
            beta=kak.beta,
            gamma=kak.gamma,
            k1=matrix_to_pairs(kak.k1),
            k2=matrix_to_pairs(kak.k2),
            k3=matrix_to_pairs(kak.k3),
            k4=matrix_to_pairs(kak.k4),
            global_phase=[kak.global_phase.real, kak.global_phase.imag],
        )


class MitigateResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    parasitic_triple: tuple[float, float, float]
    correction_zxz: tuple[tuple[float, float, float], tuple[float, float, float]]
    z_only: bool
    predicted_fidelity: float
    unmitigated_fidelity: float

    @classmethod
    def from_plan(cls, plan: MitigationPlan) -> 'MitigateResponse':
        return cls(
            parasitic_triple=plan.parasitic_triple,
            correction_zxz=plan.euler_angles,
            z_only=plan.is_diagonal,
            predicted_fidelity=plan.predicted_fidelity,
            unmitigated_fidelity=plan.unmitigated_fidelity,
        )


class RecompileResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    circuit: str
    achieved_infidelity: float
    native_gates_used: int
    restarts_used: int
    converged: bool

    @classmethod
    def from_result(cls, result: RecompileResult) -> 'RecompileResponse':
        return cls(
            circuit=result.circuit.to_text(),
            achieved_infidelity=result.achieved_infidelity,
            native_gates_used=result.native_gates_used,
            restarts_used=result.restarts_used,
            converged=result.converged,
        )


class SweepStartedResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    sweep_id: int
    message: str


class RecordResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    target_id: int
    alpha: float
    beta: float
    gamma: float
    strategy: str
    parasitic_deg: float
    noise_preset: str
    fidelity: float
    n2q: int
    nrx: int
    nrz: int
    duration_ns: float
    converged: bool


class RecordsResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    sweep_id: int
    status: str
    records: list[RecordResponse]


class ReportResponse(BaseModel):
    model_config = ConfigDict(from_attributes=True, extra='ignore')

    sweep_id: int
    summary: list[dict]
    crossovers: list[dict]
