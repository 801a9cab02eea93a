from starlette import status

from app.gates import HardwareGateModel, parse_gate_spec
from app.recompile import OptimizerConfig, recompile
from .router import gates_router
from fastapi import Body
import app.dto.requests as requests
import app.dto.responses as responses


@gates_router.post(
    "/recompile",
    response_model=responses.RecompileResponse,
    status_code=status.HTTP_200_OK
)
def recompile_target(body: requests.RecompileRequest = Body(...)):
    hw = HardwareGateModel(parse_gate_spec(body.native), parse_gate_spec(body.parasitic))
    cfg = OptimizerConfig(restarts=body.restarts, seed=body.seed)
    result = recompile(parse_gate_spec(body.target), hw, body.max_gates, body.layers, cfg)
    return responses.RecompileResponse.from_result(result)
