from starlette import status

from app.gates import parse_gate_spec
from app.mitigate import kak_approx
from .router import gates_router
from fastapi import Body
import app.dto.requests as requests
import app.dto.responses as responses


@gates_router.post(
    "/mitigate",
    response_model=responses.MitigateResponse,
    status_code=status.HTTP_200_OK
)
def mitigate(body: requests.MitigateRequest = Body(...)):
    return responses.MitigateResponse.from_plan(kak_approx(parse_gate_spec(body.parasitic)))
