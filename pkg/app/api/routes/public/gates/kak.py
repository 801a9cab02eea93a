from starlette import status

from app.gates import parse_gate_spec
from app.kak import kak_decompose
from .router import gates_router
from fastapi import Body
import app.dto.requests as requests
import app.dto.responses as responses


@gates_router.post(
    "/kak",
    response_model=responses.KakResponse,
    status_code=status.HTTP_200_OK
)
def decompose(body: requests.KakRequest = Body(...)):
    return responses.KakResponse.from_decomposition(kak_decompose(parse_gate_spec(body.matrix)))
