from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette import status
from starlette.middleware.cors import CORSMiddleware
from .routes import API_PREFIX, global_router
from ..config import settings
from ..database import init_db
from ..errors import MitigationError
from ..logs import setup_logging


def init_routes(_app: FastAPI):
    _app.include_router(global_router)


def init_middlewares(_app: FastAPI):
    _app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"]
    )


def init_exception_handlers(_app: FastAPI):
    @_app.exception_handler(MitigationError)
    async def mitigation_error_handler(request: Request, exc: MitigationError):
        return JSONResponse(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            content={"detail": str(exc)}
        )


@asynccontextmanager
async def lifespan(_app: FastAPI):
    setup_logging(settings.log_level)
    await init_db()
    yield


def create_application():
    _app = FastAPI(
        title="Parasitic Gate Mitigation",
        docs_url=f"{API_PREFIX}/docs",
        debug=True,
        lifespan=lifespan
    )
    init_middlewares(_app)
    init_exception_handlers(_app)
    init_routes(_app)

    return _app


app = create_application()
