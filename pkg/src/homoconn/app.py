from typing import Callable, List

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import ValidationError

from .config import config
from .errors import HomoconnError
from .models import (
    ConnectionRequest,
    ReportEnvelope,
    RunConfig,
    ScanRequest,
    VerifyRequest,
)
from .report import cmd_connection, cmd_dims, cmd_einstein_scan, cmd_verify


def _run(command: Callable[[], ReportEnvelope]) -> ReportEnvelope:
    """Map library errors to 422 and anything else to 500."""
    try:
        return command()
    except (HomoconnError, ValidationError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


def create_app() -> FastAPI:
    app = FastAPI(title="homoconn: invariant connections on odd spheres")

    # Enable CORS for browser clients
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["*"],
    )

    @app.get("/")
    async def root():
        return {"status": "ok", "message": "homoconn API"}

    @app.get("/api/dims", response_model=ReportEnvelope)
    def dims(n: List[int] = Query(...)):
        """Dimension table for the requested sphere parameters"""
        return _run(lambda: cmd_dims(n))

    @app.post("/api/connection", response_model=ReportEnvelope)
    def connection(request: ConnectionRequest):
        """Curvature report of one connection"""
        return _run(
            lambda: cmd_connection(
                RunConfig(command="connection", **request.model_dump(exclude_none=True))
            )
        )

    @app.post("/api/scan", response_model=ReportEnvelope)
    def scan(request: ScanRequest):
        """Einstein scan over a grid of the skew family"""
        return _run(
            lambda: cmd_einstein_scan(
                RunConfig(
                    command="scan",
                    sphere=request.sphere,
                    n=request.n,
                    r_grid=request.r_grid,
                    q_grid=request.q_grid,
                    tolerance=request.tolerance,
                )
            )
        )

    @app.post("/api/verify", response_model=ReportEnvelope)
    def verify(request: VerifyRequest):
        """Run verification batteries; failures are reported in the verdicts"""
        seed = config.SEED if request.seed is None else request.seed
        return _run(
            lambda: cmd_verify(
                RunConfig(command="verify", seed=seed, trials=request.trials),
                request.batteries,
            )
        )

    return app


app = create_app()
