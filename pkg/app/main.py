"""
jetcalc HTTP service.

Thin FastAPI surface over the same report builders the CLI uses. Every
operation is a POST carrying a built-in name or an inline system; results
are the pydantic reports, serialized as JSON.

Configuration (environment, see config/settings.py):
- JETCALC_ANSATZ_LIMIT: largest ansatz family the solver will set up
- JETCALC_CORS_ORIGINS: comma-separated origins; CORS is off when empty
- JETCALC_LOG_LEVEL: root log level
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import JSONResponse

from app.routes import calculus, conservation, covering, symmetry
from config.settings import get_settings
from jetcalc import builtins
from jetcalc.errors import JetCalcError

logger = logging.getLogger(__name__)

VERSION = "1.0.0"

settings = get_settings()


@asynccontextmanager
async def lifespan(app: FastAPI):
    logging.getLogger().setLevel(settings.log_level)
    logger.info("jetcalc service starting (ansatz limit %d, reduction memo %s)",
                settings.ansatz_limit, "on" if settings.reduction_memo else "off")
    yield
    logger.info("jetcalc service shutting down.")


app = FastAPI(
    title="jetcalc",
    description="Exact jet-space calculus: symmetries, conservation laws and coverings of PDE systems",
    version=VERSION,
    lifespan=lifespan,
)

# Operator reports and ansatz bases can run to many kilobytes
app.add_middleware(GZipMiddleware, minimum_size=500, compresslevel=6)

if settings.cors_origins:
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(settings.cors_origins),
        allow_credentials=False,
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
    )


@app.exception_handler(JetCalcError)
async def jetcalc_error_handler(request: Request, exc: JetCalcError):
    # malformed input -> 400, well-formed input the mathematics rejects -> 422
    status = 400 if exc.exit_code == 2 else 422
    logger.info("%s %s -> %d %s: %s", request.method, request.url.path, status, exc.code, exc)
    return JSONResponse(status_code=status, content={"code": exc.code, "detail": str(exc)})


app.include_router(calculus.router, prefix="/calculus", tags=["Calculus"])
app.include_router(symmetry.router, prefix="/symmetries", tags=["Symmetries"])
app.include_router(conservation.router, prefix="/conservation", tags=["Conservation Laws"])
app.include_router(covering.router, prefix="/coverings", tags=["Coverings"])


@app.get("/health")
async def health():
    """Liveness plus the built-in examples this instance serves."""
    return {
        "status": "healthy",
        "service": "jetcalc",
        "version": VERSION,
        "systems": sorted(builtins.SYSTEMS),
        "coverings": sorted(builtins.COVERINGS),
        "representations": sorted(builtins.REPRESENTATIONS),
    }
