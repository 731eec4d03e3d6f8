"""HTTP endpoints wrapping the core analyses.

The service is stateless: every request carries its full inputs and every
response is a pure function of them.  Domain errors map to 400 with a detail
message; schema violations are handled by FastAPI as 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..geonum import GeoDomainError, GeoRangeError, PreconditionError
from ..orlicz import OrliczFn
from ..report import ALL_SPACES, build_analysis
from ..selftest import run_suites
from ..sequences import GeoSeq, LambdaSeq, PSeq, SequenceFormatError, generate
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    LambdaSpec,
    PSpec,
    SelftestRequest,
    SelftestResponse,
    SequencePayload,
    SuiteResult,
)

app = FastAPI(
    title="geomseq analysis service",
    version=__version__,
    description="Membership, norm, density and dual analyses for geometric difference sequence spaces.",
)

_DOMAIN_ERRORS = (GeoDomainError, GeoRangeError, PreconditionError, SequenceFormatError, ValueError)


def _domain_error_handler(request: Request, exc: Exception) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


for _err in _DOMAIN_ERRORS:
    app.add_exception_handler(_err, _domain_error_handler)


def _build_sequence(payload: SequencePayload) -> GeoSeq:
    if payload.generator is not None:
        g = payload.generator
        return generate(g.family, g.n, **g.params)
    return GeoSeq(logs=payload.logs, source=payload.source)


def _build_lambda(spec: LambdaSpec, n: int) -> LambdaSeq:
    if spec.kind == "n":
        return LambdaSeq.cesaro(n)
    if spec.kind == "const1":
        return LambdaSeq.constant_one(n)
    return LambdaSeq(values=spec.values, unbounded=spec.unbounded, source="values")


def _build_p(spec: PSpec | None, n: int) -> PSeq | None:
    if spec is None:
        return None
    if spec.kind == "const":
        return PSeq.constant(spec.value, n)
    return PSeq(values=spec.values, source="values")


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/analyze", response_model=AnalyzeResponse, response_model_exclude_unset=True)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    x = _build_sequence(req.sequence)
    lam = _build_lambda(req.lam, len(x))
    p = _build_p(req.p, len(x))
    orlicz = OrliczFn.from_spec(req.orlicz.model_dump(exclude_none=True)) if req.orlicz else None
    spaces = tuple(req.spaces) if req.spaces else tuple(
        s for s in ALL_SPACES if s != "orlicz" or orlicz is not None
    )
    report = build_analysis(
        x,
        req.m,
        lam,
        spaces=spaces,
        eps_logs=tuple(req.eps_logs),
        tol=req.tol,
        tail_fraction=req.tail_fraction,
        orlicz=orlicz,
        p=p,
        tol_rho=req.tol_rho,
        descriptor=req.descriptor,
    )
    return AnalyzeResponse(**report)


@app.post("/generate", response_model=GenerateResponse)
def generate_endpoint(req: GenerateRequest) -> GenerateResponse:
    g = req.generator
    seq = generate(g.family, g.n, **g.params)
    return GenerateResponse(logs=[float(v) for v in seq.logs], source=seq.source)


@app.post("/selftest", response_model=SelftestResponse)
def selftest(req: SelftestRequest) -> SelftestResponse:
    results = run_suites(seed=req.seed, only=req.suites)
    return SelftestResponse(
        seed=req.seed,
        passed=sum(r.passed for r in results),
        failed=sum(r.failed for r in results),
        suites=[
            SuiteResult(name=r.name, passed=r.passed, failed=r.failed, failures=list(r.failures))
            for r in results
        ],
    )
