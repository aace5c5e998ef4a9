"""FastAPI routes for the mixtrace lab."""
import json
import logging
import os

from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, Response

from mixtrace import __version__
from mixtrace.errors import MixtraceError, UnknownSuiteError
from mixtrace.fieldio import loads
from mixtrace.littlewood_paley import build_family
from mixtrace.models import (
    AdmissibilityVerdict,
    AdmissibleRequest,
    NormReport,
    NormRequest,
    SpaceParams,
    SuiteReport,
    VerifyRequest,
)
from mixtrace.norms import space_quasi_norm
from mixtrace.observability import RequestLoggingMiddleware, get_metrics_text
from mixtrace.presets import get_profiles
from mixtrace.report import generate_suite_report_pdf
from mixtrace.resilience import (
    get_cached_report,
    get_report_timeout_sec,
    get_verify_timeout_sec,
    run_sync_with_timeout,
    set_cached_report,
)
from mixtrace.suites import get_suite, run_suite, suite_names
from mixtrace.suites.common import check_band, covering_family
from mixtrace.suites.ensembles import band_limited, rng_for
from mixtrace.trace_ext import admissible

_LOG = logging.getLogger(__name__)

_MAX_FIELD_BYTES = 64 * 1024 * 1024


def _cors_origins() -> list[str]:
    raw = (os.environ.get("MIXTRACE_CORS_ORIGINS") or "").strip()
    if not raw:
        return []
    if raw == "*":
        return ["*"]
    return [o.strip() for o in raw.split(",") if o.strip()]


app = FastAPI(
    title="mixtrace",
    description="Anisotropic mixed-norm Triebel-Lizorkin/Besov lab: norms, traces and verification suites",
    version=__version__,
)
origins = _cors_origins()
if origins:
    app.add_middleware(CORSMiddleware, allow_origins=origins, allow_credentials=True, allow_methods=["*"], allow_headers=["*"])
app.add_middleware(RequestLoggingMiddleware)


@app.get("/v1/health")
def health():
    return {"status": "ok", "service": "mixtrace", "version": __version__}


@app.get("/v1/metrics")
def metrics():
    """Prometheus-style metrics (request counts, suite runs, uptime)."""
    return PlainTextResponse(get_metrics_text(), media_type="text/plain; charset=utf-8")


@app.get("/v1/suites")
def suites():
    """Registered suites with their statements, and the preset profiles."""
    return {
        "suites": [{"name": name, "statement": get_suite(name).statement} for name in suite_names()],
        "profiles": get_profiles(),
    }


@app.post("/v1/admissible", response_model=AdmissibilityVerdict)
def admissible_route(body: AdmissibleRequest):
    """Exact trace admissibility verdict and trace space."""
    try:
        return admissible(body.params, body.trace)
    except MixtraceError as e:
        raise HTTPException(status_code=400, detail=str(e))


def _do_norm(body: NormRequest) -> NormReport:
    check_band(body.grid, body.params.a, body.radius)
    u = band_limited(body.grid, body.params.a, body.radius, rng_for(body.seed, "api-norm"))
    return space_quasi_norm(u, body.params, covering_family(body.params.a, body.grid, body.radius))


@app.post("/v1/norm", response_model=NormReport)
def norm(body: NormRequest):
    """Quasi-norm of a seeded random band-limited field."""
    try:
        return run_sync_with_timeout(get_report_timeout_sec(), _do_norm, body)
    except MixtraceError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TimeoutError:
        raise HTTPException(status_code=504, detail="Norm computation timed out.")


@app.post("/v1/fields/norm", response_model=NormReport)
async def field_norm(
    file: UploadFile = File(..., description="Field in the MTGF container"),
    params: str = Form(..., description="SpaceParams as JSON"),
):
    """Quasi-norm of an uploaded field; the family covers its certificate radius or the Nyquist band."""
    content = await file.read()
    if len(content) > _MAX_FIELD_BYTES:
        raise HTTPException(status_code=400, detail="Field too large (max 64 MB).")
    try:
        sp = SpaceParams.model_validate_json(params)
        u = loads(content)
    except (MixtraceError, ValueError) as e:
        raise HTTPException(status_code=400, detail=f"Failed to read field: {e!s}")

    def _compute() -> NormReport:
        cert = u.support_cert
        if getattr(cert, "a", None) is not None and cert.a.a == sp.a.a:
            fam = covering_family(sp.a, u.grid, cert.radius)
        else:
            fam = build_family(sp.a, u.grid)
        return space_quasi_norm(u, sp, fam)

    try:
        return run_sync_with_timeout(get_report_timeout_sec(), _compute)
    except MixtraceError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TimeoutError:
        raise HTTPException(status_code=504, detail="Norm computation timed out.")


def _verify(suite: str, body: VerifyRequest) -> SuiteReport:
    """Cached suite run; raises HTTPException for unknown suites, bad configs and timeouts."""
    try:
        get_suite(suite)
    except UnknownSuiteError as e:
        raise HTTPException(status_code=404, detail=str(e))
    cfg = body.config(suite)
    key = json.loads(cfg.model_dump_json())
    cached = get_cached_report(key)
    if cached is not None:
        return SuiteReport.model_validate(cached)
    try:
        report = run_sync_with_timeout(get_verify_timeout_sec(), run_suite, cfg)
    except MixtraceError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except TimeoutError:
        raise HTTPException(status_code=504, detail="Suite run timed out. Use the quick profile or a smaller ensemble.")
    set_cached_report(key, json.loads(report.model_dump_json()))
    return report


@app.post("/v1/verify/{suite}")
def verify(suite: str, body: VerifyRequest | None = None):
    """Run a suite (quick profile unless the body says otherwise) and return its report."""
    report = _verify(suite, body or VerifyRequest())
    return Response(content=report.model_dump_json(), media_type="application/json")


@app.post("/v1/verify/{suite}/report.pdf")
def verify_pdf(suite: str, body: VerifyRequest | None = None):
    report = _verify(suite, body or VerifyRequest())
    try:
        pdf_bytes = run_sync_with_timeout(get_report_timeout_sec(), generate_suite_report_pdf, report)
    except TimeoutError:
        raise HTTPException(status_code=504, detail="Report generation timed out.")
    return Response(
        content=pdf_bytes,
        media_type="application/pdf",
        headers={"Content-Disposition": f"attachment; filename=mixtrace-{suite}.pdf"},
    )
