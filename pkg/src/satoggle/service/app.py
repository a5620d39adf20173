"""FastAPI application wrapping the run orchestration.

Error mapping: pydantic validation and bad parameter values answer 400/422,
missing or malformed workload files answer 404, and anything else is a 500.
Every error body carries {"detail": {"kind": ..., "message": ...}} so the
CLI can translate kinds to exit codes without parsing prose.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..analysis import PowerProxyConfig
from ..runner import SimulateRequest, SynthLayerRequest, SynthRequest
from ..runner import analyze as run_analyze
from ..runner import compare as run_compare
from ..runner import simulate as run_simulate
from ..runner import synthesize as run_synthesize
from ..workload import WorkloadError
from .schemas import (AnalyzeIn, AnalyzeOut, CompareIn, CompareOut,
                      SimulateIn, SimulateOut, SynthIn, SynthOut)


def _error(status: int, kind: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"detail": {"kind": kind, "message": message}})


def create_app() -> FastAPI:
    app = FastAPI(title="satoggle", version="0.1.0")

    @app.exception_handler(WorkloadError)
    async def workload_error(_: Request, exc: WorkloadError):
        return _error(404, "workload_io", str(exc))

    @app.exception_handler(ValueError)
    async def value_error(_: Request, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/simulate", response_model=SimulateOut)
    def simulate(req: SimulateIn):
        summary = run_simulate(SimulateRequest(
            manifest_path=req.manifest, out_dir=req.out_dir,
            rows=req.array.rows, cols=req.array.cols,
            enable_bic=req.array.bic, enable_zvcg=req.array.zvcg,
            segments=req.array.segments, acc_mode=req.array.acc_mode))
        return SimulateOut(**summary)

    @app.post("/analyze", response_model=AnalyzeOut)
    def analyze(req: AnalyzeIn):
        return AnalyzeOut(**run_analyze(req.manifest, req.out_dir))

    @app.post("/synth", response_model=SynthOut)
    def synth(req: SynthIn):
        result = run_synthesize(SynthRequest(
            model_name=req.model_name, seed=req.seed, out_dir=req.out_dir,
            layers=tuple(SynthLayerRequest(
                name=layer.name, kind=layer.kind, m=layer.m, k=layer.k,
                n=layer.n, sigma=layer.sigma, zero_fraction=layer.zero_fraction)
                for layer in req.layers)))
        return SynthOut(**result)

    @app.post("/compare", response_model=CompareOut)
    def compare(req: CompareIn):
        proxy = PowerProxyConfig.from_dict(req.proxy) if req.proxy else None
        report = run_compare(req.baseline_dir, req.proposed_dir, req.out_dir,
                             formats=tuple(req.formats), proxy_cfg=proxy)
        return CompareOut(rows=report["rows"], overall=report["overall"],
                          reference_points=report["reference_points"],
                          proxy_config=report["proxy_config"],
                          written=report["written"])

    return app


app = create_app()
