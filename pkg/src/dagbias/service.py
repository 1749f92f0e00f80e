"""Stateless analysis service.

One request carries the whole diagram and one response carries the whole
analysis; nothing is stored between calls, so identical requests always
produce identical bodies (timings aside) and any number of requests may be
served concurrently.  Cross-origin requests are allowed so the explorer UI
can call the service directly from the browser.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .analysis import analyze
from .errors import ParseError
from .model import parse

app = FastAPI(title="dagbias analysis service", version=__version__)
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


class AnalyzeRequest(BaseModel):
    diagram: str
    adjusted: list[str] | None = None
    maxAdjustments: int = Field(default=20, ge=0)
    deadlineMs: int | None = Field(default=2000, ge=1)


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/v1/analyze")
def analyze_diagram(request: AnalyzeRequest):
    try:
        doc = parse(request.diagram)
    except ParseError as exc:
        return JSONResponse(
            status_code=400,
            content={
                "error": "parse",
                "message": exc.message,
                "line": exc.line,
                "column": exc.column,
            },
        )

    override = None
    if request.adjusted is not None:
        override = frozenset(request.adjusted)
        unknown = [v for v in sorted(override) if v not in doc.graph]
        if unknown:
            return JSONResponse(
                status_code=422,
                content={"error": "roles", "message": f"unknown vertex {unknown[0]!r}"},
            )

    try:
        doc.roles.check_against(doc.graph, require_query_roles=True)
        result = analyze(
            doc,
            adjusted_override=override,
            max_adjustments=request.maxAdjustments,
            deadline=None if request.deadlineMs is None else request.deadlineMs / 1000.0,
        )
    except ValueError as exc:
        return JSONResponse(status_code=422, content={"error": "roles", "message": str(exc)})

    rep = result.criteria
    return {
        "exposure": list(result.exposure),
        "outcome": list(result.outcome),
        "adjusted": list(result.adjusted),
        "latent": list(result.latent),
        "xLoopFree": rep.exposure_loop_free,
        "adjustmentCriterion": rep.adjustment_criterion,
        "backdoorCriterion": rep.backdoor_criterion,
        "moralCriterion": rep.moral_criterion,
        "forbidden": list(rep.forbidden),
        "witness": None if rep.witness is None else str(rep.witness),
        "biasingEdges": [[u, v] for u, v in result.biasing.edges],
        "minimalAdjustments": [list(group) for group in result.adjustments],
        "truncated": result.truncated,
        "noAdjustmentExists": result.no_adjustment_exists,
        "warnings": list(result.warnings),
        "timings": {stage: round(seconds * 1000.0, 3) for stage, seconds in result.timings.items()},
    }
