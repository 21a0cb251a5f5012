"""HTTP service: pipeline runs, claim browsing, review queue, exports.

Reads serve straight from the in-memory store; every mutation (pipeline
runs, review decisions) goes through one writer lock, so clients observe
read-your-writes after a decision's response. The UI (if built) is
served statically under /ui and only ever talks JSON to these endpoints.
"""

from __future__ import annotations

import json
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .analytics import distributions_report
from .config import PipelineConfig, load_config
from .curation import EffectCategoryMap
from .errors import QueryError, ReviewError, SchemaError
from .graph import TripleStore
from .ids import Identifier
from .model import FoodClaim, ReviewState, Stance, to_json_line
from .pipeline import PipelinePaths, build_store, run_pipeline
from .review import (
    AuditLog,
    ClaimHistory,
    ReviewDecision,
    apply_review_decision,
    build_queue,
    calibration_report,
)

DEFAULT_PAGE_SIZE = 25


class ServiceState:
    """Store + audit trail + run registry behind a single writer lock."""

    def __init__(self, workdir: str | Path, config: PipelineConfig):
        self.paths = PipelinePaths(Path(workdir))
        self.config = config
        self.lock = threading.Lock()
        self.runs: dict[str, dict] = {}
        self.histories: dict[str, ClaimHistory] = {}
        self.category_map = EffectCategoryMap.from_csv(config.categories_path)
        self.audit = AuditLog()
        if self.paths.review_audit.exists():
            self.audit = AuditLog.from_jsonl(
                self.paths.review_audit.read_text(encoding="utf-8")
            )
        if self.paths.store.exists():
            self.store = TripleStore.load(self.paths.store)
        elif self.paths.claims_final.exists():
            self.store = build_store(self.paths, config.namespace)
        else:
            self.store = TripleStore()

    def persist(self) -> None:
        self.paths.workdir.mkdir(parents=True, exist_ok=True)
        self.store.save(self.paths.store)
        self.paths.review_audit.write_text(self.audit.to_jsonl(), encoding="utf-8")


def _error(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body = {"code": code, "message": message}
    if field:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def create_app(workdir: str | Path, config: PipelineConfig | None = None) -> FastAPI:
    config = config or load_config()
    state = ServiceState(workdir, config)
    app = FastAPI(title="fcn", docs_url=None, redoc_url=None)
    app.state.fcn = state

    @app.exception_handler(SchemaError)
    async def _schema_error(request: Request, exc: SchemaError):
        return _error(422, "schema-error", str(exc))

    @app.exception_handler(QueryError)
    async def _query_error(request: Request, exc: QueryError):
        return _error(400, "bad-query", str(exc))

    @app.exception_handler(ReviewError)
    async def _review_error(request: Request, exc: ReviewError):
        status = 404 if exc.code == "not-found" else 422
        return _error(status, exc.code, str(exc), exc.field)

    # -- pipeline runs --

    @app.post("/runs")
    async def launch_run(body: dict):
        input_path = body.get("input_path")
        if not input_path or not Path(input_path).exists():
            return _error(400, "bad-input", f"input path not found: {input_path}", "input_path")
        run_id = uuid.uuid4().hex[:12]
        with state.lock:
            result = run_pipeline(input_path, state.paths.workdir, state.config)
            state.store = TripleStore.load(state.paths.store)
            state.histories = result.histories or {}
            record = {
                "run_id": run_id,
                "status": "completed",
                "input_path": str(input_path),
                "documents": result.documents,
                "claims": result.claims_final,
                "validations": result.validations,
                "entities": result.entities,
                "flagged": result.flagged,
                "failed_documents": result.failed_documents,
                "ingest": result.ingest_stats.to_dict(),
            }
            state.runs[run_id] = record
            state.persist()
        return record

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str):
        record = state.runs.get(run_id)
        if record is None:
            return _error(404, "not-found", f"unknown run: {run_id}")
        return record

    # -- claims --

    def _claims(include_rejected: bool) -> list[FoodClaim]:
        claims = state.store.records("FoodClaim")
        if not include_rejected:
            claims = [c for c in claims if c.review_state is not ReviewState.REJECTED]
        return claims

    @app.get("/claims")
    async def list_claims(
        effect_type: str | None = None,
        stance: str | None = None,
        validity: str | None = None,
        claim_type: str | None = None,
        review_state: str | None = None,
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
        include_rejected: bool = False,
    ):
        claims = _claims(include_rejected)
        if effect_type:
            claims = [c for c in claims if effect_type in c.claim_effect_type]
        if validity:
            claims = [c for c in claims if c.claim_validity_status.value == validity]
        if claim_type:
            claims = [c for c in claims if claim_type in {t.value for t in c.claim_type}]
        if review_state:
            claims = [c for c in claims if c.review_state.value == review_state]
        if stance:
            try:
                wanted = Stance(stance)
            except ValueError:
                return _error(400, "bad-query", f"unknown stance: {stance}", "stance")
            claim_ids = {
                v.claim_id.value
                for v in state.store.records("ValidatingSource")
                if v.stance is wanted
            }
            claims = [c for c in claims if c.id.value in claim_ids]
        claims.sort(key=lambda c: c.id.value)
        total = len(claims)
        start = (max(page, 1) - 1) * page_size
        items = claims[start : start + page_size]
        return {
            "items": [c.to_dict() for c in items],
            "page": page,
            "page_size": page_size,
            "total": total,
        }

    @app.get("/claims/{claim_id}")
    async def claim_detail(claim_id: str):
        claim = state.store.record(claim_id)
        if claim is None or not isinstance(claim, FoodClaim):
            return _error(404, "not-found", f"unknown claim: {claim_id}")
        validations = [
            v for v in state.store.records("ValidatingSource") if v.claim_id.value == claim_id
        ]
        source = state.store.record(claim.source_id)
        context = state.store.record(claim.context_id) if claim.context_id else None
        audit = [
            r.to_dict() for r in state.audit.records if r.claim_id.value == claim_id
        ]
        return {
            "claim": claim.to_dict(),
            "validations": [v.to_dict() for v in validations],
            "source": source.to_dict() if source is not None else None,
            "context": context.to_dict() if context is not None else None,
            "audit": audit,
        }

    # -- review --

    @app.get("/review/queue")
    async def review_queue(limit: int | None = None):
        entries = build_queue(state.store, state.histories, state.category_map, limit)
        return {"entries": [e.to_dict() for e in entries]}

    @app.post("/claims/{claim_id}/review")
    async def review_claim(claim_id: str, body: dict):
        decided_at = body.get("decided_at")
        decision = ReviewDecision(
            claim_id=Identifier.from_string(claim_id),
            action=body.get("action", ""),
            reviewer=body.get("reviewer", "anonymous"),
            decided_at=(
                datetime.fromisoformat(decided_at.replace("Z", "+00:00"))
                if decided_at
                else datetime.now(timezone.utc)
            ),
            edited_fields=body.get("edited_fields"),
            note=body.get("note"),
            decision_id=body.get("decision_id", ""),
        )
        with state.lock:
            claim, record = apply_review_decision(decision, state.store, state.audit)
            state.persist()
        return {
            "claim": claim.to_dict(),
            "audit": record.to_dict() if record is not None else None,
            "replayed": record is None,
        }

    # -- stats and exports --

    @app.get("/stats")
    async def stats():
        if state.paths.stats_report.exists():
            return json.loads(state.paths.stats_report.read_text(encoding="utf-8"))
        return {
            "graph": state.store.stats().to_dict(),
            "distributions": distributions_report(state.store, state.category_map),
        }

    @app.get("/calibration")
    async def calibration():
        return calibration_report(state.audit)

    @app.get("/export")
    async def export(format: str = "jsonl", include_rejected: bool = False):
        if format in ("turtle", "ntriples"):
            return PlainTextResponse(state.store.serialize(format))
        if format == "jsonl":
            claims = sorted(_claims(include_rejected), key=lambda c: c.id.value)
            return PlainTextResponse("\n".join(to_json_line(c) for c in claims) + "\n")
        return _error(400, "bad-query", f"unknown export format: {format}", "format")

    import os

    ui_dir = Path(
        os.environ.get(
            "FCN_UI_DIR",
            Path(__file__).resolve().parent.parent.parent / "frontend" / "dist",
        )
    )
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def serve(workdir: str | Path, config: PipelineConfig) -> None:  # pragma: no cover
    import uvicorn

    app = create_app(workdir, config)
    uvicorn.run(app, host=config.host, port=config.port)
