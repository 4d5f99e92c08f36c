"""HTTP/JSON API over a fit directory.

A thin adapter: every endpoint delegates to the same library calls the CLI
uses. Evaluations run synchronously up to a size threshold; above it the
server answers 202 and the client polls GET /runs/{id} until the record
flips from pending to done. One writer mutates the registry at a time.
"""

from __future__ import annotations

import csv
import os
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import IdssError, InvalidInput, ParseError, UnknownNode, UnknownPolicy
from ..policies import builtin_policies
from .document import policy_from_dict, policy_to_dict
from .ops import evaluate_to_registry, load_fit, resolve_policies, save_policy, saved_policies
from .registry import RunRecord, RunRegistry, run_id_for

# evaluations larger than this return 202 and run in the background
DEFAULT_SYNC_LIMIT = 50_000


class EvaluateRequest(BaseModel):
    policies: list = Field(default_factory=lambda: ["P1", "P2", "P3", "P4", "P5"])
    n: int = 10_000
    seed: int = 42


def create_app(fit_dir, sync_limit: int | None = None) -> FastAPI:
    fit_dir = Path(fit_dir)
    ctx = load_fit(fit_dir)
    registry = RunRegistry(fit_dir)
    write_lock = threading.Lock()
    if sync_limit is None:
        sync_limit = int(os.environ.get("IDSS_SYNC_LIMIT", DEFAULT_SYNC_LIMIT))

    app = FastAPI(title="idss", version="0.1.0")

    @app.exception_handler(IdssError)
    async def _domain_error(request, err: IdssError):
        status = 400
        if isinstance(err, (UnknownNode, UnknownPolicy)):
            status = 404
        if isinstance(err, (InvalidInput, ParseError)):
            status = 422
        return JSONResponse(status_code=status, content={"detail": str(err)})

    @app.get("/network")
    def get_network():
        return ctx.parsed.raw

    @app.get("/series/{node}")
    def get_series(node: str):
        path = fit_dir / "series" / f"{node}.csv"
        if node not in ctx.fitted.fits or not path.exists():
            raise HTTPException(status_code=404, detail=f"no series for node {node!r}")
        years, mean, lo95, hi95 = [], [], [], []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                years.append(int(row["year"]))
                mean.append(float(row["mean"]))
                lo95.append(float(row["lo95"]))
                hi95.append(float(row["hi95"]))
        return {
            "node": node,
            "observed": ctx.fitted.fits[node].filter_state.y.tolist(),
            "years": years,
            "mean": mean,
            "lo95": lo95,
            "hi95": hi95,
        }

    @app.get("/policies")
    def get_policies():
        return {
            "builtin": [policy_to_dict(p) for p in builtin_policies()],
            "saved": [policy_to_dict(p) for p in saved_policies(fit_dir)],
        }

    @app.post("/policies", status_code=201)
    def post_policy(doc: dict):
        policy = policy_from_dict(doc)
        unknown = policy.nodes() - set(ctx.parsed.spec.nodes)
        if unknown:
            raise InvalidInput(f"policy intervenes unknown nodes: {sorted(unknown)}")
        save_policy(fit_dir, policy)
        return {"saved": policy.name}

    def _run_evaluation(policies, n, seed):
        with write_lock:
            return evaluate_to_registry(ctx, policies, n, seed)

    @app.post("/evaluate")
    def post_evaluate(req: EvaluateRequest):
        if req.n < 100:
            raise InvalidInput("n must be >= 100")
        policies = resolve_policies(fit_dir, req.policies)
        policy_docs = [policy_to_dict(p) for p in policies]
        run_id = run_id_for(
            ctx.parsed.fingerprint,
            ctx.data_fingerprint,
            policy_docs,
            ctx.parsed.raw.get("utility", {}),
            req.n,
            req.seed,
        )
        if registry.exists(run_id):
            record = registry.load(run_id, with_samples=False)
            if record.status == "done":
                return {"run_id": run_id, "status": "done"}
        if req.n > sync_limit:
            pending = RunRecord(
                run_id=run_id,
                network_fingerprint=ctx.parsed.fingerprint,
                data_fingerprint=ctx.data_fingerprint,
                policies=policy_docs,
                utility=ctx.parsed.raw.get("utility", {}),
                n_samples=req.n,
                seed=req.seed,
                status="pending",
            )
            with write_lock:
                registry.save(pending)
            worker = threading.Thread(
                target=_run_evaluation, args=(policies, req.n, req.seed), daemon=True
            )
            worker.start()
            return JSONResponse(status_code=202, content={"run_id": run_id, "status": "pending"})
        record = _run_evaluation(policies, req.n, req.seed)
        return {"run_id": record.run_id, "status": record.status}

    @app.get("/runs")
    def get_runs():
        return registry.index()

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        try:
            record = registry.load(run_id)
        except UnknownPolicy:
            raise HTTPException(status_code=404, detail=f"no run {run_id!r}") from None
        doc = record.to_json()
        doc["samples"] = record.samples
        return doc

    ui_dir = _ui_dist()
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _ui_dist() -> Path | None:
    """Locate the built browser UI, if any."""
    candidates = [
        Path(os.environ.get("IDSS_UI_DIST", "")),
        Path(__file__).resolve().parents[3] / "frontend" / "dist",
    ]
    for cand in candidates:
        if cand and cand.is_dir() and (cand / "index.html").exists():
            return cand
    return None
