"""Shared orchestration behind the CLI and the HTTP API.

A fit directory is self-contained: it holds the normalized network
document, the data as loaded, per-node series and state dumps, and a
manifest with fingerprints. Evaluations re-derive the fitted network from
those persisted inputs (fitting is fast and deterministic), which is what
makes run ids reproducible across processes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__
from ..catalog import TimeSeriesTable, apply_transforms, load_table, slice_window, write_table
from ..errors import IdssError, InvalidInput, ParseError, UnknownNode, UnknownPolicy
from ..network import FittedNetwork, fit_network, smooth_network, validate_network
from ..panels import check_adequacy, check_partition
from ..policies import Policy, builtin_policies, evaluate_policies
from .document import (
    ParsedDocument,
    fingerprint,
    load_document,
    policy_from_dict,
    policy_to_dict,
    save_document,
)
from .registry import RunRecord, RunRegistry, report_rows, run_id_for, samples_dict

SERIES_PRECISION = 12


def _fmt(x: float) -> str:
    return format(float(x), f".{SERIES_PRECISION}g")


def run_validate(parsed: ParsedDocument) -> dict:
    """Structure diagnostics: DAG, panel partition, adequacy."""
    diagnostics: dict = {"name": parsed.name, "fingerprint": parsed.fingerprint}
    try:
        order = validate_network(parsed.spec)
        diagnostics["dag"] = {"ok": True, "order": order}
    except IdssError as err:
        diagnostics["dag"] = {"ok": False, "error": str(err)}
    partition = check_partition(parsed.panels, parsed.spec)
    diagnostics["partition"] = {"ok": partition.ok, "violations": partition.violations()}
    adequacy = check_adequacy(parsed.panels, parsed.spec)
    diagnostics["adequacy"] = {"ok": adequacy.ok, "violations": adequacy.violations()}
    diagnostics["ok"] = all(
        diagnostics[k]["ok"] for k in ("dag", "partition", "adequacy")
    )
    return diagnostics


@dataclass
class FitContext:
    parsed: ParsedDocument
    table: TimeSeriesTable
    fitted: FittedNetwork
    data_fingerprint: str
    fit_dir: Path


def fit_to_dir(
    network_file,
    data_csv,
    out_dir,
    window: tuple[int, int] | None = None,
) -> FitContext:
    """Validate, fit, and persist everything needed to reproduce the fit."""
    parsed = load_document(network_file)
    diagnostics = run_validate(parsed)
    if not diagnostics["ok"]:
        problems = [
            v
            for key in ("dag", "partition", "adequacy")
            for v in diagnostics[key].get("violations", [diagnostics[key].get("error")])
            if not diagnostics[key]["ok"] and v
        ]
        raise InvalidInput("network failed validation: " + "; ".join(map(str, problems)))

    raw = load_table(data_csv, parsed.catalog)
    if window is not None:
        raw = slice_window(raw, *window)
    table = apply_transforms(raw, parsed.catalog)
    fitted = fit_network(parsed.spec, table)
    data_fp = fingerprint(Path(data_csv).read_bytes())
    fitted.fingerprint = parsed.fingerprint

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_document(parsed.raw, out / "network.json")
    write_table(raw, out / "data.csv")

    bands = smooth_network(fitted)
    series_dir = out / "series"
    series_dir.mkdir(exist_ok=True)
    for node, band in bands.items():
        with open(series_dir / f"{node}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["year", "mean", "lo95", "hi95"])
            for i, year in enumerate(band.years):
                writer.writerow(
                    [year, _fmt(band.mean[i]), _fmt(band.lo95[i]), _fmt(band.hi95[i])]
                )

    state_dir = out / "state"
    state_dir.mkdir(exist_ok=True)
    for node, fit in fitted.fits.items():
        fs = fit.filter_state
        dump = {
            "node": node,
            "years": fitted.years,
            "observed": fs.observed.tolist(),
            "posterior_mean": fs.m.tolist(),
            "posterior_cov": fs.C.tolist(),
            "forecast_mean": fs.f.tolist(),
            "forecast_var": fs.q.tolist(),
            "n": fs.n.tolist(),
            "d": fs.d.tolist(),
            "s": fs.s.tolist(),
            "smoothed_mean": fit.smoothed.h.tolist(),
            "smoothed_cov": fit.smoothed.H.tolist(),
            "log_predictive": fit.log_predictive,
            "regressor_scaling": {k: list(v) for k, v in fit.scaler.items()},
        }
        (state_dir / f"{node}.json").write_text(
            json.dumps(dump, indent=1) + "\n", encoding="utf-8"
        )

    manifest = {
        "engine_version": __version__,
        "network_fingerprint": parsed.fingerprint,
        "data_fingerprint": data_fp,
        "window": [table.years[0], table.years[-1]],
        "nodes": list(parsed.spec.nodes),
        "total_log_predictive": fitted.total_log_predictive,
        "series_files": sorted(f"series/{n}.csv" for n in fitted.fits),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return FitContext(
        parsed=parsed, table=table, fitted=fitted, data_fingerprint=data_fp, fit_dir=out
    )


def load_fit(fit_dir) -> FitContext:
    """Rebuild the fitted network from a persisted fit directory."""
    fit_dir = Path(fit_dir)
    if not (fit_dir / "manifest.json").exists():
        raise ParseError(f"{fit_dir} is not a fit directory (no manifest.json)")
    parsed = load_document(fit_dir / "network.json")
    raw = load_table(fit_dir / "data.csv", parsed.catalog)
    table = apply_transforms(raw, parsed.catalog)
    fitted = fit_network(parsed.spec, table)
    fitted.fingerprint = parsed.fingerprint
    data_fp = fingerprint((fit_dir / "data.csv").read_bytes())
    return FitContext(
        parsed=parsed, table=table, fitted=fitted, data_fingerprint=data_fp, fit_dir=fit_dir
    )


def saved_policies(fit_dir) -> list[Policy]:
    pol_dir = Path(fit_dir) / "policies"
    if not pol_dir.exists():
        return []
    out = []
    for path in sorted(pol_dir.glob("*.json")):
        out.append(policy_from_dict(json.loads(path.read_text(encoding="utf-8"))))
    return out


def save_policy(fit_dir, policy: Policy) -> Path:
    pol_dir = Path(fit_dir) / "policies"
    pol_dir.mkdir(parents=True, exist_ok=True)
    path = pol_dir / f"{policy.name}.json"
    path.write_text(
        json.dumps(policy_to_dict(policy), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def resolve_policies(fit_dir, requested: list) -> list[Policy]:
    """Resolve policy names (builtin or saved) and inline definitions."""
    available = {p.name: p for p in builtin_policies()}
    for p in saved_policies(fit_dir):
        available[p.name] = p
    out: list[Policy] = []
    for item in requested:
        if isinstance(item, str):
            if item not in available:
                raise UnknownPolicy(f"no policy named {item!r}")
            out.append(available[item])
        elif isinstance(item, dict):
            out.append(policy_from_dict(item))
        elif isinstance(item, Policy):
            out.append(item)
        else:
            raise InvalidInput(f"cannot interpret policy {item!r}")
    return out


def evaluate_to_registry(
    ctx: FitContext, policies: list[Policy], n_samples: int, seed: int
) -> RunRecord:
    """Evaluate policies and persist the run under its content-hash id."""
    if not policies:
        raise InvalidInput("no policies")
    policy_docs = [policy_to_dict(p) for p in policies]
    utility_doc = ctx.parsed.raw.get("utility", {})
    run_id = run_id_for(
        ctx.parsed.fingerprint, ctx.data_fingerprint, policy_docs, utility_doc, n_samples, seed
    )
    report = evaluate_policies(
        ctx.fitted, policies, ctx.parsed.utility, n_samples=n_samples, seed=seed
    )
    record = RunRecord(
        run_id=run_id,
        network_fingerprint=ctx.parsed.fingerprint,
        data_fingerprint=ctx.data_fingerprint,
        policies=policy_docs,
        utility=utility_doc,
        n_samples=n_samples,
        seed=seed,
        status="done",
        report=report_rows(report.results, report.ranking),
        ranking=report.ranking,
        samples=samples_dict(report.results),
    )
    RunRegistry(ctx.fit_dir).save(record)
    return record
