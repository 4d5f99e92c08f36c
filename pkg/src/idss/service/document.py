"""The self-contained network document: one JSON file carrying the catalog,
DAG, model settings, panels, and utility parameters.

The same schema serves the CLI, the run registry, and the browser UI. A
document parses into (catalog, NetworkSpec, panels, UtilityParams);
`build_document` is its inverse. Fingerprints are sha256 over canonical
JSON (sorted keys, fixed separators), so ids are stable under
re-serialization.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from ..catalog import VariableDef
from ..defaults import (
    DEFAULT_ATTESTATIONS,
    default_network,
    default_panels,
    uk_catalog,
)
from ..dlm import NodeModel
from ..errors import ParseError
from ..network import Intervention, NetworkSpec, Policy
from ..panels import Panel
from ..utility import Attribute, UtilityParams, default_params

SCHEMA_VERSION = 1

MODEL_DEFAULTS = {
    "state_discount": 0.98,
    "variance_discount": 0.95,
    "prior_cov_scale": 10.0,
    "prior_n": 1.0,
    "prior_d": 1.0,
    "include_lag": False,
    "fixed_obs_variance": None,
}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def fingerprint(obj) -> str:
    data = obj if isinstance(obj, bytes) else canonical_json(obj).encode("utf-8")
    return hashlib.sha256(data).hexdigest()


@dataclass
class ParsedDocument:
    raw: dict
    catalog: list[VariableDef]
    spec: NetworkSpec
    panels: list[Panel]
    utility: UtilityParams

    @property
    def fingerprint(self) -> str:
        return fingerprint(self.raw)

    @property
    def name(self) -> str:
        return self.raw.get("name", "unnamed")


def _require(doc: dict, key: str, kind, where: str = "document"):
    if key not in doc:
        raise ParseError(f"{where}: missing required field {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def parse_document(doc: dict) -> ParsedDocument:
    version = _require(doc, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {version}")

    catalog = [
        VariableDef(
            name=_require(entry, "name", str, "catalog entry"),
            description=entry.get("description", ""),
            units=entry.get("units", ""),
            transform=entry.get("transform", "none"),
            source_hint=entry.get("source_hint", ""),
        )
        for entry in _require(doc, "catalog", list)
    ]

    nodes = _require(doc, "nodes", list)
    edges = [tuple(e) for e in _require(doc, "edges", list)]
    for e in edges:
        if len(e) != 2:
            raise ParseError(f"edge {e!r} must be a [parent, child] pair")
    log_scale = frozenset(doc.get("log_scale", []))

    defaults = dict(MODEL_DEFAULTS)
    defaults.update(doc.get("model_defaults", {}))
    overrides = doc.get("node_models", {})
    parents: dict[str, list[str]] = {n: [] for n in nodes}
    for parent, child in edges:
        if child not in parents:
            raise ParseError(f"edge {parent}->{child}: unknown child node")
        parents[child].append(parent)

    models = {}
    for node in nodes:
        settings = dict(defaults)
        settings.update(overrides.get(node, {}))
        try:
            models[node] = NodeModel(
                node=node,
                parents=tuple(parents[node]),
                include_lag=bool(settings["include_lag"]),
                state_discount=settings["state_discount"],
                variance_discount=settings["variance_discount"],
                prior_cov=float(settings["prior_cov_scale"]),
                prior_n=float(settings["prior_n"]),
                prior_d=float(settings["prior_d"]),
                fixed_obs_variance=settings["fixed_obs_variance"],
            )
        except Exception as err:
            raise ParseError(f"node_models[{node}]: {err}") from err

    try:
        spec = NetworkSpec(
            nodes=list(nodes),
            edges=edges,
            node_models=models,
            panel_of={
                n: p["id"] for p in doc.get("panels", []) for n in p.get("nodes", [])
            },
            log_scale=log_scale,
        )
    except ParseError:
        raise
    except Exception as err:
        raise ParseError(f"network: {err}") from err

    panels = []
    for p in doc.get("panels", []):
        try:
            panels.append(
                Panel(
                    id=_require(p, "id", str, "panel"),
                    label=p.get("label", ""),
                    nodes=frozenset(_require(p, "nodes", list, f"panel {p.get('id')}")),
                    inputs=frozenset(p.get("inputs", [])),
                    attestations=dict(p.get("attestations", DEFAULT_ATTESTATIONS)),
                )
            )
        except ParseError:
            raise
        except Exception as err:
            raise ParseError(f"panel {p.get('id', '?')}: {err}") from err

    util_doc = doc.get("utility")
    if util_doc is None:
        utility = default_params()
    else:
        try:
            attributes = tuple(
                Attribute(
                    name=_require(a, "name", str, "utility attribute"),
                    kind=a.get("kind", "exponential"),
                    node=a.get("node"),
                    c=float(a.get("c", 1.0)),
                    weight=float(a.get("weight", 1.0)),
                    active=bool(a.get("active", True)),
                    standardize=bool(a.get("standardize", True)),
                )
                for a in util_doc.get("attributes", [])
            )
            utility = UtilityParams(
                a=float(util_doc.get("a", 0.0)),
                b=float(util_doc.get("b", 0.0)),
                attributes=attributes,
                aggregation=util_doc.get("aggregation", "mean"),
            )
        except ParseError:
            raise
        except Exception as err:
            raise ParseError(f"utility: {err}") from err
        active = utility.active_exponential()
        if active and not utility.weights_normalized(tol=1e-6):
            raise ParseError("utility: active attribute weights must sum to 1")

    return ParsedDocument(raw=doc, catalog=catalog, spec=spec, panels=panels, utility=utility)


def build_document(
    catalog: list[VariableDef],
    spec: NetworkSpec,
    panels: list[Panel],
    utility: UtilityParams,
    name: str = "network",
) -> dict:
    """Serialize engine objects back into the document schema."""
    node_models = {}
    for node in spec.nodes:
        m = spec.node_models[node]
        settings = {
            "state_discount": m.state_discount,
            "variance_discount": m.variance_discount,
            "prior_cov_scale": float(m.prior_cov[0, 0]) if hasattr(m.prior_cov, "shape") else float(m.prior_cov),
            "prior_n": m.prior_n,
            "prior_d": m.prior_d,
            "include_lag": m.include_lag,
            "fixed_obs_variance": m.fixed_obs_variance,
        }
        diff = {k: v for k, v in settings.items() if v != MODEL_DEFAULTS.get(k)}
        if diff:
            node_models[node] = diff
    return {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "catalog": [
            {
                "name": v.name,
                "description": v.description,
                "units": v.units,
                "transform": v.transform,
                "source_hint": v.source_hint,
            }
            for v in catalog
        ],
        "nodes": list(spec.nodes),
        "edges": [list(e) for e in spec.edges],
        "log_scale": sorted(spec.log_scale),
        "node_models": node_models,
        "panels": [
            {
                "id": p.id,
                "label": p.label,
                "nodes": sorted(p.nodes),
                "inputs": sorted(p.inputs),
                "attestations": dict(p.attestations),
            }
            for p in panels
        ],
        "utility": {
            "a": utility.a,
            "b": utility.b,
            "aggregation": utility.aggregation,
            "attributes": [
                {
                    "name": a.name,
                    "kind": a.kind,
                    "node": a.node,
                    "c": a.c,
                    "weight": a.weight,
                    "active": a.active,
                    "standardize": a.standardize,
                }
                for a in utility.attributes
            ],
        },
    }


def default_document() -> dict:
    """The bundled food-security configuration as a document."""
    return build_document(
        uk_catalog(),
        default_network(),
        default_panels(),
        default_params(),
        name="uk-food-security",
    )


def load_document(path) -> ParsedDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(
            f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}",
            row=err.lineno,
            column=err.colno,
        ) from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return parse_document(doc)


def save_document(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def policy_to_dict(policy: Policy) -> dict:
    return {
        "name": policy.name,
        "description": policy.description,
        "interventions": [
            {
                "node": iv.node,
                "kind": iv.kind,
                "magnitude": iv.magnitude,
                "years": list(iv.years) if iv.years is not None else None,
            }
            for iv in policy.interventions
        ],
    }


def policy_from_dict(doc: dict) -> Policy:
    try:
        interventions = tuple(
            Intervention(
                node=_require(iv, "node", str, "intervention"),
                kind=_require(iv, "kind", str, "intervention"),
                magnitude=float(_require(iv, "magnitude", (int, float), "intervention")),
                years=tuple(iv["years"]) if iv.get("years") is not None else None,
            )
            for iv in doc.get("interventions", [])
        )
        return Policy(
            name=_require(doc, "name", str, "policy"),
            description=doc.get("description", ""),
            interventions=interventions,
        )
    except ParseError:
        raise
    except Exception as err:
        raise ParseError(f"policy: {err}") from err
