"""Operational shell: network documents, run registry, CLI, and HTTP API."""

from .document import (
    ParsedDocument,
    canonical_json,
    default_document,
    fingerprint,
    load_document,
    parse_document,
    policy_from_dict,
    policy_to_dict,
    save_document,
)
from .registry import RunRecord, RunRegistry, run_id_for
