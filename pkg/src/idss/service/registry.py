"""Persistent run registry: plain files, content-hashed run ids.

A run id is a pure function of (network fingerprint, data fingerprint,
policy definitions, utility parameters, n_samples, seed), so re-running
the same evaluation lands on the same id and reproduces the same report
byte for byte. Everything is stored as diffable JSON/CSV under
<fit_dir>/runs/<run_id>/.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import UnknownPolicy
from .document import canonical_json, fingerprint

# run reports format floats to this many significant digits (byte-stable)
REPORT_PRECISION = 12


def _fmt(x: float) -> str:
    return format(float(x), f".{REPORT_PRECISION}g")


def run_id_for(
    network_fingerprint: str,
    data_fingerprint: str,
    policies: list[dict],
    utility: dict,
    n_samples: int,
    seed: int,
) -> str:
    payload = {
        "network": network_fingerprint,
        "data": data_fingerprint,
        "policies": policies,
        "utility": utility,
        "n_samples": n_samples,
        "seed": seed,
    }
    return fingerprint(payload)[:16]


@dataclass
class RunRecord:
    run_id: str
    network_fingerprint: str
    data_fingerprint: str
    policies: list[dict]
    utility: dict
    n_samples: int
    seed: int
    status: str = "done"  # "pending" | "done" | "failed"
    created_at: str = ""
    error: str = ""
    # per policy: {"policy", "expected_utility", "mc_se", "rank"}
    report: list[dict] = field(default_factory=list)
    ranking: list[str] = field(default_factory=list)
    samples: dict[str, list[float]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "network_fingerprint": self.network_fingerprint,
            "data_fingerprint": self.data_fingerprint,
            "policies": self.policies,
            "utility": self.utility,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "status": self.status,
            "created_at": self.created_at,
            "error": self.error,
            "report": self.report,
            "ranking": self.ranking,
        }

    @classmethod
    def from_json(cls, doc: dict, samples: dict[str, list[float]] | None = None) -> "RunRecord":
        return cls(
            run_id=doc["run_id"],
            network_fingerprint=doc["network_fingerprint"],
            data_fingerprint=doc["data_fingerprint"],
            policies=doc["policies"],
            utility=doc["utility"],
            n_samples=doc["n_samples"],
            seed=doc["seed"],
            status=doc.get("status", "done"),
            created_at=doc.get("created_at", ""),
            error=doc.get("error", ""),
            report=doc.get("report", []),
            ranking=doc.get("ranking", []),
            samples=samples or {},
        )


class RunRegistry:
    """File-backed store of run records under a fit directory."""

    def __init__(self, fit_dir):
        self.root = Path(fit_dir) / "runs"

    def path(self, run_id: str) -> Path:
        return self.root / run_id

    def exists(self, run_id: str) -> bool:
        return (self.path(run_id) / "record.json").exists()

    def save(self, record: RunRecord) -> Path:
        run_dir = self.path(record.run_id)
        run_dir.mkdir(parents=True, exist_ok=True)
        if not record.created_at:
            record.created_at = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        (run_dir / "record.json").write_text(
            json.dumps(record.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        if record.status == "done":
            self._write_report_csv(record, run_dir / "report.csv")
            self._write_samples_csv(record, run_dir / "samples.csv")
        return run_dir

    @staticmethod
    def _write_report_csv(record: RunRecord, path: Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["policy", "expected_utility", "mc_se", "rank"])
            for row in record.report:
                writer.writerow(
                    [row["policy"], _fmt(row["expected_utility"]), _fmt(row["mc_se"]), row["rank"]]
                )

    @staticmethod
    def _write_samples_csv(record: RunRecord, path: Path) -> None:
        names = list(record.samples)
        columns = [record.samples[n] for n in names]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for row in zip(*columns):
                writer.writerow([_fmt(v) for v in row])

    def load(self, run_id: str, with_samples: bool = True) -> RunRecord:
        run_dir = self.path(run_id)
        record_file = run_dir / "record.json"
        if not record_file.exists():
            raise UnknownPolicy(f"no run {run_id!r}")
        doc = json.loads(record_file.read_text(encoding="utf-8"))
        samples: dict[str, list[float]] = {}
        samples_file = run_dir / "samples.csv"
        if with_samples and samples_file.exists():
            with open(samples_file, newline="", encoding="utf-8") as fh:
                reader = csv.reader(fh)
                names = next(reader)
                cols: list[list[float]] = [[] for _ in names]
                for row in reader:
                    for i, cell in enumerate(row):
                        cols[i].append(float(cell))
                samples = dict(zip(names, cols))
        return RunRecord.from_json(doc, samples)

    def list_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if (p / "record.json").exists())

    def index(self) -> list[dict]:
        out = []
        for run_id in self.list_ids():
            rec = self.load(run_id, with_samples=False)
            out.append(
                {
                    "run_id": rec.run_id,
                    "status": rec.status,
                    "created_at": rec.created_at,
                    "n_samples": rec.n_samples,
                    "seed": rec.seed,
                    "policies": [p["name"] for p in rec.policies],
                    "ranking": rec.ranking,
                }
            )
        return out


def report_rows(results: dict, ranking: list[str]) -> list[dict]:
    """Flatten an EvaluationReport into registry rows (ranked order)."""
    rank_of = {name: i + 1 for i, name in enumerate(ranking)}
    rows = []
    for name in sorted(results):
        res = results[name]
        rows.append(
            {
                "policy": name,
                "expected_utility": float(res.expected_utility),
                "mc_se": float(res.mc_se),
                "rank": rank_of[name],
            }
        )
    return rows


def samples_dict(results: dict) -> dict[str, list[float]]:
    return {name: np.asarray(res.samples, float).tolist() for name, res in sorted(results.items())}
