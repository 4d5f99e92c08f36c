"""Expert-panel decomposition and its machine-checkable structure rules.

Panels partition the network nodes; each one donates conditional forecast
summaries for its nodes given values supplied for its declared inputs. The
checkable conditions are the partition itself (disjoint, covering) and
adequacy (every cross-panel parent owned somewhere and declared as an
input of the consuming panel). Institutional conditions such as likelihood
separation are carried as recorded attestations, not computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, MissingInput
from .network import FittedNetwork, NetworkSpec


@dataclass(frozen=True)
class Panel:
    """One expert panel: owned nodes plus inputs required from other panels."""

    id: str
    label: str
    nodes: frozenset[str]
    inputs: frozenset[str] = frozenset()
    attestations: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        if not self.nodes:
            raise InvalidInput(f"panel {self.id}: empty node set")
        if self.nodes & self.inputs:
            raise InvalidInput(
                f"panel {self.id}: inputs overlap own nodes {sorted(self.nodes & self.inputs)}"
            )


@dataclass
class PartitionReport:
    ok: bool
    overlap: dict[str, list[str]]   # node -> panel ids claiming it
    uncovered: list[str]            # network nodes no panel owns
    unknown: list[str]              # panel nodes absent from the network

    def violations(self) -> list[str]:
        out = [f"overlap: {n} owned by {', '.join(ps)}" for n, ps in self.overlap.items()]
        out += [f"uncovered: {n}" for n in self.uncovered]
        out += [f"unknown: {n}" for n in self.unknown]
        return out


@dataclass
class AdequacyReport:
    ok: bool
    missing: list[dict]  # {panel, node, parent, reason}

    def violations(self) -> list[str]:
        return [
            f"{m['node']} needs {m['parent']} ({m['reason']}, panel {m['panel']})"
            for m in self.missing
        ]


def check_partition(panels: list[Panel], spec: NetworkSpec) -> PartitionReport:
    """Panels must be pairwise disjoint and jointly cover every network node."""
    owners: dict[str, list[str]] = {}
    for panel in panels:
        for node in panel.nodes:
            owners.setdefault(node, []).append(panel.id)
    overlap = {n: sorted(ps) for n, ps in owners.items() if len(ps) > 1}
    uncovered = sorted(n for n in spec.nodes if n not in owners)
    unknown = sorted(n for n in owners if n not in set(spec.nodes))
    ok = not overlap and not uncovered and not unknown
    return PartitionReport(ok=ok, overlap=overlap, uncovered=uncovered, unknown=unknown)


def check_adequacy(panels: list[Panel], spec: NetworkSpec) -> AdequacyReport:
    """Every parent must be owned by some panel, and declared as an input of
    the consuming panel when the owner differs."""
    owner: dict[str, str] = {}
    for panel in panels:
        for node in panel.nodes:
            owner.setdefault(node, panel.id)
    by_id = {p.id: p for p in panels}
    missing: list[dict] = []
    for parent, child in spec.edges:
        child_panel = owner.get(child)
        if child_panel is None:
            continue  # partition failure, reported elsewhere
        parent_panel = owner.get(parent)
        if parent_panel is None:
            missing.append(
                {"panel": child_panel, "node": child, "parent": parent, "reason": "unowned"}
            )
        elif parent_panel != child_panel and parent not in by_id[child_panel].inputs:
            missing.append(
                {"panel": child_panel, "node": child, "parent": parent, "reason": "undeclared input"}
            )
    missing.sort(key=lambda m: (m["panel"], m["node"], m["parent"]))
    return AdequacyReport(ok=not missing, missing=missing)


@dataclass
class SummaryBundle:
    """Per-time conditional forecast summaries donated by one panel."""

    panel: str
    years: list[int]
    mean: dict[str, np.ndarray]      # node -> (T,) conditional forecast mean
    variance: dict[str, np.ndarray]  # node -> (T,) conditional forecast variance


def donate_summaries(
    panel: Panel, fitted: FittedNetwork, parent_values: dict[str, np.ndarray]
) -> SummaryBundle:
    """Forecast mean f_t and variance Q_t for each panel node under supplied
    parent series; supplying the observed parents reproduces the fit's own
    one-step forecasts."""
    t_len = fitted.n_years
    mean: dict[str, np.ndarray] = {}
    variance: dict[str, np.ndarray] = {}
    for node in sorted(panel.nodes):
        if node not in fitted.fits:
            raise MissingInput(f"panel {panel.id}: node {node!r} not in fitted network")
        fit = fitted.fits[node]
        model = fit.model
        fs = fit.filter_state
        cols = [np.ones(t_len)]
        for parent in model.parents:
            if parent in parent_values:
                raw = np.asarray(parent_values[parent], float)
            elif parent in panel.nodes:
                # intra-panel parent: fall back to its observed series
                raw = fitted.fits[parent].filter_state.y
            else:
                raise MissingInput(f"panel {panel.id}: no value supplied for input {parent!r}")
            if raw.shape != (t_len,):
                raise MissingInput(f"panel {panel.id}: input {parent!r} must have length {t_len}")
            mu, sd = fit.scaler[parent]
            cols.append((raw - mu) / sd)
        if model.include_lag:
            mu, sd = fit.scaler["__lag__"]
            own = fs.y
            lag = np.concatenate([[0.0], (own[:-1] - mu) / sd])
            cols.append(lag)
        design = np.column_stack(cols)
        f = np.einsum("tp,tp->t", design, fs.a)
        q = np.einsum("tp,tpq,tq->t", design, fs.R, design)
        if model.learns_variance:
            prev_s = np.concatenate([[model.prior_d / model.prior_n], fs.s[:-1]])
            q = q + prev_s
        else:
            q = q + model.fixed_obs_variance
        mean[node] = f
        variance[node] = q
    return SummaryBundle(panel=panel.id, years=list(fitted.years), mean=mean, variance=variance)
