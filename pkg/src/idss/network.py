"""DAG of dynamic regressions: validation, per-node fitting, replicates.

Each node is a univariate dynamic regression on its contemporaneous parents
(design row [1, standardized parent values, optional own lag]). Nodes update
independently given observed parent values, so fitting is embarrassingly
parallel across nodes; joint behaviour enters only when simulating
replicates, which traverse the DAG in topological order so children consume
their parents' simulated (and possibly intervened) values.
"""

from __future__ import annotations

import dataclasses
import zlib
from dataclasses import dataclass, field

import numpy as np

from .catalog import TimeSeriesTable
from .dlm import (
    FilterState,
    NodeModel,
    SmoothedState,
    backward_smooth,
    ffbs_sample_many,
    forward_filter,
)
from .errors import CycleError, InvalidInput, UnknownNode

# interventions recognised by simulate_replicates
INTERVENTION_KINDS = ("set", "scale", "shift")


@dataclass(frozen=True)
class Intervention:
    """One controlled node: kind in {set, scale, shift}, optional year range.

    ``scale`` multiplies the node's natural-scale value (for log-modelled
    nodes this adds log(magnitude) to the modelled value), ``shift`` adds in
    the modelled scale, ``set`` overrides in the modelled scale. years=None
    means the whole window, else an inclusive (start, end) pair.
    """

    node: str
    kind: str
    magnitude: float = 0.0
    years: tuple[int, int] | None = None

    def __post_init__(self):
        if self.kind not in INTERVENTION_KINDS:
            raise InvalidInput(f"unknown intervention kind {self.kind!r}")
        if not np.isfinite(self.magnitude):
            raise InvalidInput(f"intervention on {self.node}: non-finite magnitude")
        if self.kind == "scale" and self.magnitude <= 0:
            raise InvalidInput(f"intervention on {self.node}: scale must be > 0")
        if self.years is not None and self.years[0] > self.years[1]:
            raise InvalidInput(f"intervention on {self.node}: empty year range")


@dataclass(frozen=True)
class Policy:
    """A named set of interventions to evaluate."""

    name: str
    interventions: tuple[Intervention, ...] = ()
    description: str = ""

    def nodes(self) -> set[str]:
        return {iv.node for iv in self.interventions}


@dataclass
class NetworkSpec:
    """Node set, parent edges, per-node models, and panel ownership."""

    nodes: list[str]
    edges: list[tuple[str, str]]
    node_models: dict[str, NodeModel]
    panel_of: dict[str, str] = field(default_factory=dict)
    log_scale: frozenset[str] = frozenset()

    def __post_init__(self):
        self.edges = [tuple(e) for e in self.edges]
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise InvalidInput("duplicate node names")
        for parent, child in self.edges:
            if parent not in known:
                raise UnknownNode(f"edge references unknown node {parent!r}")
            if child not in known:
                raise UnknownNode(f"edge references unknown node {child!r}")
        for name in self.nodes:
            model = self.node_models.get(name)
            if model is None:
                raise InvalidInput(f"node {name!r} has no model")
            declared = set(self.parents(name))
            if set(model.parents) != declared:
                raise InvalidInput(
                    f"node {name!r}: model parents {model.parents} != edges {sorted(declared)}"
                )

    def parents(self, node: str) -> list[str]:
        return [p for p, c in self.edges if c == node]

    def children(self, node: str) -> list[str]:
        return [c for p, c in self.edges if p == node]

    def descendants(self, sources: set[str]) -> set[str]:
        """All nodes reachable from sources by directed paths (excl. sources)."""
        out: set[str] = set()
        frontier = list(sources)
        while frontier:
            node = frontier.pop()
            for child in self.children(node):
                if child not in out:
                    out.add(child)
                    frontier.append(child)
        return out - set(sources)


def validate_network(spec: NetworkSpec) -> list[str]:
    """Deterministic topological order (Kahn; ties by node name, ascending).

    Raises CycleError (naming one cycle) if the graph is not a DAG.
    """
    indeg = {n: 0 for n in spec.nodes}
    for _, child in spec.edges:
        indeg[child] += 1
    ready = sorted(n for n, k in indeg.items() if k == 0)
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for child in sorted(spec.children(node)):
            indeg[child] -= 1
            if indeg[child] == 0:
                # keep the ready list sorted for a deterministic order
                lo, hi = 0, len(ready)
                while lo < hi:
                    mid = (lo + hi) // 2
                    if ready[mid] < child:
                        lo = mid + 1
                    else:
                        hi = mid
                ready.insert(lo, child)
    if len(order) < len(spec.nodes):
        remaining = [n for n in spec.nodes if n not in set(order)]
        cycle = _find_cycle(spec, remaining)
        raise CycleError(f"graph has a cycle: {' -> '.join(cycle)}", cycle=cycle)
    return order


def _find_cycle(spec: NetworkSpec, candidates: list[str]) -> list[str]:
    # trim to the cyclic core: nodes that keep both an in- and an out-edge
    cand = set(candidates)
    while True:
        trimmed = {
            n
            for n in cand
            if any(c in cand for c in spec.children(n))
            and any(p in cand for p in spec.parents(n))
        }
        if trimmed == cand:
            break
        cand = trimmed
    start = sorted(cand)[0]
    seen: dict[str, int] = {}
    path: list[str] = []
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = sorted(c for c in spec.children(node) if c in cand)[0]
    return path[seen[node] :] + [node]


@dataclass
class NodeFit:
    """Fit artifacts for one node."""

    model: NodeModel
    filter_state: FilterState
    smoothed: SmoothedState
    log_predictive: float
    design: np.ndarray                 # (T, p) standardized design rows
    scaler: dict[str, tuple[float, float]]  # regressor -> (mean, sd)


@dataclass
class FittedNetwork:
    spec: NetworkSpec
    years: list[int]
    fits: dict[str, NodeFit]
    order: list[str]
    moments: dict[str, tuple[float, float]]  # node -> (mean, sd) of its own series
    total_log_predictive: float
    fingerprint: str = ""

    @property
    def n_years(self) -> int:
        return len(self.years)


def _series_moments(values: np.ndarray) -> tuple[float, float]:
    obs = values[np.isfinite(values)]
    if obs.size == 0:
        raise InvalidInput("series has no observed values")
    mean = float(obs.mean())
    sd = float(obs.std())
    return mean, (sd if sd > 0 else 1.0)


def _design_matrix(
    spec: NetworkSpec, table: TimeSeriesTable, node: str, moments: dict
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Standardized design rows plus the effective response (NaN where any
    regressor is unavailable, so those steps fall through as missing)."""
    model = spec.node_models[node]
    t_len = table.n_years
    y = table.columns[node].copy()
    cols = [np.ones(t_len)]
    scaler: dict[str, tuple[float, float]] = {}
    for parent in model.parents:
        mean, sd = moments[parent]
        raw = table.columns[parent]
        z = (raw - mean) / sd
        bad = ~np.isfinite(raw)
        z[bad] = 0.0
        y[bad] = np.nan  # cannot update against an unobserved parent
        cols.append(z)
        scaler[parent] = (mean, sd)
    if model.include_lag:
        mean, sd = moments[node]
        raw = table.columns[node]
        z = np.empty(t_len)
        z[0] = 0.0
        z[1:] = (raw[:-1] - mean) / sd
        bad = np.zeros(t_len, dtype=bool)
        bad[0] = True
        bad[1:] = ~np.isfinite(raw[:-1])
        z[bad] = 0.0
        y[bad] = np.nan
        cols.append(z)
        scaler["__lag__"] = (mean, sd)
    return np.column_stack(cols), y, scaler


def _effective_model(model: NodeModel, mean: float, sd: float) -> NodeModel:
    """Map a prior stated in response-standardized units onto the data scale.

    m0 -> ybar * e_intercept + ysd * m0, C0 -> ysd^2 * C0, d0 -> ysd^2 * d0,
    and likewise an explicit W or fixed observation variance. Leaves the
    model untouched when scale_priors_to_data is off.
    """
    if not model.scale_priors_to_data:
        return model
    m0 = np.asarray(model.prior_mean, float) * sd
    m0[0] += mean
    changes: dict = {
        "prior_mean": m0,
        "prior_cov": np.asarray(model.prior_cov, float) * sd**2,
        "prior_d": model.prior_d * sd**2,
    }
    if model.explicit_w is not None:
        changes["explicit_w"] = model.explicit_w * sd**2
    if model.fixed_obs_variance is not None:
        changes["fixed_obs_variance"] = model.fixed_obs_variance * sd**2
    return dataclasses.replace(model, **changes)


def fit_network(spec: NetworkSpec, table: TimeSeriesTable) -> FittedNetwork:
    """Filter and smooth every node independently given observed parents."""
    order = validate_network(spec)
    missing = [n for n in spec.nodes if n not in table.columns]
    if missing:
        raise UnknownNode(f"table lacks series for nodes: {missing}")
    moments = {n: _series_moments(table.columns[n]) for n in spec.nodes}

    fits: dict[str, NodeFit] = {}
    total = 0.0
    for node in order:
        model = _effective_model(spec.node_models[node], *moments[node])
        design, y, scaler = _design_matrix(spec, table, node, moments)
        try:
            fstate, logp = forward_filter(y, design, model)
        except Exception as err:
            raise type(err)(f"node {node!r}: {err}") from err
        smoothed = backward_smooth(fstate, model)
        fits[node] = NodeFit(
            model=model,
            filter_state=fstate,
            smoothed=smoothed,
            log_predictive=logp,
            design=design,
            scaler=scaler,
        )
        total += logp
    return FittedNetwork(
        spec=spec,
        years=list(table.years),
        fits=fits,
        order=order,
        moments=moments,
        total_log_predictive=total,
    )


def coefficient_series(fitted: FittedNetwork, node: str) -> dict[str, np.ndarray]:
    """Smoothed regression effects per parent, back-transformed to the raw
    parent scale (effect per raw unit = standardized effect / parent sd)."""
    fit = fitted.fits[node]
    out = {"intercept": fit.smoothed.h[:, 0].copy()}
    offset = np.zeros(fitted.n_years)
    for j, parent in enumerate(fit.model.parents, start=1):
        mean, sd = fit.scaler[parent]
        coef = fit.smoothed.h[:, j] / sd
        out[parent] = coef
        offset += coef * mean
    out["intercept"] -= offset
    return out


@dataclass
class NodeBand:
    """Smoothed fit of one node's series with a 95% credible band."""

    years: list[int]
    mean: np.ndarray
    lo95: np.ndarray
    hi95: np.ndarray
    sd: np.ndarray


def smooth_network(fitted: FittedNetwork) -> dict[str, NodeBand]:
    """Fitted mean and 95% band per node.

    mean_t = F_t' h_t; band = mean +/- 1.96 * sqrt(F_t' H_t F_t + v_t) with
    v_t the fixed observation variance or the running estimate S_t.
    """
    out: dict[str, NodeBand] = {}
    for node, fit in fitted.fits.items():
        fs = fit.filter_state
        t_len = fs.T
        mean = np.einsum("tp,tp->t", fit.design, fit.smoothed.h)
        signal_var = np.einsum("tp,tpq,tq->t", fit.design, fit.smoothed.H, fit.design)
        if fit.model.learns_variance:
            v = fs.s
        else:
            v = np.full(t_len, fit.model.fixed_obs_variance)
        sd = np.sqrt(np.maximum(signal_var + v, 0.0))
        out[node] = NodeBand(
            years=list(fitted.years),
            mean=mean,
            lo95=mean - 1.96 * sd,
            hi95=mean + 1.96 * sd,
            sd=sd,
        )
    return out


def node_stream(master_seed: int, node: str) -> np.random.Generator:
    """Private, reproducible random stream for one node of one run.

    Philox keyed by (master seed, crc32 of the node name): replicate draws
    are laid out along a fixed axis so runs with the same seed consume
    identical randomness per node regardless of interventions elsewhere.
    """
    key = np.random.SeedSequence((int(master_seed), zlib.crc32(node.encode("utf-8"))))
    return np.random.Generator(np.random.Philox(key))


@dataclass
class ReplicateSet:
    """Joint predictive replicates of the whole network over the window.

    values[node] is (T, n_samples) in the node's modelled scale; theta[node]
    the sampled state paths (T, n_samples, p); noise_var[node] the sampled
    observation variance per replicate.
    """

    spec: NetworkSpec
    years: list[int]
    n_samples: int
    seed: int
    values: dict[str, np.ndarray]
    theta: dict[str, np.ndarray]
    noise_var: dict[str, np.ndarray]
    moments: dict[str, tuple[float, float]]
    policy: str = ""

    def replicate(self, r: int) -> dict[str, np.ndarray]:
        """Single draw as node -> (T,) values."""
        return {node: vals[:, r].copy() for node, vals in self.values.items()}


def _year_mask(years: list[int], span: tuple[int, int] | None) -> np.ndarray:
    if span is None:
        return np.ones(len(years), dtype=bool)
    ys = np.asarray(years)
    return (ys >= span[0]) & (ys <= span[1])


def simulate_replicates(
    fitted: FittedNetwork,
    policy: Policy | None,
    n_samples: int,
    seed: int,
) -> ReplicateSet:
    """Draw joint replicates, overriding intervened nodes.

    Per node: a state path from the smoothed posterior (FFBS) and an
    observation variance drawn from the terminal gamma posterior (or the
    fixed variance). Values are then generated in topological order; an
    intervened node's value is computed from its own model first (keeping
    every stream aligned with the no-policy run) and then set, scaled or
    shifted before children consume it, so nodes with no directed path from
    an intervened node are bit-identical to their do-nothing counterparts.
    """
    if n_samples < 1:
        raise InvalidInput("n_samples must be >= 1")
    spec = fitted.spec
    policy = policy or Policy(name="baseline")
    unknown = policy.nodes() - set(spec.nodes)
    if unknown:
        raise UnknownNode(f"policy {policy.name!r} intervenes unknown nodes: {sorted(unknown)}")

    t_len = fitted.n_years
    theta: dict[str, np.ndarray] = {}
    noise: dict[str, np.ndarray] = {}
    shocks: dict[str, np.ndarray] = {}
    for node in fitted.order:
        fit = fitted.fits[node]
        rng = node_stream(seed, node)
        theta[node] = ffbs_sample_many(fit.filter_state, fit.model, rng, n_samples)
        z = rng.standard_normal((t_len, n_samples))
        if fit.model.learns_variance:
            post = fit.filter_state.terminal()
            phi = rng.gamma(shape=post.n / 2.0, scale=2.0 / post.d, size=n_samples)
            var = 1.0 / phi
        else:
            var = np.full(n_samples, fit.model.fixed_obs_variance)
        noise[node] = var
        shocks[node] = z * np.sqrt(var)[None, :]

    by_node: dict[str, list[Intervention]] = {}
    for iv in policy.interventions:
        by_node.setdefault(iv.node, []).append(iv)

    def apply_interventions(node: str, sim: np.ndarray, t_mask: np.ndarray) -> np.ndarray:
        for iv in by_node.get(node, ()):
            mask = _year_mask(fitted.years, iv.years) & t_mask
            if iv.kind == "set":
                sim[mask, :] = iv.magnitude
            elif iv.kind == "scale":
                if node in spec.log_scale:
                    sim[mask, :] += np.log(iv.magnitude)
                else:
                    sim[mask, :] *= iv.magnitude
            else:  # shift
                sim[mask, :] += iv.magnitude
        return sim

    all_t = np.ones(t_len, dtype=bool)
    values: dict[str, np.ndarray] = {}
    for node in fitted.order:
        fit = fitted.fits[node]
        model = fit.model
        paths = theta[node]  # (T, n, p)
        sim = paths[:, :, 0].copy()
        for j, parent in enumerate(model.parents, start=1):
            mean, sd = fit.scaler[parent]
            sim += paths[:, :, j] * ((values[parent] - mean) / sd)
        if model.include_lag:
            # the lag regressor sees the previous post-intervention value,
            # so interventions must be applied step by step
            mean, sd = fit.scaler["__lag__"]
            lag_col = 1 + len(model.parents)
            out = np.empty((t_len, n_samples))
            step = np.ones(t_len, dtype=bool)
            for t in range(t_len):
                lag = np.zeros(n_samples) if t == 0 else (out[t - 1] - mean) / sd
                out[t] = sim[t] + paths[t, :, lag_col] * lag + shocks[node][t]
                step.fill(False)
                step[t] = True
                apply_interventions(node, out, step)
            sim = out
        else:
            sim = apply_interventions(node, sim + shocks[node], all_t)
        values[node] = sim

    return ReplicateSet(
        spec=spec,
        years=list(fitted.years),
        n_samples=n_samples,
        seed=seed,
        values=values,
        theta=theta,
        noise_var=noise,
        moments=dict(fitted.moments),
        policy=policy.name,
    )


def replicate_log_density(
    fitted: FittedNetwork, reps: ReplicateSet, r: int
) -> tuple[float, dict[str, float]]:
    """Log density of replicate r given its own state paths and variances.

    The joint factorizes over nodes as a product of Gaussian conditionals;
    returns (total, per-node terms). Only meaningful for non-intervened runs.
    """
    total = 0.0
    per_node: dict[str, float] = {}
    for node in fitted.order:
        fit = fitted.fits[node]
        model = fit.model
        paths = reps.theta[node][:, r, :]
        mean = paths[:, 0].copy()
        for j, parent in enumerate(model.parents, start=1):
            mu, sd = fit.scaler[parent]
            mean += paths[:, j] * ((reps.values[parent][:, r] - mu) / sd)
        if model.include_lag:
            mu, sd = fit.scaler["__lag__"]
            lag_col = 1 + len(model.parents)
            own = reps.values[node][:, r]
            lag = np.concatenate([[0.0], (own[:-1] - mu) / sd])
            mean += paths[:, lag_col] * lag
        var = reps.noise_var[node][r]
        resid = reps.values[node][:, r] - mean
        ll = -0.5 * np.sum(np.log(2 * np.pi * var) + resid**2 / var)
        per_node[node] = float(ll)
        total += float(ll)
    return total, per_node
