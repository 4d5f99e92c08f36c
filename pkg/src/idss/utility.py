"""Multiattribute utility over replicate draws.

U(z) = a + b * z_cost + sum_i k_i * (1 - exp(-c_i * z_i)) over the active
exponential attributes. The engine treats U as a loss: smaller means less
malnutrition / disadvantage, so policy rankings ascend.

An attribute's value for one replicate is the window aggregate (mean by
default, or final year) of its bound node's simulated values in the node's
modelled scale, optionally standardized by the training series moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BindingError, InvalidInput
from .network import ReplicateSet

AGGREGATIONS = ("mean", "final")


@dataclass(frozen=True)
class Attribute:
    """One utility attribute and its binding to a network node.

    kind "exponential" contributes k * (1 - exp(-c * z)); kind "linear" is
    the cost term b * z. node=None marks an external / inactive attribute.
    """

    name: str
    kind: str = "exponential"
    node: str | None = None
    c: float = 1.0
    weight: float = 1.0
    active: bool = True
    standardize: bool = True

    def __post_init__(self):
        if self.kind not in ("exponential", "linear"):
            raise InvalidInput(f"attribute {self.name}: unknown kind {self.kind!r}")
        if self.active and self.kind == "exponential" and self.c <= 0:
            raise InvalidInput(f"attribute {self.name}: c must be > 0")
        if self.weight < 0:
            raise InvalidInput(f"attribute {self.name}: negative weight")


@dataclass(frozen=True)
class UtilityParams:
    a: float = 0.0
    b: float = 0.0
    attributes: tuple[Attribute, ...] = ()
    aggregation: str = "mean"

    def __post_init__(self):
        if self.aggregation not in AGGREGATIONS:
            raise InvalidInput(f"unknown aggregation {self.aggregation!r}")
        names = [attr.name for attr in self.attributes]
        if len(set(names)) != len(names):
            raise InvalidInput("duplicate attribute names")

    def active_exponential(self) -> tuple[Attribute, ...]:
        return tuple(a for a in self.attributes if a.active and a.kind == "exponential")

    def cost_attribute(self) -> Attribute | None:
        for a in self.attributes:
            if a.kind == "linear":
                return a
        return None

    def weights_normalized(self, tol: float = 1e-9) -> bool:
        total = sum(a.weight for a in self.active_exponential())
        return abs(total - 1.0) <= tol


def default_params() -> UtilityParams:
    """Health and education, equally weighted exponential marginals; social
    unrest carried inactive (no data) and cost kept out of the score (b=0)."""
    return UtilityParams(
        a=0.0,
        b=0.0,
        attributes=(
            Attribute(name="health", node="Health", c=1.0, weight=0.5),
            Attribute(name="education", node="Education", c=1.0, weight=0.5),
            Attribute(name="social_unrest", node=None, c=1.0, weight=0.0, active=False),
            Attribute(name="cost", kind="linear", node=None, active=False),
        ),
    )


def utility_eval(z: dict[str, float | None], params: UtilityParams) -> float:
    """Evaluate U at one attribute vector (None entries contribute nothing)."""
    total = params.a
    cost = params.cost_attribute()
    if cost is not None and cost.active:
        zc = z.get(cost.name)
        if zc is None:
            raise BindingError(f"no value for cost attribute {cost.name!r}")
        if not math.isfinite(zc):
            raise InvalidInput(f"non-finite value for attribute {cost.name!r}")
        total += params.b * zc
    for attr in params.active_exponential():
        zi = z.get(attr.name)
        if zi is None:
            continue
        if not math.isfinite(zi):
            raise InvalidInput(f"non-finite value for attribute {attr.name!r}")
        total += attr.weight * (1.0 - math.exp(-attr.c * zi))
    return total


def attribute_samples(reps: ReplicateSet, params: UtilityParams) -> dict[str, np.ndarray]:
    """Per-replicate attribute values from the bound nodes' simulated series."""
    out: dict[str, np.ndarray] = {}
    for attr in params.attributes:
        if not attr.active:
            continue
        if attr.node is None:
            raise BindingError(f"active attribute {attr.name!r} is bound to no node")
        if attr.node not in reps.values:
            raise BindingError(f"attribute {attr.name!r}: node {attr.node!r} not in replicates")
        sims = reps.values[attr.node]  # (T, n)
        z = sims[-1, :] if params.aggregation == "final" else sims.mean(axis=0)
        if attr.standardize:
            mean, sd = reps.moments[attr.node]
            z = (z - mean) / sd
        out[attr.name] = z
    return out


@dataclass
class UtilityResult:
    mean: float
    mc_se: float
    samples: np.ndarray
    analytic_mean: float | None = None  # populated for purely linear utilities


def expected_utility(reps: ReplicateSet, params: UtilityParams) -> UtilityResult:
    """Monte Carlo expected utility over a replicate set."""
    if reps.n_samples < 1:
        raise InvalidInput("empty replicate set")
    zs = attribute_samples(reps, params)
    n = reps.n_samples
    u = np.full(n, params.a, dtype=float)
    cost = params.cost_attribute()
    if cost is not None and cost.active:
        u += params.b * zs[cost.name]
    exponentials = params.active_exponential()
    for attr in exponentials:
        u += attr.weight * (1.0 - np.exp(-attr.c * zs[attr.name]))
    mean = float(u.mean())
    se = float(u.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    analytic = None
    if not exponentials:
        # linear case: expectation passes through the mean exactly
        analytic = params.a
        if cost is not None and cost.active:
            analytic += params.b * float(zs[cost.name].mean())
    return UtilityResult(mean=mean, mc_se=se, samples=u, analytic_mean=analytic)


def with_offset(params: UtilityParams, extra_a: float) -> UtilityParams:
    return replace(params, a=params.a + extra_a)
