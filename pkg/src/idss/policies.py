"""Candidate policies, their evaluation, and ranking by expected utility.

Every policy is simulated with the same master seed (common random numbers)
so cross-policy differences isolate the intervention effect; `compare` then
reports paired deltas against a chosen baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, UnknownPolicy
from .network import FittedNetwork, Intervention, Policy, simulate_replicates
from .utility import UtilityParams, expected_utility

DEFAULT_N_SAMPLES = 10_000


def builtin_policies() -> list[Policy]:
    """The five stock scenarios for the bundled food-security network."""
    return [
        Policy(name="P1", description="do nothing", interventions=()),
        Policy(
            name="P2",
            description="food costs up 25%",
            interventions=(Intervention(node="CFood", kind="scale", magnitude=1.25),),
        ),
        Policy(
            name="P3",
            description="food costs down 25%",
            interventions=(Intervention(node="CFood", kind="scale", magnitude=0.75),),
        ),
        Policy(
            name="P4",
            description="food costs down 15%, household income up 15%",
            interventions=(
                Intervention(node="CFood", kind="scale", magnitude=0.85),
                Intervention(node="HIncome", kind="scale", magnitude=1.15),
            ),
        ),
        Policy(
            name="P5",
            description="food production output down 25%",
            interventions=(Intervention(node="FProduction", kind="scale", magnitude=0.75),),
        ),
    ]


@dataclass
class PolicyResult:
    name: str
    expected_utility: float
    mc_se: float
    samples: np.ndarray


@dataclass
class EvaluationReport:
    results: dict[str, PolicyResult]
    ranking: list[str]  # ascending expected utility (lower = better)
    seed: int
    n_samples: int

    def result(self, name: str) -> PolicyResult:
        if name not in self.results:
            raise UnknownPolicy(f"no policy named {name!r} in report")
        return self.results[name]


def evaluate_policies(
    fitted: FittedNetwork,
    policies: list[Policy],
    params: UtilityParams,
    n_samples: int = DEFAULT_N_SAMPLES,
    seed: int = 0,
) -> EvaluationReport:
    """Score each policy by Monte Carlo expected utility under a shared seed."""
    if not policies:
        raise InvalidInput("no policies to evaluate")
    if n_samples < 100:
        raise InvalidInput(f"n_samples must be >= 100 (got {n_samples})")
    names = [p.name for p in policies]
    if len(set(names)) != len(names):
        raise InvalidInput("duplicate policy names")
    results: dict[str, PolicyResult] = {}
    for policy in policies:
        try:
            reps = simulate_replicates(fitted, policy, n_samples, seed)
            score = expected_utility(reps, params)
        except Exception as err:
            raise type(err)(f"policy {policy.name!r}: {err}") from err
        results[policy.name] = PolicyResult(
            name=policy.name,
            expected_utility=score.mean,
            mc_se=score.mc_se,
            samples=score.samples,
        )
    ranking = sorted(results, key=lambda name: (results[name].expected_utility, name))
    return EvaluationReport(results=results, ranking=ranking, seed=seed, n_samples=n_samples)


@dataclass
class DeltaRow:
    policy: str
    delta_eu: float
    paired_se: float


def compare(report: EvaluationReport, baseline_name: str) -> list[DeltaRow]:
    """Expected-utility deltas vs a baseline with paired standard errors.

    Pairing relies on common random numbers: replicate r of every policy
    shares the same underlying draws, so the difference series is far less
    noisy than the two levels.
    """
    base = report.result(baseline_name)
    rows = []
    for name in sorted(report.results):
        res = report.results[name]
        diff = res.samples - base.samples
        n = diff.size
        se = float(diff.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        rows.append(DeltaRow(policy=name, delta_eu=float(diff.mean()), paired_se=se))
    return rows
