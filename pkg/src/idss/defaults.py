"""Bundled UK food-security configuration and its synthetic fixture.

The default network has 17 nodes: the two utility attributes (Health,
Education, both log scale), fourteen system variables, and Frost as a
childless root. CRecreation and CTransport are catalogued but enter no
equation. Panels G1..G9 own the system variables; the attribute nodes
belong to the decision centre's panel G0.

The bundled CSV is synthetic: it is generated from a linear-Gaussian
version of this network with coefficient signs chosen so the fitted model
shows a negative household-income effect and a positive food-cost effect
on both attributes, and so the five stock policies rank P3 < P5 < P4 < P1
< P2 with comfortable gaps.
"""

from __future__ import annotations

import numpy as np

from .catalog import TimeSeriesTable, VariableDef
from .dlm import NodeModel
from .network import NetworkSpec
from .panels import Panel

DEFAULT_WINDOW = (2008, 2018)

LOG_SCALE_NODES = ("Health", "Education", "PartTime")

SYNTHETIC_SEED = 20080101


def uk_catalog() -> list[VariableDef]:
    """All catalogued yearly variables, including the two attribute proxies."""
    return [
        VariableDef(
            "Health",
            "Finished hospital admission episodes with a primary or secondary "
            "malnutrition diagnosis",
            units="episodes/year",
            transform="log",
            source_hint="hospital episode statistics",
        ),
        VariableDef(
            "Education",
            "Percentage of pupils at the end of key stage 4 classified as disadvantaged",
            units="percent",
            transform="log",
            source_hint="department for education",
        ),
        VariableDef(
            "HIncome",
            "Real net households adjusted disposable income per capita less final "
            "consumption expenditure per head",
            units="GBP/head (real)",
            source_hint="national accounts",
        ),
        VariableDef(
            "CFood",
            "CPI index over 9 food groups (cereals, meat, fish, eggs, milk, oils and "
            "fat, fruits, vegetables, beverages), 2015=100",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "Lending",
            "Net lending/borrowing by households and NPISH as a percentage of GDP",
            units="% of GDP",
            source_hint="sector accounts",
        ),
        VariableDef(
            "Tax",
            "Tax on income or profits of corporations",
            units="% of GDP",
            source_hint="public finances",
        ),
        VariableDef(
            "Unemployment",
            "Male unemployment rate, aged 16 and over, seasonally adjusted",
            units="percent",
            source_hint="labour market statistics",
        ),
        VariableDef(
            "Benefits",
            "Social assistance benefits in cash as a percentage of GDP",
            units="% of GDP",
            source_hint="public finances",
        ),
        VariableDef(
            "CLiving",
            "Consumer price index over the main household expenditure groups "
            "(housing incl. energy, food, recreation, transport)",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "CHousing",
            "CPI of housing, water and fuels",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "CRecreation",
            "CPI of recreation (component of CLiving; no equation in the default network)",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "CTransport",
            "CPI of transport (component of CLiving; no equation in the default network)",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "FProduction",
            "Output of food products",
            units="index",
            source_hint="producer statistics",
        ),
        VariableDef(
            "FImports",
            "Food imports from EU countries plus imports from other countries",
            units="index",
            source_hint="trade statistics",
        ),
        VariableDef(
            "COil",
            "CPI of liquid fuels, vehicle fuels and lubricants, 2015=100",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "CEnergy",
            "CPI of energy, 2015=100",
            units="index",
            source_hint="consumer price statistics",
        ),
        VariableDef(
            "PartTime",
            "Part-time workers (ill or disabled)",
            units="thousands",
            transform="log",
            source_hint="labour market statistics",
        ),
        VariableDef(
            "Frost",
            "Number of days of air frost",
            units="days/year",
            source_hint="meteorological records",
        ),
        VariableDef(
            "GDP",
            "Gross domestic product at market prices, seasonally adjusted",
            units="index",
            source_hint="national accounts",
        ),
    ]


# parent -> child, in each child's regressor order
DEFAULT_EDGES: list[tuple[str, str]] = [
    ("HIncome", "Health"),
    ("CFood", "Health"),
    ("HIncome", "Education"),
    ("CFood", "Education"),
    ("Lending", "HIncome"),
    ("Tax", "HIncome"),
    ("Benefits", "HIncome"),
    ("CLiving", "HIncome"),
    ("FProduction", "CFood"),
    ("FImports", "CFood"),
    ("CEnergy", "CFood"),
    ("Unemployment", "Lending"),
    ("Unemployment", "Tax"),
    ("Unemployment", "Benefits"),
    ("PartTime", "Unemployment"),
    ("GDP", "Unemployment"),
    ("CFood", "CLiving"),
    ("CHousing", "CLiving"),
    ("CEnergy", "CHousing"),
    ("GDP", "FProduction"),
    ("FImports", "FProduction"),
    ("GDP", "FImports"),
    ("GDP", "COil"),
    ("COil", "CEnergy"),
]

DEFAULT_PANELS: list[dict] = [
    {
        "id": "G0",
        "label": "decision centre: food security attributes",
        "nodes": ["Health", "Education"],
        "inputs": ["HIncome", "CFood"],
    },
    {"id": "G1", "label": "household income", "nodes": ["HIncome"],
     "inputs": ["Lending", "Tax", "Benefits", "CLiving"]},
    {"id": "G2", "label": "cost of food", "nodes": ["CFood"],
     "inputs": ["FProduction", "FImports", "CEnergy"]},
    {"id": "G3", "label": "income: credit, tax, benefits, employment",
     "nodes": ["Lending", "Tax", "Benefits", "Unemployment"],
     "inputs": ["PartTime", "GDP"]},
    {"id": "G4", "label": "cost of living", "nodes": ["CLiving", "CHousing"],
     "inputs": ["CFood", "CEnergy"]},
    {"id": "G5", "label": "food supply", "nodes": ["FProduction", "FImports"],
     "inputs": ["GDP"]},
    {"id": "G6", "label": "oil and energy costs", "nodes": ["COil", "CEnergy"],
     "inputs": ["GDP"]},
    {"id": "G7", "label": "demography", "nodes": ["PartTime"], "inputs": []},
    {"id": "G8", "label": "weather", "nodes": ["Frost"], "inputs": []},
    {"id": "G9", "label": "economy", "nodes": ["GDP"], "inputs": []},
]

DEFAULT_ATTESTATIONS = {
    "delegable": True,
    "separately_informed": True,
    "transparent": True,
    "provenance": "structure agreed from literature review and domain expertise",
}


def default_node_order() -> list[str]:
    order = ["Health", "Education", "HIncome", "CFood", "Lending", "Tax", "Benefits",
             "Unemployment", "CLiving", "CHousing", "FProduction", "FImports",
             "COil", "CEnergy", "PartTime", "Frost", "GDP"]
    return order


def default_network(
    state_discount: float = 0.98,
    variance_discount: float = 0.95,
    prior_cov_scale: float = 10.0,
) -> NetworkSpec:
    """The runnable 17-node food-security network with default model settings."""
    nodes = default_node_order()
    parents: dict[str, list[str]] = {n: [] for n in nodes}
    for parent, child in DEFAULT_EDGES:
        parents[child].append(parent)
    models = {
        n: NodeModel(
            node=n,
            parents=tuple(parents[n]),
            state_discount=state_discount,
            variance_discount=variance_discount,
            prior_cov=prior_cov_scale,
        )
        for n in nodes
    }
    panel_of = {}
    for panel in DEFAULT_PANELS:
        for n in panel["nodes"]:
            panel_of[n] = panel["id"]
    return NetworkSpec(
        nodes=nodes,
        edges=list(DEFAULT_EDGES),
        node_models=models,
        panel_of=panel_of,
        log_scale=frozenset(LOG_SCALE_NODES),
    )


def default_panels() -> list[Panel]:
    return [
        Panel(
            id=p["id"],
            label=p["label"],
            nodes=frozenset(p["nodes"]),
            inputs=frozenset(p["inputs"]),
            attestations=dict(DEFAULT_ATTESTATIONS),
        )
        for p in DEFAULT_PANELS
    ]


def synthetic_table(seed: int = SYNTHETIC_SEED) -> TimeSeriesTable:
    """Generate the bundled 2008-2018 fixture (17 columns, raw scale).

    Generating coefficients are chosen so that, relative to a 25% food-cost
    change, the direct 15% household-income lever is weak while the
    production-to-food-cost pass-through is strong (about 0.9); that is what
    puts the production policy between the two food-cost policies.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    years = list(range(DEFAULT_WINDOW[0], DEFAULT_WINDOW[1] + 1))
    t = np.arange(len(years), dtype=float)

    # roots: distinct shapes so no child sees collinear regressors
    gdp = 480.0 + 7.0 * t + rng.normal(0.0, 2.5, t.size)
    parttime = 185.0 * np.exp(0.05 * np.sin(1.1 * t + 0.4) + rng.normal(0.0, 0.02, t.size))
    frost = np.clip(45.0 + rng.normal(0.0, 7.0, t.size), 5.0, None)

    fimports = 20.0 + 0.06 * gdp + 2.5 * np.cos(1.3 * t) + rng.normal(0.0, 0.8, t.size)
    fproduction = (
        30.0 + 0.10 * gdp + 0.25 * fimports + 9.0 * np.sin(0.9 * t)
        + rng.normal(0.0, 3.0, t.size)
    )
    coil = 25.0 + 0.11 * gdp + 4.0 * np.sin(0.7 * t + 1.0) + rng.normal(0.0, 2.0, t.size)
    cenergy = 8.0 + 0.95 * coil + rng.normal(0.0, 1.5, t.size)
    cfood = (
        -4.5 + 0.95 * fproduction + 0.12 * fimports + 0.10 * cenergy
        + rng.normal(0.0, 1.0, t.size)
    )
    chousing = 20.0 + 0.80 * cenergy + rng.normal(0.0, 1.5, t.size)
    cliving = 5.0 + 0.55 * cfood + 0.45 * chousing + rng.normal(0.0, 1.0, t.size)

    unemployment = 11.6 - 0.014 * gdp + 0.02 * parttime + rng.normal(0.0, 0.15, t.size)
    lending = 1.0 + 0.35 * unemployment + rng.normal(0.0, 0.25, t.size)
    tax = 30.0 + 1.2 * unemployment + rng.normal(0.0, 0.6, t.size)
    benefits = 2.0 + 0.55 * unemployment + rng.normal(0.0, 0.15, t.size)
    hincome = (
        215.0 + 0.5 * lending - 0.5 * tax + 1.2 * benefits - 0.55 * cliving
        - 2.8 * t + rng.normal(0.0, 1.0, t.size)
    )

    log_health = (
        4.60 - 0.0035 * hincome + 0.020 * cfood + rng.normal(0.0, 0.015, t.size)
    )
    log_education = (
        1.55 - 0.0030 * hincome + 0.018 * cfood + rng.normal(0.0, 0.015, t.size)
    )

    columns = {
        "Health": np.exp(log_health),
        "Education": np.exp(log_education),
        "HIncome": hincome,
        "CFood": cfood,
        "Lending": lending,
        "Tax": tax,
        "Benefits": benefits,
        "Unemployment": unemployment,
        "CLiving": cliving,
        "CHousing": chousing,
        "FProduction": fproduction,
        "FImports": fimports,
        "COil": coil,
        "CEnergy": cenergy,
        "PartTime": parttime,
        "Frost": frost,
        "GDP": gdp,
    }
    columns = {k: np.round(v, 6) for k, v in columns.items()}
    return TimeSeriesTable(years=years, columns=columns)
