"""Bundled fixture files: the default network document and synthetic data."""

from pathlib import Path

_HERE = Path(__file__).resolve().parent


def bundled_network_path() -> Path:
    return _HERE / "uk_food_network.json"


def bundled_data_path() -> Path:
    return _HERE / "synthetic_uk_food.csv"
