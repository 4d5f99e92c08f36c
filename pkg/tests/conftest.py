import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from idss import apply_transforms, default_params, fit_network
from idss.catalog import load_table
from idss.data import bundled_data_path, bundled_network_path
from idss.service.document import load_document


@pytest.fixture(scope="session")
def bundled():
    """Parsed bundled document plus the transformed table."""
    parsed = load_document(bundled_network_path())
    raw = load_table(bundled_data_path(), parsed.catalog)
    table = apply_transforms(raw, parsed.catalog)
    return parsed, table


@pytest.fixture(scope="session")
def fitted_default(bundled):
    parsed, table = bundled
    fitted = fit_network(parsed.spec, table)
    fitted.fingerprint = parsed.fingerprint
    return fitted


@pytest.fixture(scope="session")
def fit_dir(tmp_path_factory):
    """A persisted fit of the bundled configuration."""
    from idss.service.ops import fit_to_dir

    out = tmp_path_factory.mktemp("fit")
    fit_to_dir(bundled_network_path(), bundled_data_path(), out)
    return out
