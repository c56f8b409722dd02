import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from constructions import clear_catalog_overrides  # noqa: E402
from utils.config import use_config  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: heavy acceptance checks (deselect with -m "not slow")')


@pytest.fixture(autouse=True)
def _pristine_catalog():
    clear_catalog_overrides()
    yield
    clear_catalog_overrides()
    use_config(None)
