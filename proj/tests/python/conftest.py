import os
import pathlib

import pytest


@pytest.fixture(scope="session")
def fixtures() -> pathlib.Path:
    env = os.environ.get("ZJSC_FIXTURES_DIR")
    if env:
        return pathlib.Path(env)
    return pathlib.Path(__file__).resolve().parents[2] / "fixtures"
