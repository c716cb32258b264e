import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from edgepose.db import configure_engine  # noqa: E402
from edgepose.db.session import init_db  # noqa: E402
from edgepose.sim import Scenario  # noqa: E402

SCENARIO_DIR = ROOT / "configs" / "scenario"


@pytest.fixture()
def temp_db(tmp_path):
    db_path = tmp_path / "test.db"
    configure_engine(db_path)
    init_db()
    yield db_path


@pytest.fixture()
def scenario():
    return Scenario.default()


@pytest.fixture()
def pair_scenario():
    return Scenario.default(n_devices=2)


@pytest.fixture()
def scenario_dir():
    return SCENARIO_DIR
