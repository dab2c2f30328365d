import sys
from pathlib import Path

import pytest
from hypothesis import settings

from mbsync.model import parse_cfm, parse_trace

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
sys.path.insert(0, str(Path(__file__).resolve().parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def load(name):
    return parse_cfm((DATA / f"{name}.cfm").read_text(), source=f"{name}.cfm")


def trace(name):
    return parse_trace((DATA / "traces" / f"{name}.trace").read_text())


def seq(text):
    """Space-separated actions."""
    return parse_trace("\n".join(text.split()))


@pytest.fixture
def data_dir():
    return DATA
