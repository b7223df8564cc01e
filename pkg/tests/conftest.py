import os

import pytest

from fracvar.core.config import reset_settings
from fracvar.models import FractionalOrder, Interval

EX7_CONFIG = """\
# Example with both end-points free
alpha=0.5
lagrangian=builtin:ex7
param.g=1
param.l=1
y_a=free
y_b=free
"""

EX6_CONFIG = """\
alpha=0.5
a=0
b=1
lagrangian=builtin:ex6
"""


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    """Each test sees default settings, whatever the shell environment holds."""
    for key in list(os.environ):
        if key.startswith("FRACVAR_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(os.path.dirname(__file__))
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def unit() -> Interval:
    return Interval(a=0.0, b=1.0)


@pytest.fixture
def half() -> FractionalOrder:
    return FractionalOrder(alpha=0.5)


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "problem.cfg") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write
