from __future__ import annotations

import pytest

from singrobin.models import BoundaryParams
from singrobin.radial import RadialPotential


@pytest.fixture
def zero_q() -> RadialPotential:
    return RadialPotential.zero()


@pytest.fixture
def unit_params() -> BoundaryParams:
    return BoundaryParams(b=1.0, beta=0.0)


@pytest.fixture
def half_params() -> BoundaryParams:
    return BoundaryParams(b=0.5, beta=0.0)


@pytest.fixture
def write_file(tmp_path):
    def _write(name: str, text: str):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
