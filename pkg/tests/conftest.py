from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from einstein_pinch.curvature.berger_frame import BergerData
from einstein_pinch.pinching.sampling import uv_to_xy
from einstein_pinch.pinching.search import SearchConfig

settings.register_profile(
    "einstein-pinch",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("einstein-pinch")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def quick_search() -> SearchConfig:
    return SearchConfig(samples=20_000, refinements=3, batch_size=5_000, seed=0, threads=1)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    import os

    for name in list(os.environ):
        if name.startswith("EINSTEIN_PINCH_"):
            monkeypatch.delenv(name, raising=False)


def random_berger_data(rng: np.random.Generator) -> BergerData:
    """A generic interior point of the feasibility polytope."""
    m, k13, k14 = np.sort(1.5 * rng.dirichlet([1.0, 1.0, 1.0]) - 1.0 / 6.0)
    u = rng.uniform(-0.95, 0.95) * (k13 - m)
    v = rng.uniform(-0.95, 0.95) * (k14 - k13)
    x, y = uv_to_xy(np.array(u), np.array(v))
    return BergerData(m=float(m), k13=float(k13), k14=float(k14), x=float(x), y=float(y))


@st.composite
def feasible_berger_data(draw: st.DrawFn) -> BergerData:
    m = draw(st.floats(min_value=-0.3, max_value=0.33))
    share = draw(st.floats(min_value=0.0, max_value=1.0))
    gap_low = share * (1.0 - 3.0 * m) / 2.0
    gap_high = 1.0 - 3.0 * m - 2.0 * gap_low
    k13 = m + gap_low
    k14 = k13 + gap_high
    u = draw(st.floats(min_value=-1.0, max_value=1.0)) * gap_low
    v = draw(st.floats(min_value=-1.0, max_value=1.0)) * gap_high
    x, y = uv_to_xy(np.array(u), np.array(v))
    return BergerData(m=m, k13=k13, k14=k14, x=float(x), y=float(y))
