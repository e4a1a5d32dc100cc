import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mixpension.fund_model import FundParams, max_discretization_shift, simulate_paths_with_max  # noqa: E402
from mixpension.numerics import RngStream  # noqa: E402

STANDARD = FundParams(0.04, 0.2)
DIVERSIFIED = FundParams(0.04, 0.1)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@dataclass(frozen=True)
class PathBundle:
    params: FundParams
    t: float
    steps: int
    terminal: np.ndarray
    running: np.ndarray

    @property
    def shift(self) -> float:
        """Expected undershoot of the grid maximum."""
        return max_discretization_shift(self.params, self.t, self.steps)

    @property
    def n(self) -> int:
        return self.terminal.size


@pytest.fixture(scope="session")
def mc_paths() -> PathBundle:
    """10^6 Euler paths with 1000 steps over one year, standard fund."""
    terminal, running = simulate_paths_with_max(STANDARD, 1.0, 1000, 1_000_000, RngStream(20240601, 0))
    return PathBundle(STANDARD, 1.0, 1000, terminal, running)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES
