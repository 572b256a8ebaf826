import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracsfe import Field, Grid

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def smooth_random_field(grid: Grid, rng: np.random.Generator, width: float | None = None, modes: int = 4) -> Field:
    """Sum of a few randomly centered Gaussians; decays well inside the box."""
    width = width if width is not None else grid.side / 12.0
    xs = grid.coords()
    vals = np.zeros(grid.shape)
    for _ in range(modes):
        c = rng.uniform(-grid.side / 10, grid.side / 10, size=grid.dim)
        amp = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        r2 = sum((x - ci) ** 2 for x, ci in zip(xs, c))
        vals = vals + amp * np.exp(-r2 / width**2)
    return Field(grid, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
