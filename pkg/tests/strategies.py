"""Hypothesis strategies and plain generators shared by the test modules."""
import numpy as np
from hypothesis import strategies as st

from tdsp.plf import PLF


@st.composite
def fifo_plfs(draw, max_points=7, max_cost=2000.0):
    k = draw(st.integers(1, max_points))
    times = draw(st.lists(st.integers(0, 86400), min_size=k, max_size=k, unique=True))
    times = sorted(float(t) for t in times)
    costs = [draw(st.floats(0, max_cost, allow_nan=False))]
    for a, b in zip(times, times[1:]):
        floor = max(0.0, costs[-1] - 0.95 * (b - a))
        costs.append(draw(st.floats(floor, floor + max_cost, allow_nan=False)))
    return PLF(times, costs)


def random_plf(rng: np.random.Generator, k: int, max_cost: float = 1500.0) -> PLF:
    times = np.sort(rng.choice(86401, size=k, replace=False)).astype(float)
    costs = [rng.uniform(0, max_cost)]
    for a, b in zip(times, times[1:]):
        floor = max(0.0, costs[-1] - 0.95 * (b - a))
        costs.append(rng.uniform(floor, floor + max_cost))
    return PLF(times, costs)
