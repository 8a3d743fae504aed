from __future__ import annotations

from functools import lru_cache

import pytest

from guderley.fields import GlobalSolution, solve_global

# (gamma, m) pairs exercised across the suite; solves are shared per session
CASES = [(1.4, 2), (1.5, 1), (2.0, 2), (3.0, 1)]


@lru_cache(maxsize=None)
def cached_solution(gamma: float, m: int) -> GlobalSolution:
    return solve_global(gamma, m)


@pytest.fixture(scope="session")
def sol14() -> GlobalSolution:
    return cached_solution(1.4, 2)


@pytest.fixture(scope="session", params=CASES, ids=lambda c: f"g{c[0]:g}-m{c[1]}")
def any_solution(request) -> GlobalSolution:
    return cached_solution(*request.param)
