"""Shared fixtures and hypothesis profiles."""

import os

import pytest
from hypothesis import HealthCheck, settings

from src.chain import random_chain
from src.graph import build_complete, build_line, build_star

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("fast", max_examples=5, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def star4():
    return build_star(4)


@pytest.fixture
def line4():
    return build_line(4)


@pytest.fixture
def complete4():
    return build_complete(4)


@pytest.fixture
def random_chains():
    """Fifty seeded chains spread over star, line and complete graphs, n = 3..5."""
    graphs = [build(n) for build in (build_star, build_line, build_complete) for n in (3, 4, 5)]
    return [random_chain(graphs[s % len(graphs)], s) for s in range(50)]
