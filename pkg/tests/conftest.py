import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kds import SpacetimeParams, build_gauge, horizon_structure

STANDARD_LAMBDA = 0.06
STANDARD_MASS = 1.0
SPINS = (0.0, 0.15, 0.3)


class Geo:
    """Bundle of (params, horizons, gauge) for one spin value."""

    def __init__(self, a):
        self.params = SpacetimeParams(STANDARD_LAMBDA, a, STANDARD_MASS)
        self.horizons = horizon_structure(self.params)
        self.gauge = build_gauge(self.params, self.horizons)


@pytest.fixture(scope="session")
def geo():
    """Standard parameter matrix keyed by spin."""
    return {a: Geo(a) for a in SPINS}
