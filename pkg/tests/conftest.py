import pytest

from dvbandit import CostConfig, Instance

BASE_MEANS = (2.0, 1.5, 1.0, 0.5, 0.0)


@pytest.fixture
def base_instance() -> Instance:
    """The 5-arm benchmark instance: consecutive gaps 0.5, sigma = 10."""
    return Instance(means=BASE_MEANS, sigma=10.0)


@pytest.fixture
def base_cost() -> CostConfig:
    return CostConfig(c=1.0, delta=0.1)
