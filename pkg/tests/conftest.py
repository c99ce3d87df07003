"""Shared fixtures for the test suite."""

import pytest

from dlcz_swap.params import experiment_defaults, with_overrides


@pytest.fixture(scope="session")
def defaults():
    return experiment_defaults()


@pytest.fixture(scope="session")
def boosted(defaults):
    # High pair rate / high detection so Monte Carlo conditionals get real
    # statistics in a few hundred thousand trials.  Not a physical operating
    # point, just a stress configuration.
    return with_overrides(defaults, chi=0.1, eta=0.8)
