"""Shared fixtures; expensive solves are cached once per session."""

from dataclasses import replace

import pytest

from tbctrl import get_scenario, make_time_grid, solve_fbs


class SolveStore:
    """Session cache so acceptance criteria and unit tests share solves."""

    def __init__(self):
        self._store = {}

    def get(self, key, config):
        if key not in self._store:
            self._store[key] = solve_fbs(config)
        return self._store[key]

    def put(self, key, solution):
        self._store[key] = solution

    def __contains__(self, key):
        return key in self._store


@pytest.fixture(scope="session")
def solve_cached():
    return SolveStore()


@pytest.fixture(scope="session")
def flagship():
    return get_scenario("fig1")


@pytest.fixture(scope="session")
def shrink():
    """Return a copy of a scenario on a coarser grid (for fast unit tests)."""

    def _shrink(config, n_steps, **fbs_overrides):
        out = replace(config, grid=make_time_grid(config.grid.t0, config.grid.tf, n_steps))
        if fbs_overrides:
            out = replace(out, fbs=replace(out.fbs, **fbs_overrides))
        return out

    return _shrink
