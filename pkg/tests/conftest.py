import warnings
from functools import lru_cache

import pytest

from sinkflow.errors import RegimeWarning
from sinkflow.nekrasov import FlowParams
from sinkflow.solver import SolverConfig, solve
from sinkflow.surface import reconstruct_surface


@lru_cache(maxsize=None)
def solved(alpha: float, nodes: int = 2048):
    """Solve once per (alpha, nodes) and share across test modules."""
    params = FlowParams(alpha)
    config = SolverConfig(nodes=nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        zeta, report = solve(params, config)
    return params, config, zeta, report, reconstruct_surface(zeta, params, config.modes)


@pytest.fixture(scope="session")
def alpha3():
    return solved(3.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
