"""Shared fixtures.

Grids are session-scoped: construction is cheap but not free, and every
module wants the same couple of sizes.  Anything heavier (assembled
operators, probe sweeps) lives in the module that needs it.
"""

import pytest

import potrecon as pr


@pytest.fixture(scope="session")
def grid60():
    return pr.build_grid(60, 1.0, 0.7)


@pytest.fixture(scope="session")
def boundary60(grid60):
    return pr.boundary_nodes(grid60, 128)


@pytest.fixture(scope="session")
def grid100():
    return pr.build_grid(100, 1.0, 0.7)


@pytest.fixture(scope="session")
def boundary100(grid100):
    return pr.boundary_nodes(grid100, 256)


@pytest.fixture(scope="session")
def plan_default():
    return pr.build_sampling()
