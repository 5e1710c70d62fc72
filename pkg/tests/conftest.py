import numpy as np
import pytest

import nk6


@pytest.fixture(scope="session")
def table():
    return nk6.default_table()


@pytest.fixture(scope="session")
def dvv(table):
    return nk6.dvv_immersion(table)


@pytest.fixture(scope="session")
def geodesic(table):
    return nk6.totally_geodesic_immersion(table)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


def random_chart_points(imm, n, seed=0, margin=0.05):
    return imm.chart.random_points(n, np.random.default_rng(seed), margin=margin)
