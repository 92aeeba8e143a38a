import numpy as np
import pytest

from anosov_lab import MarcusChart, make_psl2, make_suspension


@pytest.fixture
def cat():
    return make_suspension(2, 1, 1, 1, roof=1.0)


@pytest.fixture
def psl2():
    return make_psl2()


@pytest.fixture(params=["suspension", "psl2"])
def model(request):
    if request.param == "suspension":
        return make_suspension(2, 1, 1, 1, roof=1.0)
    return make_psl2()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def half_speed(cat):
    """Chart of ``g_t = f_{0.5 t}``."""
    return MarcusChart(cat, 0.5)
