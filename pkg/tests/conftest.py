import numpy as np
import pytest

from rlcm import PRESETS


@pytest.fixture
def rng():
    return np.random.default_rng(20160215)


@pytest.fixture(params=sorted(PRESETS))
def any_preset(request):
    return PRESETS[request.param]


def rk4_matrix_flow(a, t, steps):
    """exp(a t) by integrating X' = a X from I with classical RK4."""
    a = np.asarray(a, dtype=float)
    h = t / steps
    x = np.eye(a.shape[0])
    for _ in range(steps):
        k1 = a @ x
        k2 = a @ (x + 0.5 * h * k1)
        k3 = a @ (x + 0.5 * h * k2)
        k4 = a @ (x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x
