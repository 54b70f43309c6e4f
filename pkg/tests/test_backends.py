import json
import os
import subprocess
import sys

import numpy as np
import pytest

from rlcm import PRESETS, _accel, linalg, memristor, transient
from rlcm.circuits import CircuitParams
from rlcm.memristor import DriftParams, SineDrive
from rlcm.response import metrics
from rlcm.transient import SimConfig

needs_jit = pytest.mark.skipif(not _accel.JIT_ENABLED, reason="numba backend disabled")


def test_backend_name_matches_flag():
    assert _accel.backend_name() == ("numba" if _accel.JIT_ENABLED else "numpy")


@needs_jit
def test_hqr_kernel_matches_python(rng):
    for n in range(1, 9):
        a = rng.standard_normal((n, n))
        h = linalg._hessenberg(a.copy())
        assert np.allclose(h, linalg._hessenberg.py_func(a.copy()), rtol=0, atol=1e-13)
        got = linalg._hqr(h.copy(), 1e-12, 100 * n)
        ref = linalg._hqr.py_func(h.copy(), 1e-12, 100 * n)
        assert np.allclose(np.sort_complex(got[0] + 1j * got[1]), np.sort_complex(ref[0] + 1j * ref[1]),
                           rtol=0, atol=1e-12)


@needs_jit
def test_lti_kernels_match_python(rng):
    ss = PRESETS["paper-series"].state_space()
    a = np.ascontiguousarray(ss.a)
    b = np.ascontiguousarray(ss.b)
    u = rng.standard_normal(500)
    x0 = np.array([0.3, -0.2])
    assert np.allclose(transient._rk4_run(a, b, x0, u, 1e-2), transient._rk4_run.py_func(a, b, x0, u, 1e-2),
                       rtol=1e-13, atol=1e-15)
    ad, bd = transient.discretize_zoh(ss, 1e-2)
    assert np.allclose(transient._zoh_run(ad, bd, x0, u), transient._zoh_run.py_func(ad, bd, x0, u),
                       rtol=1e-13, atol=1e-15)


@needs_jit
def test_memristor_kernels_match_python():
    dp = DriftParams()
    args = (dp.r_on, dp.r_off, dp.d_width, dp.drift_gain, 1, 1, 1e-4, 2 * np.pi, 0.0, 1e-9, 1e-3, 2000)
    t1, s1 = memristor._hysteresis_kernel(*args)
    t2, s2 = memristor._hysteresis_kernel.py_func(*args)
    assert s1 == s2 == 0
    assert np.allclose(t1, t2, rtol=1e-12, atol=0)

    p = CircuitParams(1, 1, 1, 1)
    state0 = np.array([0.0, 0.0, 0.5 * dp.d_width, 0.0])
    kargs = (1, p.r, p.l, p.c_cap, dp.r_on, dp.r_off, dp.d_width, dp.drift_gain, 1, 1,
             1, 0.1, 2.0, 0.0)
    x1, s1 = transient._rlcm_kernel(*kargs, state0.copy(), 1e-3, 3000)
    x2, s2 = transient._rlcm_kernel.py_func(*kargs, state0.copy(), 1e-3, 3000)
    assert s1 == s2 == 0
    assert np.allclose(x1, x2, rtol=1e-12, atol=1e-18)


SCRIPT = """
import json
from rlcm import PRESETS, _accel
from rlcm.memristor import DriftParams, SineDrive, run_hysteresis
from rlcm.response import metrics
from rlcm.transient import SimConfig, step_response
p = PRESETS["paper-series"]
w = step_response(p.state_space(), p.output_scale, SimConfig(t_end=2.0))
run = run_hysteresis(DriftParams(), SineDrive(1e-4, 6.283185307179586), 1e-9, 200, 1)
print(json.dumps({"backend": _accel.backend_name(), "m": metrics(w).as_dict(), "area": run.loop_area()}))
"""


def test_numpy_fallback_gives_same_numbers():
    env = dict(os.environ, RLCM_DISABLE_JIT="1")
    proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    res = json.loads(proc.stdout)
    assert res["backend"] == "numpy"

    from rlcm.memristor import run_hysteresis
    from rlcm.transient import step_response
    p = PRESETS["paper-series"]
    m = metrics(step_response(p.state_space(), p.output_scale, SimConfig(t_end=2.0))).as_dict()
    area = run_hysteresis(DriftParams(), SineDrive(1e-4, 6.283185307179586), 1e-9, 200, 1).loop_area()
    for key, value in m.items():
        assert res["m"][key] == pytest.approx(value, rel=1e-12, abs=1e-15), key
    assert res["area"] == pytest.approx(area, rel=1e-12)
