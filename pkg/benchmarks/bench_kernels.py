"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time::

    python benchmarks/bench_kernels.py            # both backends, side by side
    python benchmarks/bench_kernels.py --worker   # current backend only, JSON

The numba timings exclude compilation (one warm-up call per case).
"""

import argparse
import json
import os
import subprocess
import sys
import timeit


def cases():
    import numpy as np

    from rlcm import PRESETS
    from rlcm.circuits import CircuitParams
    from rlcm.linalg import eig_qr
    from rlcm.memristor import DriftParams, SineDrive, run_hysteresis
    from rlcm.transient import SimConfig, simulate_rlcm_nonlinear, step_response

    p = PRESETS["paper-series"]
    ss = p.state_space()
    rng = np.random.default_rng(0)
    mats = [rng.standard_normal((8, 8)) for _ in range(20)]
    drift = DriftParams()
    return {
        "zoh step, 1e4 steps": lambda: step_response(ss, 0.1, SimConfig(dt=1e-3, t_end=10.0)),
        "rk4 step, 1e5 steps": lambda: step_response(ss, 0.1, SimConfig(dt=1e-4, t_end=10.0, method="rk4")),
        "hysteresis, 2x1000 steps": lambda: run_hysteresis(drift, SineDrive(1e-4, 6.283185307179586), 1e-9, 1000, 2),
        "nonlinear rlcm, 1e4 steps": lambda: simulate_rlcm_nonlinear(
            CircuitParams(1, 1, 1, 1), drift, "parallel", 0.1, cfg=SimConfig(dt=1e-3, t_end=10.0, method="rk4")),
        "eig_qr 8x8, 20 matrices": lambda: [eig_qr(m) for m in mats],
    }


def worker(repeat):
    from rlcm import backend_name

    out = {}
    for name, fn in cases().items():
        fn()
        runs = timeit.repeat(fn, number=1, repeat=repeat)
        out[name] = min(runs)
    print(json.dumps({"backend": backend_name(), "seconds": out}))


def run_backend(disable_jit, repeat):
    env = dict(os.environ)
    env["RLCM_DISABLE_JIT"] = "1" if disable_jit else "0"
    proc = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    width = max(len(k) for k in fast["seconds"])
    print(f"{'case':<{width}}  {fast['backend']:>10}  {slow['backend']:>10}  speedup")
    for name, t_fast in fast["seconds"].items():
        t_slow = slow["seconds"][name]
        print(f"{name:<{width}}  {t_fast * 1e3:8.2f}ms  {t_slow * 1e3:8.2f}ms  {t_slow / t_fast:6.1f}x")


if __name__ == "__main__":
    main()
