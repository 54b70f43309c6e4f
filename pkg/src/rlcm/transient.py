"""Time-domain simulation of the RLCM circuits.

Linear runs use the exact zero-order-hold propagator (or RK4 as a
cross-check). The nonlinear run keeps the memristor state ``w`` live and
integrates ``[V_C, I_L, w, q]`` with RK4.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .circuits import Topology
from .errors import DomainError, IntegrationError, ValidationError
from .linalg import _expm, as_matrix
from .memristor import ESCAPE_TOL, SineDrive, _memristance, _window
from .response import ResponseMetrics, Waveform, metrics

__all__ = [
    "Method",
    "NonlinearRun",
    "ResponseMetrics",
    "SimConfig",
    "Waveform",
    "discretize_zoh",
    "forced_response",
    "impulse_response",
    "metrics",
    "simulate_rlcm_nonlinear",
    "step_response",
]


class Method(enum.Enum):
    ZOH = "zoh-exact"
    RK4 = "rk4"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        s = str(value).lower()
        if s in ("zoh", "zoh-exact", "zoh_exact"):
            return cls.ZOH
        if s == "rk4":
            return cls.RK4
        raise ValidationError("method", f"expected 'zoh-exact' or 'rk4', got {value!r}")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    method: Method = Method.ZOH

    def __post_init__(self):
        dt, t_end = float(self.dt), float(self.t_end)
        if not (math.isfinite(dt) and dt > 0):
            raise ValidationError("dt", f"must be finite and > 0, got {self.dt!r}")
        if not (math.isfinite(t_end) and t_end > dt):
            raise ValidationError("t_end", f"must be finite and > dt, got {self.t_end!r}")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "t_end", t_end)
        object.__setattr__(self, "method", Method.parse(self.method))

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))


def discretize_zoh(ss, dt):
    """Exact discretization for piecewise-constant input.

    Returns ``(Ad, Bd)`` with ``Ad = exp(A dt)`` and
    ``Bd = integral_0^dt exp(A s) ds B``.
    """
    dt = float(dt)
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError(f"dt must be finite and > 0, got {dt!r}")
    a = as_matrix(ss.a, name="A")
    b = as_matrix(ss.b, name="B")
    n = a.shape[0]
    ad = _expm(a * dt)
    if np.linalg.cond(a) < 1e8:
        bd = np.linalg.solve(a, (ad - np.eye(n)) @ b)
    else:
        # exp([[A, B], [0, 0]] dt) = [[Ad, Bd], [0, I]]
        aug = np.zeros((n + 1, n + 1))
        aug[:n, :n] = a
        aug[:n, n:] = b
        bd = _expm(aug * dt)[:n, n:]
    return ad, bd


@jit
def _zoh_run(ad, bd, x0, u):
    n = x0.shape[0]
    nsteps = u.shape[0]
    xs = np.empty((nsteps + 1, n))
    x = x0.copy()
    xn = np.empty(n)
    xs[0] = x
    for k in range(nsteps):
        for i in range(n):
            s = bd[i, 0] * u[k]
            for j in range(n):
                s += ad[i, j] * x[j]
            xn[i] = s
        x[:] = xn
        xs[k + 1] = x
    return xs


@jit
def _lti_deriv(a, b, x, u, out):
    n = x.shape[0]
    for i in range(n):
        s = b[i, 0] * u
        for j in range(n):
            s += a[i, j] * x[j]
        out[i] = s


@jit
def _rk4_run(a, b, x0, u, dt):
    # u is held constant over each step
    n = x0.shape[0]
    nsteps = u.shape[0]
    xs = np.empty((nsteps + 1, n))
    x = x0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    xs[0] = x
    for k in range(nsteps):
        _lti_deriv(a, b, x, u[k], k1)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * dt * k1[i]
        _lti_deriv(a, b, tmp, u[k], k2)
        for i in range(n):
            tmp[i] = x[i] + 0.5 * dt * k2[i]
        _lti_deriv(a, b, tmp, u[k], k3)
        for i in range(n):
            tmp[i] = x[i] + dt * k3[i]
        _lti_deriv(a, b, tmp, u[k], k4)
        for i in range(n):
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        xs[k + 1] = x
    return xs


def _states(ss, x0, u, cfg):
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    if cfg.method is Method.ZOH:
        ad, bd = discretize_zoh(ss, cfg.dt)
        return _zoh_run(np.ascontiguousarray(ad), np.ascontiguousarray(bd), x0, u)
    return _rk4_run(
        np.ascontiguousarray(ss.a, dtype=np.float64),
        np.ascontiguousarray(ss.b, dtype=np.float64),
        x0, u, cfg.dt,
    )


def forced_response(ss, u, x0=None, output_scale=1.0, cfg=None):
    """Output for input samples ``u[k]`` held over ``[k dt, (k+1) dt)``.

    ``u`` has one entry per step (``cfg.n_steps`` of them); a scalar means a
    constant input. The returned waveform has ``n_steps + 1`` samples; the
    feedthrough term uses the held input, and the last held value at the
    final sample.
    """
    cfg = cfg or SimConfig()
    n = ss.n_states
    nsteps = cfg.n_steps
    u = np.broadcast_to(np.asarray(u, dtype=float), (nsteps,)).copy()
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    xs = _states(ss, x0, u, cfg)
    u_out = np.append(u, u[-1])
    y = output_scale * (xs @ ss.c_out[0] + ss.d * u_out)
    return Waveform(0.0, cfg.dt, y)


def step_response(ss, output_scale=1.0, cfg=None):
    """Unit-step response from rest."""
    return forced_response(ss, 1.0, None, output_scale, cfg)


def impulse_response(ss, output_scale=1.0, cfg=None):
    """Unit-impulse response, realized as the free response from ``x(0) = B``.

    The direct-feedthrough delta (``D``) is not representable on a grid and is
    left out.
    """
    cfg = cfg or SimConfig()
    xs = _states(ss, ss.b[:, 0], np.zeros(cfg.n_steps), cfg)
    return Waveform(0.0, cfg.dt, output_scale * (xs @ ss.c_out[0]))


_SERIES, _PARALLEL = 0, 1
_DRIVE_STEP, _DRIVE_SINE = 0, 1


@jit
def _rlcm_deriv(topo, r, l, c, r_on, r_off, d, gain, kind, p, u, x, out):
    v_c, i_l, w = x[0], x[1], x[2]
    r_m = _memristance(r_on, r_off, d, w)
    if topo == 0:
        i_m = i_l
        out[0] = i_l / c
        out[1] = (u - r * i_l - v_c - r_m * i_l) / l
    else:
        i_m = v_c / r_m
        out[0] = (u - v_c / r - i_l - i_m) / c
        out[1] = v_c / l
    out[2] = gain * i_m * _window(w / d, kind, p)
    out[3] = i_m


@jit
def _drive(drive_kind, amp, omega, phase, t):
    if drive_kind == 0:
        return amp
    return amp * math.sin(omega * t + phase)


@jit
def _rlcm_kernel(topo, r, l, c, r_on, r_off, d, gain, kind, p,
                 drive_kind, amp, omega, phase, x0, dt, nsteps):
    xs = np.empty((nsteps + 1, 4))
    x = x0.copy()
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    tmp = np.empty(4)
    xs[0] = x
    for k in range(nsteps):
        t = k * dt
        u1 = _drive(drive_kind, amp, omega, phase, t)
        u2 = _drive(drive_kind, amp, omega, phase, t + 0.5 * dt)
        u4 = _drive(drive_kind, amp, omega, phase, t + dt)
        _rlcm_deriv(topo, r, l, c, r_on, r_off, d, gain, kind, p, u1, x, k1)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * dt * k1[i]
        _rlcm_deriv(topo, r, l, c, r_on, r_off, d, gain, kind, p, u2, tmp, k2)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * dt * k2[i]
        _rlcm_deriv(topo, r, l, c, r_on, r_off, d, gain, kind, p, u2, tmp, k3)
        for i in range(4):
            tmp[i] = x[i] + dt * k3[i]
        _rlcm_deriv(topo, r, l, c, r_on, r_off, d, gain, kind, p, u4, tmp, k4)
        for i in range(4):
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        for i in range(4):
            if not math.isfinite(x[i]):
                xs[k + 1] = x
                return xs, k + 1
        if x[2] < 0.0 or x[2] > d:
            if kind != 0 and (x[2] < -ESCAPE_TOL * d or x[2] > d + ESCAPE_TOL * d):
                xs[k + 1] = x
                return xs, k + 1
            x[2] = min(max(x[2], 0.0), d)
        xs[k + 1] = x
    return xs, 0


@dataclass(frozen=True)
class NonlinearRun:
    """Trajectory of the memristor-in-circuit simulation.

    ``i_m`` is the memristor current and ``q`` its RK4-integrated charge.
    """

    t: np.ndarray
    v_c: np.ndarray
    i_l: np.ndarray
    w: np.ndarray
    r_m: np.ndarray
    q: np.ndarray
    i_m: np.ndarray

    def table(self):
        """Columns t, V_C, I_L, w, R_M."""
        return np.column_stack([self.t, self.v_c, self.i_l, self.w, self.r_m])


def simulate_rlcm_nonlinear(params, drift, topology, drive=None, w0=None, cfg=None, x0=None):
    """RLCM circuit with a live linear-drift memristor in place of ``r_m``.

    Parameters
    ----------
    params : CircuitParams
        ``r``, ``l`` and ``c_cap`` are used; ``params.r_m`` is ignored because
        the memristance follows ``w``.
    drift : DriftParams
    topology : Topology or str
    drive : SineDrive, float or None
        Source voltage (series) or current (parallel). A number is a step of
        that height switched on at t = 0; ``None`` is a unit step.
    w0 : float, optional
        Initial doped width; defaults to ``d_width / 2``.
    cfg : SimConfig, optional
        Must use the RK4 method.
    x0 : (V_C, I_L), optional
        Initial circuit state, zero by default.
    """
    topology = Topology.parse(topology)
    cfg = cfg or SimConfig(method=Method.RK4)
    if cfg.method is not Method.RK4:
        raise ValidationError("method", "the nonlinear simulation needs method='rk4'")
    w0 = 0.5 * drift.d_width if w0 is None else float(w0)
    if not 0.0 <= w0 <= drift.d_width:
        raise ValidationError("w0", f"must lie in [0, {drift.d_width}]")
    if drive is None:
        drive = 1.0
    if isinstance(drive, SineDrive):
        dk, amp, omega, phase = _DRIVE_SINE, drive.amplitude, drive.omega, drive.phase
    else:
        dk, amp, omega, phase = _DRIVE_STEP, float(drive), 0.0, 0.0
    state0 = np.zeros(4)
    if x0 is not None:
        state0[:2] = np.asarray(x0, dtype=float).reshape(2)
    state0[2] = w0
    topo = _SERIES if topology is Topology.SERIES else _PARALLEL
    xs, status = _rlcm_kernel(
        topo, params.r, params.l, params.c_cap,
        drift.r_on, drift.r_off, drift.d_width, drift.drift_gain,
        int(drift.window_kind), drift.p_window,
        dk, float(amp), float(omega), float(phase),
        state0, cfg.dt, cfg.n_steps,
    )
    if status:
        raise IntegrationError(
            f"nonlinear RLCM integration failed at step {status} "
            "(non-finite state or w outside [0, D]); reduce dt",
            t=status * cfg.dt,
            state=xs[status].copy(),
        )
    t = cfg.dt * np.arange(xs.shape[0])
    w = xs[:, 2]
    r_m = drift.r_on * (w / drift.d_width) + drift.r_off * (1.0 - w / drift.d_width)
    i_m = xs[:, 1] if topology is Topology.SERIES else xs[:, 0] / r_m
    return NonlinearRun(t=t, v_c=xs[:, 0], i_l=xs[:, 1], w=w, r_m=r_m, q=xs[:, 3], i_m=i_m)

