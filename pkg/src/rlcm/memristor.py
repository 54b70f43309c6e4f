"""Current-controlled memristor with linear dopant drift.

The device is a doped region of width ``w`` inside a film of thickness
``d_width``; its resistance interpolates linearly between ``r_on`` (fully
doped) and ``r_off`` (undoped)::

    R_M(w) = r_on * w/D + r_off * (1 - w/D)
    dw/dt  = (mobility * r_on / D) * i(t) * f(w/D)

``f`` is either 1 or the Joglekar window ``1 - (2x - 1)**(2p)``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .errors import DomainError, IntegrationError, StateBoundError, ValidationError

__all__ = [
    "DriftParams",
    "HysteresisRun",
    "MemState",
    "SineDrive",
    "WindowKind",
    "drift_rate",
    "flux_charge_curve",
    "loop_area",
    "memductance",
    "memristance",
    "run_hysteresis",
    "window",
]

# w may overshoot the film boundary by this fraction of D before it counts
# as an integration failure (Joglekar window only)
ESCAPE_TOL = 1e-9


class WindowKind(enum.IntEnum):
    UNITY = 0
    JOGLEKAR = 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValidationError("window", f"expected 'unity' or 'joglekar', got {value!r}") from None
        return cls(int(value))


@dataclass(frozen=True)
class DriftParams:
    """Linear drift device. Defaults follow the HP TiO2 device regime."""

    r_on: float = 100.0
    r_off: float = 16e3
    d_width: float = 10e-9
    mobility: float = 1e-14
    p_window: int = 1
    window_kind: WindowKind = WindowKind.JOGLEKAR

    def __post_init__(self):
        for name in ("r_on", "r_off", "d_width", "mobility"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(name, "must be finite")
            object.__setattr__(self, name, v)
        if not 0.0 < self.r_on < self.r_off:
            raise ValidationError("r_on", f"need 0 < r_on < r_off, got {self.r_on}, {self.r_off}")
        if self.d_width <= 0.0:
            raise ValidationError("d_width", "must be > 0")
        # mobility == 0 freezes the state; useful as a linear reference
        if self.mobility < 0.0:
            raise ValidationError("mobility", "must be >= 0")
        if int(self.p_window) != self.p_window or self.p_window < 1:
            raise ValidationError("p", f"window exponent must be an integer >= 1, got {self.p_window}")
        object.__setattr__(self, "p_window", int(self.p_window))
        object.__setattr__(self, "window_kind", WindowKind.parse(self.window_kind))

    @property
    def drift_gain(self):
        """``mobility * r_on / D``, in m/s per ampere."""
        return self.mobility * self.r_on / self.d_width

    def replace(self, **changes):
        values = dict(
            r_on=self.r_on, r_off=self.r_off, d_width=self.d_width,
            mobility=self.mobility, p_window=self.p_window, window_kind=self.window_kind,
        )
        values.update(changes)
        return DriftParams(**values)


@dataclass(frozen=True)
class MemState:
    w: float
    q: float = 0.0
    phi: float = 0.0


@dataclass(frozen=True)
class SineDrive:
    """``amplitude * sin(omega * t + phase)``."""

    amplitude: float
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0.0):
            raise ValidationError("amplitude", "must be finite and >= 0")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ValidationError("omega", "must be finite and > 0")
        if not math.isfinite(self.phase):
            raise ValidationError("phase", "must be finite")

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega * t + self.phase)


def _check_w(dp, w):
    if not 0.0 <= w <= dp.d_width:
        raise StateBoundError(f"w={w!r} outside [0, {dp.d_width!r}]")


@jit
def _memristance(r_on, r_off, d, w):
    x = w / d
    return r_on * x + r_off * (1.0 - x)


@jit
def _window(x, kind, p):
    if kind == 0:
        return 1.0
    return 1.0 - (2.0 * x - 1.0) ** (2 * p)


def memristance(dp, w):
    """Resistance in ohms at doped width ``w``; always within [r_on, r_off]."""
    w = float(w)
    _check_w(dp, w)
    return _memristance(dp.r_on, dp.r_off, dp.d_width, w)


def memductance(dp, w):
    return 1.0 / memristance(dp, w)


def window(x, kind=WindowKind.JOGLEKAR, p=1):
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"window argument must lie in [0, 1], got {x!r}")
    return _window(x, int(WindowKind.parse(kind)), int(p))


def drift_rate(dp, s, i):
    """dw/dt in m/s for state ``s`` carrying current ``i``."""
    _check_w(dp, s.w)
    return dp.drift_gain * float(i) * _window(s.w / dp.d_width, int(dp.window_kind), dp.p_window)


@jit
def _hysteresis_kernel(r_on, r_off, d, gain, kind, p, amp, omega, phase, w0, dt, nsteps):
    out = np.empty((nsteps + 1, 6))
    w = w0
    q = 0.0
    phi = 0.0
    status = 0
    for k in range(nsteps + 1):
        t = k * dt
        i = amp * math.sin(omega * t + phase)
        out[k, 0] = t
        out[k, 1] = i
        out[k, 2] = _memristance(r_on, r_off, d, w) * i
        out[k, 3] = q
        out[k, 4] = phi
        out[k, 5] = w
        if k == nsteps:
            break
        # RK4 on (w, q, phi)
        th = t + 0.5 * dt
        i1 = i
        i2 = amp * math.sin(omega * th + phase)
        i4 = amp * math.sin(omega * (t + dt) + phase)
        kw1 = gain * i1 * _window(w / d, kind, p)
        kp1 = _memristance(r_on, r_off, d, w) * i1
        wa = w + 0.5 * dt * kw1
        kw2 = gain * i2 * _window(wa / d, kind, p)
        kp2 = _memristance(r_on, r_off, d, wa) * i2
        wb = w + 0.5 * dt * kw2
        kw3 = gain * i2 * _window(wb / d, kind, p)
        kp3 = _memristance(r_on, r_off, d, wb) * i2
        wc = w + dt * kw3
        kw4 = gain * i4 * _window(wc / d, kind, p)
        kp4 = _memristance(r_on, r_off, d, wc) * i4
        w = w + dt / 6.0 * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4)
        q = q + dt / 6.0 * (i1 + 4.0 * i2 + i4)
        phi = phi + dt / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
        if not math.isfinite(w):
            status = k + 1
            break
        if w < 0.0 or w > d:
            if kind != 0 and (w < -ESCAPE_TOL * d or w > d + ESCAPE_TOL * d):
                status = k + 1
                break
            w = min(max(w, 0.0), d)
    return out, status


@dataclass(frozen=True)
class HysteresisRun:
    """Samples of a sinusoidally driven memristor.

    Columns of ``table``: t, i, v, q, phi, w.
    """

    table: np.ndarray
    steps_per_period: int
    periods: int

    t = property(lambda self: self.table[:, 0])
    i = property(lambda self: self.table[:, 1])
    v = property(lambda self: self.table[:, 2])
    q = property(lambda self: self.table[:, 3])
    phi = property(lambda self: self.table[:, 4])
    w = property(lambda self: self.table[:, 5])

    def period_slice(self, k):
        n = self.steps_per_period
        k = range(self.periods)[k]
        return slice(k * n, (k + 1) * n + 1)

    def loop_area(self, k=-1):
        """Pinched-loop area in the (i, v) plane over period ``k`` (default last)."""
        sl = self.period_slice(k)
        return loop_area(self.i[sl], self.v[sl])

    def loop_areas(self):
        return [self.loop_area(k) for k in range(self.periods)]


def loop_area(i, v):
    """Total lobe area of a closed pinched (i, v) trajectory, in W.

    The two lobes of a pinched loop circulate in opposite directions, so a
    plain shoelace sum cancels them. Each edge's shoelace term is instead
    booked to the lobe on whose side of ``i = 0`` it lies and the lobe
    magnitudes are added.
    """
    i = np.asarray(i, dtype=float)
    v = np.asarray(v, dtype=float)
    cross = i[:-1] * v[1:] - i[1:] * v[:-1]
    side = i[:-1] + i[1:]
    pos = cross[side > 0].sum()
    neg = cross[side < 0].sum()
    return 0.5 * (abs(pos) + abs(neg))


def run_hysteresis(dp, drive, w0, steps_per_period=1000, periods=2):
    """Drive the memristor with a sinusoidal current and record (t, i, v, q, phi, w).

    The state is advanced with classical RK4 on ``(w, q, phi)``; ``v`` is
    ``R_M(w) * i`` at each sample, so the loop passes through the origin
    wherever the current does. ``w`` is clamped to [0, D] after every step.
    """
    if steps_per_period < 100:
        raise DomainError("steps_per_period must be >= 100")
    if periods < 1:
        raise DomainError("periods must be >= 1")
    w0 = float(w0)
    _check_w(dp, w0)
    nsteps = int(steps_per_period) * int(periods)
    dt = drive.period / steps_per_period
    table, status = _hysteresis_kernel(
        dp.r_on, dp.r_off, dp.d_width, dp.drift_gain, int(dp.window_kind), dp.p_window,
        float(drive.amplitude), float(drive.omega), float(drive.phase), w0, dt, nsteps,
    )
    if status:
        k = status - 1
        raise IntegrationError(
            f"memristor state left [0, D] at step {status}; reduce the step size",
            t=float(table[k, 0]),
            state=table[k].copy(),
        )
    return HysteresisRun(table=table, steps_per_period=int(steps_per_period), periods=int(periods))


def flux_charge_curve(dp, q_samples, w0=0.0):
    """Flux-charge characteristic of a unity-window device.

    With ``w(q) = w0 + gain*q`` the memristance is linear in ``q`` and
    ``phi(q) = integral_0^q R_M(w(s)) ds`` has the closed form used here.
    Returns an array of shape (n, 2) with columns (q, phi).
    """
    if dp.window_kind is not WindowKind.UNITY:
        raise DomainError("flux_charge_curve needs the unity window")
    _check_w(dp, float(w0))
    q = np.asarray(q_samples, dtype=float)
    w = w0 + dp.drift_gain * q
    tol = 1e-12 * dp.d_width
    if np.any(w < -tol) or np.any(w > dp.d_width + tol):
        raise StateBoundError("charge samples drive w outside [0, D]")
    slope = (dp.r_on - dp.r_off) / dp.d_width
    phi = dp.r_off * q + slope * (w0 * q + 0.5 * dp.drift_gain * q * q)
    return np.column_stack([q, phi])
