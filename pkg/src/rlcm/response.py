"""Sampled waveforms and the step/impulse performance metrics."""

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DomainError

__all__ = ["ResponseMetrics", "Waveform", "metrics", "SETTLING_BAND", "RISE_LIMITS"]

SETTLING_BAND = 0.02
RISE_LIMITS = (0.1, 0.9)
FINAL_TAIL = 0.05
ZERO_FINAL = 1e-12


@dataclass(frozen=True)
class Waveform:
    """Uniformly sampled signal, ``y[k] = samples[k]`` at ``t0 + k*dt``."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.samples, dtype=float)
        if not self.dt > 0:
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if y.ndim != 1 or not np.all(np.isfinite(y)):
            raise DomainError("samples must be a finite 1-D array")
        y.setflags(write=False)
        object.__setattr__(self, "samples", y)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def t(self):
        return self.t0 + self.dt * np.arange(self.samples.size)

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class ResponseMetrics:
    """Performance figures of a step or impulse response.

    ``None`` marks a quantity that is undefined for the response (rise time
    and overshoot of an impulse, or of a step whose final value is zero).
    """

    peak_amplitude: Optional[float] = None
    peak_time: Optional[float] = None
    overshoot_pct: Optional[float] = None
    rise_time: Optional[float] = None
    settling_time: Optional[float] = None
    final_value: Optional[float] = None

    def as_dict(self):
        return asdict(self)


def _first_crossing(t, u, level):
    # first time u rises through level, linearly interpolated
    above = np.nonzero(u >= level)[0]
    if above.size == 0:
        return None
    k = above[0]
    if k == 0:
        return float(t[0])
    u0, u1 = u[k - 1], u[k]
    return float(t[k - 1] + (t[k] - t[k - 1]) * (level - u0) / (u1 - u0))


def _last_exit(t, err, band):
    # last time err is above band, interpolated to where it drops inside
    outside = np.nonzero(err > band)[0]
    if outside.size == 0:
        return float(t[0])
    k = outside[-1]
    if k == err.size - 1:
        return float(t[-1])
    e0, e1 = err[k], err[k + 1]
    return float(t[k] + (t[k + 1] - t[k]) * (e0 - band) / (e0 - e1))


def metrics(w, kind="step"):
    """Step or impulse metrics of a sampled response.

    Step responses: the final value is the mean of the trailing 5 % of
    samples; the rise time runs from the first 10 % to the first 90 %
    crossing of the final value; the settling time is the last moment the
    error ``|y - final|`` exceeds 2 % of its largest value over the record.
    Impulse responses: the settling time is the last moment ``|y|`` exceeds
    2 % of the peak. Crossing times are linearly interpolated between
    samples; the peak time is a grid time.
    """
    kind = str(kind).lower()
    if kind not in ("step", "impulse"):
        raise DomainError(f"kind must be 'step' or 'impulse', got {kind!r}")
    y = np.asarray(w.samples, dtype=float)
    if y.size < 10:
        raise DomainError("need at least 10 samples")
    t = w.t
    tail = max(1, int(math.ceil(FINAL_TAIL * y.size)))
    final = float(y[-tail:].mean())
    k_peak = int(np.argmax(np.abs(y)))
    peak = float(abs(y[k_peak]))
    peak_time = float(t[k_peak])

    if kind == "impulse":
        settling = _last_exit(t, np.abs(y), SETTLING_BAND * peak) if peak > 0 else float(t[0])
        return ResponseMetrics(
            peak_amplitude=peak,
            peak_time=peak_time,
            settling_time=settling,
            final_value=final,
        )

    err = np.abs(y - final)
    settling = _last_exit(t, err, SETTLING_BAND * err.max())
    if abs(final) < ZERO_FINAL:
        return ResponseMetrics(
            peak_amplitude=peak,
            peak_time=peak_time,
            settling_time=settling,
            final_value=final,
        )
    overshoot = max(0.0, (peak - final) / abs(final)) * 100.0
    u = y / final
    t_lo = _first_crossing(t, u, RISE_LIMITS[0])
    t_hi = _first_crossing(t, u, RISE_LIMITS[1])
    rise = None if t_lo is None or t_hi is None else t_hi - t_lo
    return ResponseMetrics(
        peak_amplitude=peak,
        peak_time=peak_time,
        overshoot_pct=overshoot,
        rise_time=rise,
        settling_time=settling,
        final_value=final,
    )
