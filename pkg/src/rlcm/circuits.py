"""State-space models of the series and parallel RLCM circuits.

Both circuits use the state ``x = [V_C, I_L]`` and the output row
``C_out = [1, 1]``. The memristor enters as a fixed operating-point
resistance ``r_m``; see :mod:`rlcm.transient` for the live, state-dependent
version.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LookupFailure, ValidationError
from .linalg import as_matrix
from .response import ResponseMetrics

__all__ = [
    "CircuitParams",
    "Preset",
    "PRESETS",
    "StateSpace",
    "Topology",
    "build",
    "build_parallel",
    "build_series",
    "preset",
]


class Topology(enum.Enum):
    SERIES = "series"
    PARALLEL = "parallel"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError("topology", f"expected 'series' or 'parallel', got {value!r}") from None


def _check_positive(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"not a number: {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ValidationError(name, f"must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class CircuitParams:
    """Component values in SI units; ``r_m`` is the memristance operating point."""

    r: float
    l: float  # noqa: E741
    c_cap: float
    r_m: float

    def __post_init__(self):
        for name in ("r", "l", "c_cap", "r_m"):
            object.__setattr__(self, name, _check_positive(name, getattr(self, name)))

    def replace(self, **changes):
        values = {"r": self.r, "l": self.l, "c_cap": self.c_cap, "r_m": self.r_m}
        values.update(changes)
        return CircuitParams(**values)


@dataclass(frozen=True)
class StateSpace:
    a: np.ndarray
    b: np.ndarray
    c_out: np.ndarray
    d: float = 0.0
    state_labels: tuple = ("V_C", "I_L")

    def __post_init__(self):
        a = as_matrix(self.a, name="A")
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValidationError("a", f"A must be square, got {a.shape}")
        b = as_matrix(self.b, shape=(n, 1), name="B")
        c_out = as_matrix(np.atleast_2d(self.c_out), shape=(1, n), name="C_out")
        if not math.isfinite(float(self.d)):
            raise ValidationError("d", "must be finite")
        if len(self.state_labels) != n:
            raise ValidationError("state_labels", f"need {n} labels")
        for name, val in (("a", a), ("b", b), ("c_out", c_out)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "state_labels", tuple(self.state_labels))

    @property
    def n_states(self):
        return self.a.shape[0]


def build_series(p):
    """Series RLCM: ``L dI_L/dt = U - (R + R_M) I_L - V_C``, ``C dV_C/dt = I_L``."""
    return StateSpace(
        a=[[0.0, 1.0 / p.c_cap], [-1.0 / p.l, -(p.r + p.r_m) / p.l]],
        b=[[0.0], [1.0 / p.l]],
        c_out=[[1.0, 1.0]],
    )


def build_parallel(p):
    """Parallel RLCM driven by a current source ``I_s`` into the common node."""
    g = 1.0 / (p.r * p.c_cap) + 1.0 / (p.r_m * p.c_cap)
    return StateSpace(
        a=[[-g, -1.0 / p.c_cap], [1.0 / p.l, 0.0]],
        b=[[1.0 / p.c_cap], [0.0]],
        c_out=[[1.0, 1.0]],
    )


def build(topology, p):
    topology = Topology.parse(topology)
    return build_series(p) if topology is Topology.SERIES else build_parallel(p)


@dataclass(frozen=True)
class Preset:
    """Reference circuit with its published response figures.

    ``output_scale`` multiplies the output row. ``expected`` and
    ``expected_impulse`` hold the published step/impulse metrics;
    ``expected_poles``/``expected_zeros`` the published pole-zero locations
    (an empty pole list for the parallel case, where none are reported).
    """

    name: str
    params: CircuitParams
    topology: Topology
    output_scale: float
    expected: ResponseMetrics
    expected_impulse: ResponseMetrics
    expected_poles: tuple = field(default=())
    expected_zeros: tuple = field(default=())

    def __post_init__(self):
        if not (math.isfinite(self.output_scale) and self.output_scale > 0):
            raise ValidationError("output_scale", "must be finite and > 0")

    def state_space(self):
        return build(self.topology, self.params)


PRESETS = {
    "paper-series": Preset(
        name="paper-series",
        params=CircuitParams(r=0.1, l=0.1, c_cap=1.0, r_m=0.1),
        topology=Topology.SERIES,
        output_scale=0.1,
        expected=ResponseMetrics(
            peak_amplitude=0.27, peak_time=0.49, overshoot_pct=177.0,
            rise_time=0.08, settling_time=4.06, final_value=0.10,
        ),
        expected_impulse=ResponseMetrics(peak_amplitude=1.00, settling_time=3.44),
        expected_poles=(complex(-1, -3), complex(-1, 3)),
        expected_zeros=(complex(-1, 0),),
    ),
    "paper-parallel": Preset(
        name="paper-parallel",
        params=CircuitParams(r=1.0, l=1.0, c_cap=1.0, r_m=1.0),
        topology=Topology.PARALLEL,
        output_scale=1.0,
        expected=ResponseMetrics(
            peak_amplitude=0.99, peak_time=6.00, overshoot_pct=0.0,
            rise_time=2.20, settling_time=3.91, final_value=1.00,
        ),
        expected_impulse=ResponseMetrics(peak_amplitude=1.00, settling_time=3.91),
        expected_poles=(),
        expected_zeros=(complex(-1, 0),),
    ),
}


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        valid = ", ".join(sorted(PRESETS))
        raise LookupFailure(f"unknown preset {name!r}; valid names: {valid}") from None
