"""State-space analysis of memristor-augmented series and parallel RLC circuits."""

from ._accel import JIT_ENABLED, backend_name
from .analysis import (
    Stability,
    StabilityVerdict,
    classify_stability,
    eig_parallel_closed,
    eig_series_closed,
    minimal_form,
    transfer_function,
)
from .circuits import PRESETS, CircuitParams, Preset, StateSpace, Topology, build, build_parallel, build_series, preset
from .errors import RLCMError
from .linalg import RationalTF, eig_2x2, eig_qr, expm, poly_roots, resolvent_tf, roots_quadratic
from .memristor import DriftParams, MemState, SineDrive, WindowKind, flux_charge_curve, memristance, run_hysteresis
from .response import ResponseMetrics, Waveform, metrics
from .transient import (
    Method,
    SimConfig,
    discretize_zoh,
    impulse_response,
    simulate_rlcm_nonlinear,
    step_response,
)

__version__ = "0.1.0"
