"""Command-line front end.

Subcommands: ``analyze``, ``step``, ``impulse``, ``hysteresis``, ``sweep``.
Each takes ``--preset NAME`` or ``--config FILE`` (JSON), with flags
overriding file values. Exit status is 0 on success, 1 on a usage or
configuration error, 2 when an analysis completes with a non-stable verdict.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import analysis
from .circuits import PRESETS, CircuitParams, Topology, build, preset
from .errors import RLCMError, ValidationError
from .linalg import eig_2x2, eig_qr, group_repeated
from .memristor import DriftParams, SineDrive, WindowKind, run_hysteresis
from .response import Waveform, metrics
from .transient import Method, SimConfig, impulse_response, step_response

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE = 0, 1, 2

METRIC_FIELDS = ("peak_amplitude", "peak_time", "overshoot_pct", "rise_time", "settling_time", "final_value")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    topology: Topology
    components: CircuitParams
    output_scale: float = 1.0
    memristor: Optional[DriftParams] = None
    sim: SimConfig = SimConfig()
    output_path: Optional[str] = None

    def to_dict(self):
        c = self.components
        out = {
            "topology": self.topology.value,
            "output_scale": self.output_scale,
            "components": {"r_ohm": c.r, "l_henry": c.l, "c_farad": c.c_cap, "r_m_ohm": c.r_m},
            "sim": {"dt_s": self.sim.dt, "t_end_s": self.sim.t_end, "method": self.sim.method.value},
        }
        if self.memristor is not None:
            m = self.memristor
            out["memristor"] = {
                "r_on_ohm": m.r_on,
                "r_off_ohm": m.r_off,
                "d_m": m.d_width,
                "mobility_m2_per_vs": m.mobility,
                "window": m.window_kind.name.lower(),
                "p": m.p_window,
            }
        if self.output_path is not None:
            out["output_path"] = self.output_path
        return out

    @classmethod
    def from_dict(cls, data):
        return _resolve(data, argparse.Namespace())


def _num(section, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(key, f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def _resolve(data, args):
    """Merge a parsed JSON config with command-line overrides."""
    if not isinstance(data, dict):
        raise ValidationError("config", "top level must be a JSON object")
    known = {"preset", "topology", "components", "memristor", "sim", "output_scale", "output_path"}
    extra = set(data) - known
    if extra:
        raise ValidationError(sorted(extra)[0], "unknown config key")

    preset_name = getattr(args, "preset", None) or data.get("preset")
    if preset_name is not None and "components" in data:
        raise ValidationError("preset", "preset and components are mutually exclusive")

    comp = {}
    output_scale = 1.0
    topology = None
    if preset_name is not None:
        ps = preset(preset_name)
        comp = {"r": ps.params.r, "l": ps.params.l, "c_cap": ps.params.c_cap, "r_m": ps.params.r_m}
        output_scale = ps.output_scale
        topology = ps.topology
    if "topology" in data:
        topology = Topology.parse(data["topology"])
    if getattr(args, "topology", None):
        topology = Topology.parse(args.topology)
    if "output_scale" in data:
        output_scale = _num("", "output_scale", data["output_scale"])

    file_comp = data.get("components", {})
    for key, name in (("r_ohm", "r"), ("l_henry", "l"), ("c_farad", "c_cap"), ("r_m_ohm", "r_m")):
        if key in file_comp:
            comp[name] = _num("components", key, file_comp[key])
    for flag, name in (("r", "r"), ("l", "l"), ("c", "c_cap"), ("rm", "r_m")):
        value = getattr(args, flag, None)
        if value is not None:
            comp[name] = value
    if topology is None:
        raise ValidationError("topology", "give --preset, --topology or a config with 'topology'/'preset'")
    for name, flag in (("r", "--r"), ("l", "--l"), ("c_cap", "--c"), ("r_m", "--rm")):
        if name not in comp:
            raise ValidationError(name, f"missing component value ({flag})")
    components = CircuitParams(**comp)

    sim_data = data.get("sim", {})
    sim_kw = {}
    if "dt_s" in sim_data:
        sim_kw["dt"] = _num("sim", "dt_s", sim_data["dt_s"])
    if "t_end_s" in sim_data:
        sim_kw["t_end"] = _num("sim", "t_end_s", sim_data["t_end_s"])
    if "method" in sim_data:
        sim_kw["method"] = sim_data["method"]
    for flag, name in (("dt", "dt"), ("t_end", "t_end"), ("method", "method")):
        value = getattr(args, flag, None)
        if value is not None:
            sim_kw[name] = value
    sim = SimConfig(**sim_kw)

    memristor = None
    mem_data = data.get("memristor")
    mem_kw = {}
    if mem_data is not None:
        for key, name in (("r_on_ohm", "r_on"), ("r_off_ohm", "r_off"), ("d_m", "d_width"),
                          ("mobility_m2_per_vs", "mobility")):
            if key in mem_data:
                mem_kw[name] = _num("memristor", key, mem_data[key])
        if "window" in mem_data:
            mem_kw["window_kind"] = WindowKind.parse(mem_data["window"])
        if "p" in mem_data:
            mem_kw["p_window"] = mem_data["p"]
    for flag, name in (("r_on", "r_on"), ("r_off", "r_off"), ("d", "d_width"),
                       ("mobility", "mobility"), ("window", "window_kind"), ("p", "p_window")):
        value = getattr(args, flag, None)
        if value is not None:
            mem_kw[name] = value
    if mem_data is not None or mem_kw:
        memristor = DriftParams(**mem_kw)

    output_path = getattr(args, "out", None) or data.get("output_path")
    return RunConfig(topology, components, output_scale, memristor, sim, output_path)


def load_config(args):
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
    return _resolve(data, args), data


# ---------------------------------------------------------------- formatting

def fmt_num(x):
    if x is None:
        return "undefined"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def fmt_complex(z):
    re, im = fmt_num(z.real), z.imag
    if im == 0.0:
        return re
    return f"{re}{'+' if im > 0 else '-'}{fmt_num(abs(im))}i"


def fmt_roots(roots):
    # conjugate pairs read as a+bi, a-bi
    if len(roots) == 0:
        return "none"
    return ", ".join(fmt_complex(z) for z in sorted(roots, key=lambda z: (z.real, -z.imag)))


def fmt_poly(p):
    coef = p.coef
    terms = []
    for k in range(coef.size - 1, -1, -1):
        c = float(coef[k])
        if c == 0.0 and coef.size > 1:
            continue
        mag = fmt_num(abs(c))
        if k == 0:
            body = mag
        else:
            power = "s" if k == 1 else f"s^{k}"
            body = power if mag == "1" else f"{mag}{power}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += sign + body
    return out


def fmt_tf(tf):
    num, den = fmt_poly(tf.num), fmt_poly(tf.den)
    if tf.num.degree() > 0 and len(tf.num.coef[tf.num.coef != 0]) > 1:
        num = f"({num})"
    if tf.den.degree() == 0:
        return num if den == "1" else f"{num}/{den}"
    return f"{num}/({den})"


def metrics_report(m):
    return [f"{name}: {fmt_num(getattr(m, name))}" for name in METRIC_FIELDS]


# ---------------------------------------------------------------- CSV

def write_waveform_csv(path, w):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("t,y\n")
        for t, y in zip(w.t, w.samples):
            fh.write(f"{float(t)!r},{float(y)!r}\n")


def read_waveform_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != ["t", "y"]:
        raise ValueError(f"{path}: expected header t,y")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return Waveform(data[0, 0], data[1, 0] - data[0, 0], data[:, 1])


def write_table_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else repr(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------- commands

def cmd_analyze(cfg, args, out):
    p = cfg.components
    ss = build(cfg.topology, p)
    closed = analysis.eig_closed(cfg.topology, p)
    verdict = analysis.classify_stability(eig_2x2(ss.a))
    tf = analysis.transfer_function(ss, cfg.output_scale)
    minimal = analysis.minimal_form(tf)
    print(f"topology: {cfg.topology.value}", file=out)
    print(f"components: r={fmt_num(p.r)} l={fmt_num(p.l)} c={fmt_num(p.c_cap)} r_m={fmt_num(p.r_m)}", file=out)
    print(f"output scale: {fmt_num(cfg.output_scale)}", file=out)
    print(f"eigenvalues (closed form): {fmt_roots(closed)}", file=out)
    print(f"eigenvalues (2x2): {fmt_roots(verdict.eigenvalues)}", file=out)
    print(f"eigenvalues (QR): {fmt_roots(eig_qr(ss.a))}", file=out)
    print(f"max real part: {fmt_num(verdict.max_real_part)}", file=out)
    print(f"verdict: {verdict.verdict}", file=out)
    print(f"transfer function: {fmt_tf(tf)}", file=out)
    print(f"poles: {fmt_roots(tf.poles)}", file=out)
    repeated = [(z, k) for z, k in group_repeated(tf.poles) if k > 1]
    if repeated:
        print("repeated poles: " + ", ".join(f"{fmt_complex(z)} (x{k})" for z, k in repeated), file=out)
    print(f"{'zero' if len(tf.zeros) == 1 else 'zeros'}: {fmt_roots(tf.zeros)}", file=out)
    print(f"minimal: {fmt_tf(minimal)}", file=out)
    print(f"minimal poles: {fmt_roots(minimal.poles)}", file=out)
    print(f"dc gain: {fmt_num(tf.dc_gain)}", file=out)
    return EXIT_OK if verdict.is_stable else EXIT_UNSTABLE


def _cmd_transient(kind, cfg, args, out):
    ss = build(cfg.topology, cfg.components)
    run = step_response if kind == "step" else impulse_response
    w = run(ss, cfg.output_scale, cfg.sim)
    path = cfg.output_path or f"{kind}.csv"
    try:
        write_waveform_csv(path, w)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    print(f"wrote {len(w)} samples to {path}", file=out)
    for line in metrics_report(metrics(w, kind)):
        print(line, file=out)
    return EXIT_OK


def cmd_step(cfg, args, out):
    return _cmd_transient("step", cfg, args, out)


def cmd_impulse(cfg, args, out):
    return _cmd_transient("impulse", cfg, args, out)


def cmd_hysteresis(cfg, args, out):
    if cfg.memristor is None:
        if getattr(args, "config", None):
            raise ValidationError("memristor", "config has no 'memristor' section")
        dp = DriftParams()
    else:
        dp = cfg.memristor
    drive = SineDrive(args.amplitude, 2.0 * math.pi * args.freq, args.phase)
    run = run_hysteresis(dp, drive, args.w0 * dp.d_width, args.steps_per_period, args.periods)
    path = cfg.output_path or "hysteresis.csv"
    try:
        write_table_csv(path, ("t", "i", "v", "q", "phi", "w"), run.table)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    print(f"wrote {run.table.shape[0]} samples to {path}", file=out)
    for k, area in enumerate(run.loop_areas()):
        print(f"loop area period {k + 1}: {fmt_num(area)}", file=out)
    return EXIT_OK


SWEEP_PARAMS = {"r": "r", "l": "l", "c": "c_cap", "r_m": "r_m"}


def sweep_rows(cfg, param, lo, hi, count):
    field = SWEEP_PARAMS[param]
    rows = []
    for value in np.geomspace(lo, hi, count):
        p = cfg.components.replace(**{field: float(value)})
        verdict = analysis.verdict_for(cfg.topology, p)
        rows.append((float(value), verdict.max_real_part, str(verdict.verdict)))
    return rows


def cmd_sweep(cfg, args, out):
    if args.param not in SWEEP_PARAMS:
        raise ValidationError("param", f"unknown sweep parameter {args.param!r}; use one of r, l, c, r_m")
    lo, hi = args.range
    if args.count < 2:
        raise ValidationError("count", "need at least 2 sweep points")
    if not (lo > 0 and hi > 0):
        raise ValidationError("range", "log sweep bounds must be > 0")
    rows = sweep_rows(cfg, args.param, lo, hi, args.count)
    path = cfg.output_path or "sweep.csv"
    try:
        write_table_csv(path, ("value", "max_real_eig", "verdict"), rows)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None
    n_stable = sum(r[2] == "Stable" for r in rows)
    print(f"wrote {len(rows)} rows to {path}; {n_stable}/{len(rows)} stable", file=out)
    return EXIT_OK if n_stable == len(rows) else EXIT_UNSTABLE


COMMANDS = {
    "analyze": cmd_analyze,
    "step": cmd_step,
    "impulse": cmd_impulse,
    "hysteresis": cmd_hysteresis,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    src = common.add_argument_group("circuit")
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--config", metavar="PATH", help="JSON run configuration")
    src.add_argument("--topology", choices=[t.value for t in Topology])
    src.add_argument("--r", type=float, help="resistance (ohm)")
    src.add_argument("--l", type=float, help="inductance (H)")
    src.add_argument("--c", type=float, help="capacitance (F)")
    src.add_argument("--rm", type=float, help="memristance operating point (ohm)")
    sim = common.add_argument_group("simulation")
    sim.add_argument("--dt", type=float)
    sim.add_argument("--t-end", dest="t_end", type=float)
    sim.add_argument("--method", choices=[m.value for m in Method])
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--dump-config", metavar="PATH", help="write the effective config as JSON and exit")

    parser = _Parser(prog="rlcm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="eigenvalues, stability, poles and zeros")
    sub.add_parser("step", parents=[common], help="step response CSV and metrics")
    sub.add_parser("impulse", parents=[common], help="impulse response CSV and metrics")

    hy = sub.add_parser("hysteresis", parents=[common], help="memristor I-V loop under sine drive")
    mem = hy.add_argument_group("memristor")
    mem.add_argument("--r-on", dest="r_on", type=float)
    mem.add_argument("--r-off", dest="r_off", type=float)
    mem.add_argument("--d", type=float, help="film thickness (m)")
    mem.add_argument("--mobility", type=float, help="dopant mobility (m^2/(V s))")
    mem.add_argument("--window", choices=[k.name.lower() for k in WindowKind])
    mem.add_argument("--p", type=int, help="Joglekar window exponent")
    drv = hy.add_argument_group("drive")
    drv.add_argument("--amplitude", type=float, default=1e-4, help="current amplitude (A)")
    drv.add_argument("--freq", type=float, default=1.0, help="drive frequency (Hz)")
    drv.add_argument("--phase", type=float, default=0.0, help="drive phase (rad)")
    drv.add_argument("--periods", type=int, default=2)
    drv.add_argument("--steps-per-period", dest="steps_per_period", type=int, default=1000)
    drv.add_argument("--w0", type=float, default=0.1, help="initial doped width as a fraction of D")

    sw = sub.add_parser("sweep", parents=[common], help="stability over a log-spaced parameter range")
    sw.add_argument("--param", required=True, help="one of r, l, c, r_m")
    sw.add_argument("--range", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    sw.add_argument("--count", type=int, default=11)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "hysteresis" and not (args.preset or args.config or args.topology):
            # the memristor run needs no circuit; borrow one so the config resolves
            args.preset = "paper-series"
        cfg, _ = load_config(args)
        if args.dump_config:
            with open(args.dump_config, "w", encoding="utf-8") as fh:
                json.dump(cfg.to_dict(), fh, indent=2)
                fh.write("\n")
            return EXIT_OK
        return COMMANDS[args.command](cfg, args, out)
    except UsageError as exc:
        print(f"rlcm: error: {exc}", file=err)
        return EXIT_USAGE
    except (RLCMError, OSError) as exc:
        print(f"rlcm: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
