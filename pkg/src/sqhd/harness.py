"""Experiment orchestration: config parsing, presets, execution, persistence.

Configs are flat key = value text ('#' starts a comment).  A config may
name a preset; preset keys fill in whatever the file does not set, so a
two-line file is enough to downscale a figure preset.  Supported keys:

    mode                benchmark (default) or weak-approx
    experiment          output name (default: preset name or "custom")
    preset              base preset to expand
    objective           dw | mich | cubewave | sino | sino-alt | quadratic
    objective_seed      dataset / rotation seed (default 0)
    theta, scale, d     double-well parameters (theta empty = seeded draw)
    centers             quadratic centers, e.g. "-0.5 0; 0.5 0"
    n_r / n_r_sweep     grid resolution (sweep: comma list)
    T, N, eta           any two; N_sweep for a comma list of N values
    algorithms          comma list of sqhd, qhd, adaptive-sqhd, sgdm
    sqhd_schedule       schedule for sqhd/adaptive-sqhd (default sgdm-style)
    qhd_schedule        schedule for qhd (default nagd)
    schedule            sets both quantum schedules at once
    sis_C, sis_t_eps    parameters when a schedule is "sis"
    samples             stochastic sample paths per quantum run (default 10)
    sgdm_runs           ensemble size for the classical baseline (default 1000)
    delta               success threshold (default per objective)
    checkpoint_stride   metric recording stride (default N // 200)
    reference_resolution  landscape scan resolution (default 1024, d <= 2)
    seed                master seed
    figures             true/false: render PNGs next to the CSVs
    kinetic_sign, noise_sign, clamp   sensitivity flags
    channel, compare_stride, dt, safety   weak-approx mode controls

Re-running a config with the same master seed reproduces every CSV body
byte for byte; wall-clock metadata lives only in summary.json.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import RunConfig, run_adaptive_sqhd, run_qhd, run_sqhd
from .grid import GridSpec, write_distribution_csv
from .lindblad import InvariantViolation, weak_approx_report
from .metrics import DEFAULT_DELTA
from .objectives import OBJECTIVES, build_objective, landscape
from .presets import PRESETS
from .schedules import SCHEDULES, build_schedule
from .sgdm import sgdm_ensemble

SCHEMA_VERSION = 1

NORM_DRIFT_TOL = 1e-10

_QUANTUM = ("sqhd", "qhd", "adaptive-sqhd")
ALGORITHMS = _QUANTUM + ("sgdm",)


class ConfigError(Exception):
    def __init__(self, message, line=None, fieldname=None):
        self.line = line
        self.fieldname = fieldname
        where = []
        if line is not None:
            where.append(f"line {line}")
        if fieldname is not None:
            where.append(f"field {fieldname!r}")
        super().__init__((f"[{', '.join(where)}] " if where else "") + message)


def parse_config_text(text):
    """Flat key = value parser; returns (dict, key -> line-number map)."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, fieldname=key)
        values[key] = value
        lines[key] = lineno
    return values, lines


def load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


_KNOWN_KEYS = {
    "mode", "experiment", "preset", "objective", "objective_seed", "theta",
    "scale", "d", "centers", "n_r", "n_r_sweep", "T", "N", "eta", "N_sweep",
    "algorithms", "sqhd_schedule", "qhd_schedule", "schedule", "sis_C",
    "sis_t_eps", "samples", "sgdm_runs", "delta", "checkpoint_stride",
    "reference_resolution", "seed", "figures", "kinetic_sign", "noise_sign",
    "clamp", "channel", "compare_stride", "dt", "safety",
}


class _Fields:
    """Typed access to raw config values with line/field diagnostics."""

    def __init__(self, values, lines):
        self.values = values
        self.lines = lines

    def _get(self, key, conv, default, typename):
        if key not in self.values or self.values[key] == "":
            return default
        try:
            return conv(self.values[key])
        except (ValueError, TypeError):
            raise ConfigError(
                f"cannot parse {self.values[key]!r} as {typename}",
                line=self.lines.get(key),
                fieldname=key,
            ) from None

    def str_(self, key, default=None):
        return self._get(key, str, default, "string")

    def int_(self, key, default=None):
        return self._get(key, int, default, "integer")

    def float_(self, key, default=None):
        return self._get(key, float, default, "number")

    def bool_(self, key, default=None):
        def conv(s):
            low = s.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(s)

        return self._get(key, conv, default, "boolean")

    def int_list(self, key, default=None):
        return self._get(
            key, lambda s: [int(v) for v in s.split(",") if v.strip()], default,
            "comma-separated integers",
        )

    def str_list(self, key, default=None):
        return self._get(
            key, lambda s: [v.strip() for v in s.split(",") if v.strip()], default,
            "comma-separated names",
        )

    def err(self, key, message):
        raise ConfigError(message, line=self.lines.get(key), fieldname=key)


@dataclass(frozen=True)
class RunSpec:
    run_id: str
    algorithm: str
    schedule: str
    n_r: int
    eta: float
    N: int


@dataclass
class ExperimentConfig:
    name: str
    mode: str
    objective: "object"
    delta: float
    seed: int
    samples: int
    sgdm_runs: int
    checkpoint_stride: int
    reference_resolution: int
    figures: bool
    kinetic_sign: float
    noise_sign: float
    clamp: float
    runs: list = field(default_factory=list)
    weak: dict = field(default_factory=dict)
    schedule_params: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _resolve_raw(values, lines):
    preset = values.get("preset")
    if preset is None:
        return dict(values), dict(lines)
    if preset not in PRESETS:
        raise ConfigError(
            f"unknown preset {preset!r}; known: {sorted(PRESETS)}",
            line=lines.get("preset"),
            fieldname="preset",
        )
    merged = dict(PRESETS[preset])
    merged.update({k: v for k, v in values.items() if k != "preset"})
    merged.setdefault("experiment", preset)
    merged_lines = {k: lines.get(k) for k in merged}
    return merged, merged_lines


def _times(f, n_default=None):
    """Resolve (eta, N) from any two of T, N, eta."""
    T, N, eta = f.float_("T"), f.int_("N", n_default), f.float_("eta")
    given = sum(v is not None for v in (T, N, eta))
    if eta is not None and N is not None:
        return eta, N
    if T is not None and N is not None:
        return T / N, N
    if T is not None and eta is not None:
        return eta, int(round(T / eta))
    f.err("T", f"need two of T, N, eta (got {given})")


def build_experiment(values, lines, seed_override=None):
    values, lines = _resolve_raw(values, lines)
    unknown = set(values) - _KNOWN_KEYS - {"experiment", "preset"}
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key {key!r}", line=lines.get(key), fieldname=key)
    f = _Fields(values, lines)

    mode = f.str_("mode", "benchmark")
    if mode not in ("benchmark", "weak-approx"):
        f.err("mode", f"mode must be benchmark or weak-approx, got {mode!r}")

    obj_name = f.str_("objective")
    if obj_name is None:
        f.err("objective", "objective is required")
    if obj_name not in OBJECTIVES:
        f.err("objective", f"unknown objective {obj_name!r}; known: {sorted(OBJECTIVES)}")
    obj_kwargs = {"seed": f.int_("objective_seed", 0)}
    if obj_name == "dw":
        theta = f.float_("theta")
        if theta is not None:
            obj_kwargs["theta"] = theta
        obj_kwargs["scale"] = f.float_("scale", 1.2)
        obj_kwargs["d"] = f.int_("d", 2)
    elif obj_name == "quadratic":
        centers = f.str_("centers")
        if centers is not None:
            try:
                obj_kwargs["centers"] = [
                    [float(c) for c in point.split()] for point in centers.split(";")
                ]
            except ValueError:
                f.err("centers", f"cannot parse centers {centers!r}")
        else:
            obj_kwargs["d"] = f.int_("d", 2)
    try:
        objective = build_objective(obj_name, **obj_kwargs)
    except ValueError as exc:
        f.err("objective", str(exc))

    seed = seed_override if seed_override is not None else f.int_("seed", 0)
    delta = f.float_("delta", DEFAULT_DELTA.get(obj_name, 0.1))
    ref_default = 1024 if objective.d <= 2 else 64
    schedule_params = {"C": f.float_("sis_C", 2.0), "t_eps": f.float_("sis_t_eps", 0.01)}

    exp = ExperimentConfig(
        name=f.str_("experiment", "custom"),
        mode=mode,
        objective=objective,
        delta=delta,
        seed=seed,
        samples=f.int_("samples", 10),
        sgdm_runs=f.int_("sgdm_runs", 1000),
        checkpoint_stride=f.int_("checkpoint_stride", 0),
        reference_resolution=f.int_("reference_resolution", ref_default),
        figures=f.bool_("figures", True),
        kinetic_sign=f.float_("kinetic_sign", 1.0),
        noise_sign=f.float_("noise_sign", 1.0),
        clamp=f.float_("clamp"),
        schedule_params=schedule_params,
        raw=dict(values),
    )

    def check_schedule(key, name):
        if name not in SCHEDULES:
            f.err(key, f"unknown schedule {name!r}; known: {sorted(SCHEDULES)}")
        return name

    if mode == "weak-approx":
        eta, n_iter = _times(f)
        sched = check_schedule("schedule", f.str_("schedule", "sgdm-style"))
        channel = f.str_("channel", "exhaustive")
        if channel not in ("exhaustive", "monte-carlo"):
            f.err("channel", f"channel must be exhaustive or monte-carlo, got {channel!r}")
        exp.weak = {
            "schedule": sched,
            "eta": eta,
            "N": n_iter,
            "n_r": f.int_("n_r", 16),
            "channel": channel,
            "compare_stride": f.int_("compare_stride", 1),
            "dt": f.float_("dt"),
            "safety": f.float_("safety", 0.25),
        }
        return exp

    algorithms = f.str_list("algorithms", [])
    if not algorithms:
        f.err("algorithms", "benchmark mode needs a non-empty algorithms list")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            f.err("algorithms", f"unknown algorithm {algo!r}; known: {list(ALGORITHMS)}")

    base = f.str_("schedule")
    sqhd_sched = check_schedule(
        "sqhd_schedule", f.str_("sqhd_schedule", base or "sgdm-style")
    )
    qhd_sched = check_schedule("qhd_schedule", f.str_("qhd_schedule", base or "nagd"))

    n_sweep = f.int_list("N_sweep")
    nr_sweep = f.int_list("n_r_sweep")
    if n_sweep and nr_sweep:
        f.err("N_sweep", "N_sweep and n_r_sweep cannot be combined")
    if n_sweep:
        T = f.float_("T")
        if T is None:
            f.err("T", "N_sweep requires T")
        variants = [(T / n, n, f.int_("n_r", 32), f"N{n}") for n in n_sweep]
    elif nr_sweep:
        eta, n_iter = _times(f)
        variants = [(eta, n_iter, nr, f"nr{nr}") for nr in nr_sweep]
    else:
        eta, n_iter = _times(f)
        variants = [(eta, n_iter, f.int_("n_r", 32), None)]

    for eta, n_iter, n_r, tag in variants:
        try:
            GridSpec(objective.d, n_r)
        except ValueError as exc:
            f.err("n_r", str(exc))
        for algo in algorithms:
            sched = qhd_sched if algo == "qhd" else sqhd_sched
            run_id = algo if tag is None else f"{algo}_{tag}"
            exp.runs.append(
                RunSpec(run_id=run_id, algorithm=algo, schedule=sched,
                        n_r=n_r, eta=eta, N=n_iter)
            )
    return exp


# ---------------------------------------------------------------------------
# execution


def _fmt(x):
    return format(float(x), ".17g")


def write_trajectory_csv(path, iterations, times, loss, succ, stderr_loss=None, stderr_succ=None):
    header = "iteration,time,expected_loss,success_prob"
    with_err = stderr_loss is not None
    if with_err:
        header += ",stderr_loss,stderr_succ"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(len(iterations)):
            row = [str(int(iterations[i])), _fmt(times[i]), _fmt(loss[i]), _fmt(succ[i])]
            if with_err:
                row += [_fmt(stderr_loss[i]), _fmt(stderr_succ[i])]
            fh.write(",".join(row) + "\n")


def _build_schedule(exp, name):
    if name == "sis":
        return build_schedule("sis", **exp.schedule_params)
    return build_schedule(name)


def _execute_run(exp, spec, scape):
    if spec.algorithm == "sgdm":
        curves = sgdm_ensemble(
            exp.objective, spec.eta, spec.N, exp.sgdm_runs, exp.seed, exp.delta,
            scape, checkpoint_stride=_stride(exp, spec),
        )
        return spec, curves
    cfg = RunConfig(
        objective=exp.objective,
        grid=GridSpec(exp.objective.d, spec.n_r),
        schedule=_build_schedule(exp, spec.schedule),
        eta=spec.eta,
        N=spec.N,
        seed=exp.seed,
        checkpoint_stride=_stride(exp, spec),
        samples=exp.samples if spec.algorithm != "qhd" else 1,
        delta=exp.delta,
        landscape=scape,
        kinetic_sign=exp.kinetic_sign,
        noise_sign=exp.noise_sign,
        clamp=exp.clamp,
    )
    runner = {"sqhd": run_sqhd, "qhd": run_qhd, "adaptive-sqhd": run_adaptive_sqhd}
    traj = runner[spec.algorithm](cfg)
    if traj.norm_drift > NORM_DRIFT_TOL:
        raise InvariantViolation(
            f"run {spec.run_id}: norm drift {traj.norm_drift:.3e} beyond {NORM_DRIFT_TOL}"
        )
    return spec, traj


def _stride(exp, spec):
    if exp.checkpoint_stride:
        return exp.checkpoint_stride
    return max(1, spec.N // 200)


def _flags(exp):
    return {
        "kinetic_sign": exp.kinetic_sign,
        "noise_sign": exp.noise_sign,
        "clamp": exp.clamp,
        "sgdm_clamped_to_box": True,
        "loss_reference": "reference-landscape fmin",
        "success_extrema": "run-grid for quantum runs, reference for sgdm",
        "sino_target_convention": exp.objective.metadata.get("target_convention"),
    }


def run_experiment(exp, out_dir, threads=1):
    """Execute every run, write CSV/JSON artifacts (and figures), return summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    if exp.mode == "weak-approx":
        return _run_weak_approx(exp, out_dir, started)
    scape = landscape(
        exp.objective, GridSpec(exp.objective.d, exp.reference_resolution)
    )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda s: _execute_run(exp, s, scape), exp.runs))
    else:
        results = [_execute_run(exp, spec, scape) for spec in exp.runs]

    summary_runs = []
    for spec, res in results:
        traj_file = f"{spec.run_id}_trajectory.csv"
        write_trajectory_csv(
            out_dir / traj_file,
            res.iterations, res.times, res.expected_loss, res.success_prob,
            res.stderr_loss, res.stderr_succ,
        )
        entry = {
            "run_id": spec.run_id,
            "algorithm": spec.algorithm,
            "schedule": spec.schedule if spec.algorithm != "sgdm" else None,
            "n_r": spec.n_r if spec.algorithm != "sgdm" else None,
            "eta": spec.eta,
            "N": spec.N,
            "T": spec.eta * spec.N,
            "final_expected_loss": float(res.expected_loss[-1]),
            "final_success_prob": float(res.success_prob[-1]),
            "wall_time_s": res.wall_time,
            "files": [traj_file],
        }
        if spec.algorithm == "sgdm":
            entry["runs"] = exp.sgdm_runs
        else:
            entry["samples"] = 1 if spec.algorithm == "qhd" else exp.samples
            entry["norm_drift"] = res.norm_drift
            dist_file = f"{spec.run_id}_distribution.csv"
            write_distribution_csv(
                out_dir / dist_file, GridSpec(exp.objective.d, spec.n_r),
                res.final_distribution,
            )
            entry["files"].append(dist_file)
        summary_runs.append(entry)

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": exp.name,
        "mode": exp.mode,
        "seed": exp.seed,
        "objective": {
            "name": exp.objective.name,
            "d": exp.objective.d,
            "m": exp.objective.m,
            "metadata": _json_safe(exp.objective.metadata),
        },
        "delta": exp.delta,
        "reference_landscape": {
            "resolution": exp.reference_resolution,
            "fmin": scape.fmin,
            "fmax": scape.fmax,
            "argmin": scape.argmin.tolist(),
        },
        "flags": _flags(exp),
        "runs": summary_runs,
        "config": exp.raw,
        "created_unix": started,
        "elapsed_s": time.time() - started,
    }
    _write_summary(out_dir, summary)
    if exp.figures:
        from .report import render_benchmark_figures

        summary["figures"] = render_benchmark_figures(exp, out_dir, results)
        _write_summary(out_dir, summary)
    return summary


def _run_weak_approx(exp, out_dir, started):
    w = exp.weak
    cfg = RunConfig(
        objective=exp.objective,
        grid=GridSpec(exp.objective.d, w["n_r"]),
        schedule=_build_schedule(exp, w["schedule"]),
        eta=w["eta"],
        N=w["N"],
        seed=exp.seed,
        samples=exp.samples,
        delta=exp.delta,
        kinetic_sign=exp.kinetic_sign,
        noise_sign=exp.noise_sign,
    )
    report = weak_approx_report(
        cfg, dt=w["dt"], channel=w["channel"], stride=w["compare_stride"],
        safety=w["safety"],
    )
    for label in ("eta", "eta_half"):
        per = report["per_checkpoint"][label]
        path = out_dir / f"distances_{label}.csv"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("iteration,time,trace_distance\n")
            for k, t, d in zip(per["iterations"], per["times"], per["distances"]):
                fh.write(f"{k},{_fmt(t)},{_fmt(d)}\n")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": exp.name,
        "mode": exp.mode,
        "seed": exp.seed,
        "objective": {
            "name": exp.objective.name,
            "d": exp.objective.d,
            "m": exp.objective.m,
            "metadata": _json_safe(exp.objective.metadata),
        },
        "flags": _flags(exp),
        "report": report,
        "config": exp.raw,
        "created_unix": started,
        "elapsed_s": time.time() - started,
    }
    _write_summary(out_dir, summary)
    if exp.figures:
        from .report import render_weak_approx_figure

        summary["figures"] = [render_weak_approx_figure(out_dir, report)]
        _write_summary(out_dir, summary)
    return summary


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _write_summary(out_dir, summary):
    with open(out_dir / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_json_safe(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
