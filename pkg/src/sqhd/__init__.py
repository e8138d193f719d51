"""Split-step simulator and benchmark harness for stochastic quantum
Hamiltonian descent, with a dense hybrid-master-equation oracle and a
classical momentum baseline."""

from .grid import DensityState, GridSpec, WaveState, measure_position, uniform_state
from .objectives import build_objective, landscape
from .schedules import build_schedule
from .dynamics import RunConfig, Trajectory, channel_average, run_adaptive_sqhd, run_qhd, run_sqhd
from .lindblad import GeneratorConfig, integrate, lindblad_rhs, trace_distance, weak_approx_report
from .sgdm import sgdm_ensemble, sgdm_run

__all__ = [
    "DensityState",
    "GridSpec",
    "WaveState",
    "GeneratorConfig",
    "RunConfig",
    "Trajectory",
    "build_objective",
    "build_schedule",
    "channel_average",
    "integrate",
    "landscape",
    "lindblad_rhs",
    "measure_position",
    "run_adaptive_sqhd",
    "run_qhd",
    "run_sqhd",
    "sgdm_ensemble",
    "sgdm_run",
    "trace_distance",
    "uniform_state",
    "weak_approx_report",
]

__version__ = "0.1.0"
