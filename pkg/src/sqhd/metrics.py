"""Expected loss and delta-success probability over grid distributions.

Reference extrema (fmin, fmax) come from the fine landscape scan rather
than the run grid, so curves from different resolutions share one axis.
delta defaults per objective: 0.01 for cubewave and dw, 0.05 for sino-alt,
0.1 for mich and sino.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_DELTA = {
    "dw": 0.01,
    "cubewave": 0.01,
    "sino-alt": 0.05,
    "mich": 0.1,
    "sino": 0.1,
    "quadratic": 0.01,
}

_NEG_GUARD = 1e-9


@dataclass(frozen=True)
class MetricPoint:
    time: float
    expected_loss: float
    success_prob: float

    def __post_init__(self):
        if self.expected_loss < -_NEG_GUARD:
            raise ValueError(f"expected loss {self.expected_loss!r} below -1e-9")
        if not 0.0 <= self.success_prob <= 1.0:
            raise ValueError(f"success probability {self.success_prob!r} outside [0, 1]")


def _check_distribution(probabilities, fvalues):
    probabilities = np.asarray(probabilities, dtype=float)
    fvalues = np.asarray(fvalues, dtype=float)
    if probabilities.shape != fvalues.shape:
        raise ValueError(
            f"length mismatch: {probabilities.shape} probabilities vs "
            f"{fvalues.shape} values"
        )
    total = probabilities.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"probabilities sum to {total!r}, not 1 within 1e-8")
    return probabilities, fvalues


def expected_loss(probabilities, fvalues, fmin):
    """sum_k p_k f_k - fmin, clipped at 0 when within the -1e-9 guard.

    The guard absorbs run-grid values marginally below the reference fmin;
    anything more negative is a genuine inconsistency and passes through
    for the caller's invariant checks to reject.
    """
    probabilities, fvalues = _check_distribution(probabilities, fvalues)
    val = float(np.dot(probabilities, fvalues)) - fmin
    if -_NEG_GUARD <= val < 0.0:
        return 0.0
    return val


def success_probability(probabilities, fvalues, fmin, fmax, delta):
    """Probability mass on grid points with (f - fmin) / (fmax - fmin) < delta."""
    if fmax <= fmin:
        raise ValueError(f"degenerate range [{fmin}, {fmax}]")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    probabilities, fvalues = _check_distribution(probabilities, fvalues)
    mask = (fvalues - fmin) / (fmax - fmin) < delta
    return float(probabilities[mask].sum())


def success_indicator(fvalues, fmin, fmax, delta):
    """Boolean mask of grid points counted as delta-successes."""
    if fmax <= fmin:
        raise ValueError(f"degenerate range [{fmin}, {fmax}]")
    fvalues = np.asarray(fvalues, dtype=float)
    return (fvalues - fmin) / (fmax - fmin) < delta
