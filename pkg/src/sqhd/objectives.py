"""Benchmark objectives as finite sums f = (1/m) sum_j f_j with analytic gradients.

Five non-convex 2-D benchmarks (dw, mich, cubewave, sino, sino-alt) plus a
synthetic convex quadratic family whose gradient noise at the minimizer has
a closed form.  For the separable built-ins the finite-sum components are
the per-coordinate terms (m = d); for the least-squares pair each residual
is one component.  Component evaluators are vectorized over leading axes:
x has shape (..., d), values come back as (...), gradients as (..., d).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec


@dataclass(frozen=True)
class FiniteSumObjective:
    name: str
    d: int
    m: int
    component: "object"       # (j, x(..., d)) -> (...)
    component_grad: "object"  # (j, x(..., d)) -> (..., d)
    metadata: dict = field(default_factory=dict)

    def value(self, x):
        """Total objective (1/m) sum_j f_j(x)."""
        x = np.asarray(x, dtype=float)
        acc = self.component(0, x)
        for j in range(1, self.m):
            acc = acc + self.component(j, x)
        return acc / self.m

    def gradient(self, x):
        """Total gradient (1/m) sum_j grad f_j(x)."""
        x = np.asarray(x, dtype=float)
        acc = self.component_grad(0, x)
        for j in range(1, self.m):
            acc = acc + self.component_grad(j, x)
        return acc / self.m

    def tabulate_components(self, grid):
        """Component values over all grid points: array of shape (m, npoints)."""
        coords = grid.coordinates()
        return np.stack([self.component(j, coords) for j in range(self.m)])


@dataclass(frozen=True)
class Landscape:
    """Reference tabulation of an objective with brute-force extrema."""

    grid: GridSpec
    values: np.ndarray
    fmin: float
    fmax: float
    argmin: np.ndarray

    @property
    def degenerate(self):
        """True for constant objectives, whose loss cannot be normalized."""
        return self.fmax <= self.fmin

    @property
    def frange(self):
        return self.fmax - self.fmin


def landscape(obj, grid):
    """Tabulate f over the grid and record min/max/argmin by exhaustive scan."""
    coords = grid.coordinates()
    values = np.asarray(obj.value(coords), dtype=float)
    kmin = int(np.argmin(values))
    return Landscape(
        grid=grid,
        values=values,
        fmin=float(values[kmin]),
        fmax=float(values.max()),
        argmin=coords[kmin].copy(),
    )


def default_reference_grid(d):
    """Reference-scan resolution: 1024 per axis up to d=2, coarser beyond."""
    return GridSpec(d=d, n_r=1024 if d <= 2 else 64)


def gradient_noise(obj, x):
    """Mean squared deviation (1/m) sum_j ||grad f_j(x) - grad f(x)||^2."""
    x = np.asarray(x, dtype=float)
    full = obj.gradient(x)
    acc = 0.0
    for j in range(obj.m):
        diff = obj.component_grad(j, x) - full
        acc += float(np.sum(diff**2, axis=-1))
    return acc / obj.m


# ---------------------------------------------------------------------------
# Double well (rotated, rescaled Styblinski-Tang)


def _dw_w(y):
    return (y**4 - 16.0 * y**2 + 5.0 * y) / 10.0


def _dw_wprime(y):
    return (4.0 * y**3 - 32.0 * y + 5.0) / 10.0


def make_dw(theta=0.0, scale=1.2, d=2):
    """Per-axis double well composed with a planar rotation and 1/scale shrink.

    f(x) = (1/d) sum_j w(u_j), u = U x / scale, w(y) = (y^4 - 16 y^2 + 5 y)/10.
    The rotation is only defined in the plane, so theta != 0 requires d = 2.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    if theta != 0.0 and d != 2:
        raise ValueError("rotation is only defined for d=2")
    if d == 2:
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, s], [-s, c]])
    else:
        rot = np.eye(d)
    rows = rot / scale  # u_j = rows[j] . x

    def component(j, x):
        u = x @ rows[j]
        return _dw_w(u)

    def component_grad(j, x):
        u = x @ rows[j]
        return _dw_wprime(u)[..., None] * rows[j]

    return FiniteSumObjective(
        name="dw",
        d=d,
        m=d,
        component=component,
        component_grad=component_grad,
        metadata={"theta": float(theta), "scale": float(scale)},
    )


# ---------------------------------------------------------------------------
# Michalewicz and cube-wave (separable, per-coordinate components)


def _mich_w(y):
    return -np.sin(y) * np.sin(y**2 / np.pi) ** 20


def _mich_wprime(y):
    s2 = np.sin(y**2 / np.pi)
    return -np.cos(y) * s2**20 - np.sin(y) * 20.0 * s2**19 * np.cos(y**2 / np.pi) * (
        2.0 * y / np.pi
    )


def make_mich():
    """f(x1, x2) = (w(2 x1 + 2) + w(2 x2 + 2)) / 2, w(y) = -sin(y) sin(y^2/pi)^20."""

    def component(j, x):
        return _mich_w(2.0 * x[..., j] + 2.0)

    def component_grad(j, x):
        g = np.zeros_like(x)
        g[..., j] = 2.0 * _mich_wprime(2.0 * x[..., j] + 2.0)
        return g

    return FiniteSumObjective(
        name="mich", d=2, m=2, component=component, component_grad=component_grad
    )


def _cubewave_w(y):
    return np.cos(np.pi * y) ** 2 + 0.25 * y**4


def _cubewave_wprime(y):
    return -np.pi * np.sin(2.0 * np.pi * y) + y**3


def make_cubewave():
    """f(x1, x2) = (w(2 x1) + w(2 x2)) / 2, w(y) = cos(pi y)^2 + y^4 / 4."""

    def component(j, x):
        return _cubewave_w(2.0 * x[..., j])

    def component_grad(j, x):
        g = np.zeros_like(x)
        g[..., j] = 2.0 * _cubewave_wprime(2.0 * x[..., j])
        return g

    return FiniteSumObjective(
        name="cubewave", d=2, m=2, component=component, component_grad=component_grad
    )


# ---------------------------------------------------------------------------
# Nonlinear least squares: h(x; y) = sin^2(y0 + y1 x1 + y2 x2)

_SINO_N_SAMPLE = 40
_SINO_ALT_N_SAMPLE = 50


def _sino_parameters(variant, seed):
    rng = np.random.default_rng(np.random.SeedSequence((0x51_0, seed)))
    if variant == "sino":
        # 20 paired draws from the literal 101-value grids, assembled as
        # {a,0,b} then {0,a,b}; the third slot is the phase offset y0.
        a_grid = np.arange(101) / (6.0 * np.pi)
        b_grid = np.arange(101) / (4.0 * np.pi)
        a = rng.choice(a_grid, size=20)
        b = rng.choice(b_grid, size=20)
        params = np.zeros((_SINO_N_SAMPLE, 3))
        params[:20, 0] = a
        params[:20, 2] = b
        params[20:, 1] = a
        params[20:, 2] = b
    elif variant == "sino-alt":
        grid_vals = np.arange(-20, 21) / np.pi
        params = rng.choice(grid_vals, size=(_SINO_ALT_N_SAMPLE, 3))
    else:
        raise ValueError(f"unknown sino variant {variant!r}")
    return params


def make_sino(variant="sino", seed=0):
    """Nonlinear least-squares benchmark; residual targets are zero.

    Component j is (h(x; a_j) - b_j)^2 with h = sin^2(y0 + y1 x1 + y2 x2),
    b_j = 0, and parameter rows (y1, y2, y0) drawn from the variant's value
    grid.  Fully determined by (variant, seed).
    """
    params = _sino_parameters(variant, seed)
    m = params.shape[0]

    def component(j, x):
        y1, y2, y0 = params[j]
        z = y0 + y1 * x[..., 0] + y2 * x[..., 1]
        return np.sin(z) ** 4

    def component_grad(j, x):
        y1, y2, y0 = params[j]
        z = y0 + y1 * x[..., 0] + y2 * x[..., 1]
        # d/dz sin^4(z) = 2 sin^2(z) sin(2z)
        dz = 2.0 * np.sin(z) ** 2 * np.sin(2.0 * z)
        g = np.zeros_like(x)
        g[..., 0] = dz * y1
        g[..., 1] = dz * y2
        return g

    return FiniteSumObjective(
        name=variant,
        d=2,
        m=m,
        component=component,
        component_grad=component_grad,
        metadata={
            "seed": int(seed),
            "parameters": params.tolist(),
            "target_convention": "offsets-in-third-slot, regression targets 0",
        },
    )


# ---------------------------------------------------------------------------
# Convex quadratic finite sum (analytic gradient noise)


def make_convex_quadratic(centers):
    """f_j(x) = ||x - c_j||^2 / 2; gradient noise at the mean of the centers
    is exactly (1/m) sum_j ||c_j - mean(c)||^2."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.size == 0:
        raise ValueError("need at least one center")
    if not np.any(np.all(np.abs(centers) <= 1.0, axis=1)):
        raise ValueError("at least one center must lie inside [-1, 1]^d")
    m, d = centers.shape

    def component(j, x):
        return 0.5 * np.sum((x - centers[j]) ** 2, axis=-1)

    def component_grad(j, x):
        return x - centers[j]

    mean_center = centers.mean(axis=0)
    sigma_star = float(np.mean(np.sum((centers - mean_center) ** 2, axis=1)))
    return FiniteSumObjective(
        name="quadratic",
        d=d,
        m=m,
        component=component,
        component_grad=component_grad,
        metadata={
            "centers": centers.tolist(),
            "minimizer": mean_center.tolist(),
            "sigma_star": sigma_star,
        },
    )


# ---------------------------------------------------------------------------
# Registry

_DEFAULT_QUADRATIC_CENTERS = {
    1: [[-0.5], [0.5]],
    2: [[-0.5, 0.0], [0.5, 0.0]],
}


def _build_dw(seed=0, theta=None, scale=1.2, d=2):
    if theta is None:
        theta = float(np.random.default_rng(np.random.SeedSequence((0xD3, seed))).uniform(
            0.0, 2.0 * np.pi
        ))
    obj = make_dw(theta=theta, scale=scale, d=d)
    obj.metadata["seed"] = int(seed)
    return obj


def _build_quadratic(seed=0, centers=None, d=2):
    if centers is None:
        centers = _DEFAULT_QUADRATIC_CENTERS.get(d)
        if centers is None:
            raise ValueError(f"no default quadratic centers for d={d}")
    return make_convex_quadratic(centers)


OBJECTIVES = {
    "dw": _build_dw,
    "mich": lambda seed=0: make_mich(),
    "cubewave": lambda seed=0: make_cubewave(),
    "sino": lambda seed=0: make_sino("sino", seed),
    "sino-alt": lambda seed=0: make_sino("sino-alt", seed),
    "quadratic": _build_quadratic,
}


def build_objective(name, seed=0, **params):
    """Instantiate a registered objective by name."""
    try:
        factory = OBJECTIVES[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; known: {sorted(OBJECTIVES)}"
        ) from None
    return factory(seed=seed, **params)
