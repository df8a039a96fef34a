"""Steady-state branches, their stability, and parameter sweeps with hysteresis."""

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cubic import build_cubic, find_roots
from .exceptions import BistabError, ParameterError
from .forces import force_jacobian
from .params import derived

log = logging.getLogger(__name__)

SWEEP_AXES = ("eta", "eta_eff", "delta")
EPS_STAB_REL = 1e-6


class Stability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SteadyBranch:
    n_s: float
    q_s: float
    Q_s: float
    P_s: float
    stability: Stability
    residual: float = 0.0
    slope: float = 0.0  # df/dn at the root
    double: bool = False


def branch_positions(n, params):
    """Mirror position, condensate position and momentum for photon number n."""
    coeffs = derived(params)
    q = coeffs.q_per_photon * n
    Q = -coeffs.qq_per_photon * n
    P = params.gamma_sm / params.big_omega * Q
    return q, Q, P


def linearized_matrix(q, Q, params, convention="steady"):
    """4x4 Jacobian of (q, q', Q, Q') for the damped adiabatic equations of motion."""
    k = force_jacobian(q, Q, params, convention)
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [k[0, 0], -params.gamma_m, k[0, 1], 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [k[1, 0], 0.0, k[1, 1], -params.gamma_sm],
    ])


def eigenvalues(branch, params, convention="steady"):
    jac = linearized_matrix(branch.q_s, branch.Q_s, params, convention)
    # rescale time by omega_m to keep the entries O(1) for LAPACK
    return np.linalg.eigvals(jac / params.omega_m) * params.omega_m


def eigen_stability(branch, params, convention="steady"):
    """Classify by the largest real part of the linearization's spectrum."""
    eps = EPS_STAB_REL * params.omega_m
    top = float(np.max(eigenvalues(branch, params, convention).real))
    if top < -eps:
        return Stability.STABLE
    if top > eps:
        return Stability.UNSTABLE
    return Stability.MARGINAL


def slope_stability(branch):
    """Slope criterion: a root where f decreases through zero is unstable."""
    if branch.double:
        return Stability.MARGINAL
    return Stability.UNSTABLE if branch.slope < 0.0 else Stability.STABLE


def classify_stability(branch, params, convention="steady"):
    if branch.double:
        return Stability.MARGINAL
    if params.gamma_m == 0.0 and params.gamma_sm == 0.0:
        # undamped linearization is never asymptotically stable
        s = slope_stability(branch)
        return s if s is Stability.UNSTABLE else Stability.MARGINAL
    return eigen_stability(branch, params, convention)


def steady_state_at(params, tol=1e-12, convention="steady"):
    cubic = build_cubic(params, convention)
    roots, double = find_roots(cubic, tol)
    out = []
    for n, is_double in zip(roots, double):
        q, Q, P = branch_positions(n, params)
        raw = SteadyBranch(n, q, Q, P, Stability.MARGINAL, abs(cubic(n)), cubic.derivative(n), is_double)
        out.append(_with_stability(raw, classify_stability(raw, params, convention)))
    return out


def _with_stability(branch, stability):
    return SteadyBranch(branch.n_s, branch.q_s, branch.Q_s, branch.P_s, stability,
                        branch.residual, branch.slope, branch.double)


# --- sweeps ------------------------------------------------------------------

@dataclass
class SweepResult:
    """Branches on a 1D or row-major 2D grid.

    ``branches[i]`` is the ascending branch list at flat index i, or ``None``
    where the solver failed (message in ``errors[i]``).  Traces hold the selected
    photon number along the first axis for each value of the second axis.
    """

    axes: list
    branches: list
    errors: dict = field(default_factory=dict)
    up_trace: np.ndarray = None
    down_trace: np.ndarray = None
    windows: list = None  # used by saturation_scan

    @property
    def shape(self):
        return tuple(len(v) for _, v in self.axes)

    def counts(self):
        return np.array([0 if b is None else len(b) for b in self.branches]).reshape(self.shape)

    def max_n(self):
        return np.array([max(x.n_s for x in b) if b else np.nan for b in self.branches]).reshape(self.shape)

    def point(self, flat_index):
        """Axis values at a flat grid index."""
        idx = np.unravel_index(flat_index, self.shape)
        return tuple(values[i] for (_, values), i in zip(self.axes, idx))


def _check_axis(axis):
    if axis not in SWEEP_AXES:
        raise ParameterError("axis", f"expected one of {SWEEP_AXES}, got {axis!r}")


def _check_grid(name, grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ParameterError(name, "grid needs at least 2 points")
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ParameterError(name, "grid must be strictly monotonic")
    return grid


def _solve_point(task):
    params, tol, convention = task
    try:
        return steady_state_at(params, tol, convention), None
    except BistabError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _evaluate(tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_point, tasks, chunksize=chunk))
    return [_solve_point(t) for t in tasks]


def hysteresis_trace(branch_lists):
    """Quasi-static continuation along a sequence of branch lists.

    Starts on the lowest branch and at every step keeps the non-unstable branch
    whose photon number is nearest the previous selection; when the followed
    branch disappears this is the jump to the nearest surviving branch.
    """
    out = np.full(len(branch_lists), np.nan)
    prev = None
    for i, branches in enumerate(branch_lists):
        if not branches:
            continue
        candidates = [b for b in branches if b.stability is not Stability.UNSTABLE] or branches
        if prev is None:
            choice = candidates[0]
        else:
            choice = min(candidates, key=lambda b: abs(b.n_s - prev))
        out[i] = prev = choice.n_s
    return out


def _traces(branches, shape):
    """Up (grid order) and down (reverse order, with highest start) traces along axis 0."""
    grid = np.empty(shape, dtype=object)
    for i, b in enumerate(branches):
        grid.flat[i] = b
    grid = grid.reshape(shape[0], -1)
    up = np.empty(grid.shape)
    down = np.empty(grid.shape)
    for j in range(grid.shape[1]):
        column = list(grid[:, j])
        up[:, j] = hysteresis_trace(column)
        flipped = [None if b is None else list(reversed(b)) for b in column[::-1]]
        down[:, j] = hysteresis_trace(flipped)[::-1]
    return up.reshape(shape), down.reshape(shape)


def sweep_1d(params, axis, grid, tol=1e-12, convention="steady", jobs=1):
    _check_axis(axis)
    grid = _check_grid(axis, grid)
    tasks = [(params.replace(**{axis: float(v)}), tol, convention) for v in grid]
    return _assemble([(axis, grid)], _evaluate(tasks, jobs))


def sweep_2d(params, axis1, axis2, grid1, grid2, tol=1e-12, convention="steady", jobs=1):
    """Row-major sweep over axis1 x axis2; traces run along axis1."""
    _check_axis(axis1)
    _check_axis(axis2)
    if axis1 == axis2:
        raise ParameterError("axis2", "the two sweep axes must differ")
    grid1 = _check_grid(axis1, grid1)
    grid2 = _check_grid(axis2, grid2)
    tasks = [(params.replace(**{axis1: float(a), axis2: float(b)}), tol, convention)
             for a in grid1 for b in grid2]
    return _assemble([(axis1, grid1), (axis2, grid2)], _evaluate(tasks, jobs))


def _assemble(axes, results):
    branches = [r for r, _ in results]
    errors = {i: e for i, (_, e) in enumerate(results) if e is not None}
    for i, e in errors.items():
        log.warning("sweep point %d failed: %s", i, e)
    res = SweepResult(axes, branches, errors)
    res.up_trace, res.down_trace = _traces(branches, res.shape)
    return res


# --- folds and bistable windows ---------------------------------------------

def root_count(params, tol=1e-12, convention="steady"):
    return len(steady_state_at(params, tol, convention))


def bisect_fold(params, axis, lo, hi, tol=1e-12, convention="steady", rtol=1e-13):
    """Bisect on root count between two axis values with different counts.

    Returns the bracket (a, b) around the fold with ``a`` on the side of ``lo``.
    """
    count = lambda v: root_count(params.replace(**{axis: v}), tol, convention)
    c_lo, c_hi = count(lo), count(hi)
    if c_lo == c_hi:
        raise ParameterError(axis, "bracket ends have the same root count")
    while abs(hi - lo) > rtol * max(abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count(mid) == c_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


@dataclass(frozen=True)
class BistableWindow:
    axis: str
    lower: float
    upper: float

    @property
    def width(self):
        return self.upper - self.lower if self.upper > self.lower else 0.0

    def contains(self, value):
        return self.lower < value < self.upper


def bistable_window(params, axis, grid, tol=1e-12, convention="steady"):
    """Locate the 3-root interval along ``axis``.

    The grid is scanned for root counts; the first contiguous run of 3-root
    points is widened to its folds by :func:`bisect_fold`.  A run touching the
    grid edge keeps the grid edge.  No 3-root point gives a zero-width window.
    """
    _check_axis(axis)
    grid = np.sort(_check_grid(axis, grid))
    counts = [root_count(params.replace(**{axis: float(v)}), tol, convention) for v in grid]
    three = [i for i, c in enumerate(counts) if c == 3]
    if not three:
        return BistableWindow(axis, math.nan, math.nan)
    first = three[0]
    last = first
    while last + 1 < len(grid) and counts[last + 1] == 3:
        last += 1
    lower = float(grid[first])
    upper = float(grid[last])
    if first > 0:
        lower = bisect_fold(params, axis, float(grid[first]), float(grid[first - 1]), tol, convention)[0]
    if last + 1 < len(grid):
        upper = bisect_fold(params, axis, float(grid[last]), float(grid[last + 1]), tol, convention)[0]
    return BistableWindow(axis, lower, upper)


def eta_folds(params, convention="steady"):
    """Closed-form fold values of eta (ascending) from the critical points of
    g(n) = n[kappa^2 + (Delta_s + B n)^2] - C n^2, where eta^2 = g(n) on every branch.
    Empty when g has no interior maximum on n > 0.
    """
    cubic = build_cubic(params.replace(eta=0.0), convention)
    a, b, c = 3.0 * cubic.a3, 2.0 * cubic.a2, cubic.a1
    disc = b * b - 4.0 * a * c
    if a == 0.0 or disc <= 0.0:
        return []
    s = math.sqrt(disc)
    n_max, n_min = sorted(((-b - s) / (2 * a), (-b + s) / (2 * a)))
    if n_max <= 0.0:
        return []
    g_max, g_min = cubic(n_max), cubic(n_min)
    return [math.sqrt(max(g_min, 0.0)), math.sqrt(g_max)]


def saturation_scan(params, eta_grid, eta_eff_values, tol=1e-12, convention="steady", jobs=1):
    """Bistable eta-window and branches for each transverse drive.

    Returns a SweepResult over (eta, eta_eff), row-major, with ``windows``
    holding one :class:`BistableWindow` per eta_eff value.
    """
    eta_grid = _check_grid("eta", eta_grid)
    eta_eff_values = np.asarray(eta_eff_values, dtype=float)
    if eta_eff_values.ndim != 1 or eta_eff_values.size == 0:
        raise ParameterError("eta_eff", "need at least one transverse drive value")
    tasks = [(params.replace(eta=float(a), eta_eff=float(b)), tol, convention)
             for a in eta_grid for b in eta_eff_values]
    res = _assemble([("eta", eta_grid), ("eta_eff", eta_eff_values)], _evaluate(tasks, jobs))
    res.windows = [bistable_window(params.replace(eta_eff=float(v)), "eta", eta_grid, tol, convention)
                   for v in eta_eff_values]
    return res
