"""Effective potential of the mirror/condensate forces and its critical points.

The force field (F_q, F_Q) is not curl-free unless omega_m = 4 omega_r, so the
potential is defined by a fixed integration path (0,0) -> (q,0) -> (q,Q):

    V(q, Q) = omega_m^2 q^2/2 + (4 omega_r)^2 Q^2/2
              - int_0^q Frad_q(s, 0) ds - int_0^Q Frad_Q(q, s) ds

so that -dV/dQ = F_Q everywhere and -dV/dq = F_q on the line Q = 0.  The
q-leg is a Lorentzian integral in closed form; the Q-leg uses adaptive
Gauss-Kronrod quadrature.
"""

import enum
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .exceptions import QuadratureError
from .forces import adiabatic_force
from .params import signed_delta, steady_factor

log = logging.getLogger(__name__)

QUAD_LIMIT = 500
NEWTON_STEP = 1e-6  # FD Jacobian step, fraction of range span
DEDUP = 1e-5  # duplicate threshold, fraction of range span
DEGENERATE_RTOL = 1e-6
FORCE_ZERO = 1e-9  # accepted |F| for the least-squares fallback, per unit force scale


class PointKind(str, enum.Enum):
    MINIMUM = "Minimum"
    SADDLE = "Saddle"
    MAXIMUM = "Maximum"
    DEGENERATE = "Degenerate"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CriticalPoint:
    q: float
    Q: float
    V: float
    kind: PointKind
    hess_eigs: tuple


@dataclass
class PotentialGrid:
    q: np.ndarray
    Q: np.ndarray
    V: np.ndarray  # shape (len(q), len(Q))
    path: str
    quad_tol: float
    convention: str
    paper_literal_signs: bool = False

    @property
    def spans(self):
        return float(self.q[-1] - self.q[0]), float(self.Q[-1] - self.Q[0])


def _quad(func, a, b, tol, points=None):
    if a == b:
        return 0.0, 0.0
    lo, hi = min(a, b), max(a, b)
    pts = [p for p in (points or ()) if lo < p < hi] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *msg = integrate.quad(func, a, b, epsabs=0.0, epsrel=tol, limit=QUAD_LIMIT,
                                              points=pts, full_output=1)
    # ier 2 (round-off) still returns an estimate at machine precision; accept it
    # when the error bound is consistent with the request
    if msg and not (err <= max(tol, 1e-13) * abs(val) * 10 or err == 0.0):
        raise QuadratureError(f"quadrature on [{a!r}, {b!r}] did not converge: {msg[0]}",
                              estimate=val, error_bound=err)
    return val, err


def q_leg(q, params, convention="steady"):
    """int_0^q Frad_q(s, 0) ds in closed form."""
    kappa = params.kappa
    d0 = signed_delta(params, convention)
    return params.omega_m * params.eta ** 2 / kappa * (
        np.arctan((d0 + params.xi * np.asarray(q)) / kappa) - math.atan(d0 / kappa))


def _q_leg_integrand(q, params, convention):
    a = signed_delta(params, convention) + params.xi * q
    k2 = params.kappa ** 2
    coef = -params.big_omega * params.xi_sm
    eta2, ee2, xs = params.eta ** 2, params.eta_eff ** 2, params.xi_sm

    def frad(s):
        d = a - xs * s
        return coef * (eta2 + ee2 * s * s) / (k2 + d * d)

    return frad, a / xs  # resonance location in Q


def Q_leg(q, Q, params, quad_tol=1e-10, convention="steady"):
    """int_0^Q Frad_Q(q, s) ds by adaptive quadrature; returns (value, error bound)."""
    frad, peak = _q_leg_integrand(q, params, convention)
    return _quad(frad, 0.0, Q, quad_tol, points=[peak])


def harmonic(q, Q, params):
    return 0.5 * params.omega_m ** 2 * q ** 2 + 0.5 * params.big_omega ** 2 * Q ** 2


def effective_potential(q, Q, params, quad_tol=1e-10, convention="steady", paper_literal_signs=False):
    """V(q, Q) along the axis path.

    ``paper_literal_signs`` returns the expression with the signs as printed,
    which equals -V.
    """
    if q == 0.0 and Q == 0.0:
        return 0.0
    value = harmonic(q, Q, params) - float(q_leg(q, params, convention)) - Q_leg(q, Q, params, quad_tol,
                                                                                 convention)[0]
    return -value if paper_literal_signs else value


def _column(q, Q_values, params, quad_tol, convention):
    """Q-leg at fixed q for every value in Q_values, integrating outward from 0."""
    frad, peak = _q_leg_integrand(q, params, convention)
    out = np.empty(len(Q_values))
    order = np.argsort(Q_values)
    Q_sorted = np.asarray(Q_values)[order]
    acc = np.empty(len(Q_values))
    for sign in (1.0, -1.0):
        idx = [i for i in range(len(Q_sorted)) if (Q_sorted[i] >= 0.0) == (sign > 0)]
        if sign < 0:
            idx = idx[::-1]
        total, last = 0.0, 0.0
        for i in idx:
            total += _quad(frad, last, Q_sorted[i], quad_tol, points=[peak])[0]
            last = Q_sorted[i]
            acc[i] = total
    out[order] = acc
    return out


def _grid_row(task):
    qi, Q, params, quad_tol, convention = task
    return harmonic(qi, Q, params) - float(q_leg(qi, params, convention)) - _column(
        qi, Q, params, quad_tol, convention)


def potential_grid(params, q_range=None, Q_range=None, resolution=(101, 101), quad_tol=1e-10,
                   convention="steady", branches=None, paper_literal_signs=False, jobs=1):
    """Sample V on a (q, Q) grid.

    Ranges are widened to contain every steady branch position (``branches``,
    computed when omitted) with a 10% margin.  Each fixed-q column is one
    cumulative quadrature pass; ``jobs > 1`` spreads columns over processes.
    """
    if branches is None:
        from .steady_state import steady_state_at
        branches = steady_state_at(params, convention=convention)
    q_range, Q_range = _bracket_ranges(q_range, Q_range, branches)
    nq, nQ = (resolution, resolution) if np.isscalar(resolution) else resolution
    q = np.linspace(*q_range, int(nq))
    Q = np.linspace(*Q_range, int(nQ))
    tasks = [(float(qi), Q, params, quad_tol, convention) for qi in q]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_grid_row, tasks))
    else:
        rows = [_grid_row(t) for t in tasks]
    V = np.array(rows)
    if paper_literal_signs:
        V = -V
    return PotentialGrid(q, Q, V, "axis:(0,0)->(q,0)->(q,Q)", quad_tol, convention, paper_literal_signs)


def _bracket_ranges(q_range, Q_range, branches):
    qs = [b.q_s for b in branches] + [0.0]
    Qs = [b.Q_s for b in branches] + [0.0]

    def widen(rng, values, name):
        lo, hi = min(values), max(values)
        pad = 0.1 * (hi - lo) if hi > lo else 1.0
        need = (lo - pad, hi + pad)
        if rng is None:
            return need
        rng = (float(min(rng)), float(max(rng)))
        if rng[0] > lo or rng[1] < hi:
            log.info("widening %s range %s to bracket steady positions", name, rng)
            return (min(rng[0], need[0]), max(rng[1], need[1]))
        return rng

    return widen(q_range, qs, "q"), widen(Q_range, Qs, "Q")


# --- critical points ---------------------------------------------------------

def _fd_jacobian(q, Q, params, convention, hq, hQ):
    fp = np.array(adiabatic_force(q + hq, Q, params, convention))
    fm = np.array(adiabatic_force(q - hq, Q, params, convention))
    gp = np.array(adiabatic_force(q, Q + hQ, params, convention))
    gm = np.array(adiabatic_force(q, Q - hQ, params, convention))
    return np.column_stack([(fp - fm) / (2 * hq), (gp - gm) / (2 * hQ)])


def curvature_matrix(q, Q, params, convention="steady", spans=(1.0, 1.0)):
    """Symmetrized mass-weighted Hessian -sym(M^-1 J), M = diag(omega_m, 4 omega_r).

    For eta_eff = 0 the forces are F = -M grad U for a single scalar U, and this
    is exactly the Hessian of U; its eigenvalue signs classify the point.
    """
    jac = _fd_jacobian(q, Q, params, convention, NEWTON_STEP * spans[0], NEWTON_STEP * spans[1])
    scaled = -jac / np.array([[params.omega_m], [params.big_omega]])
    return 0.5 * (scaled + scaled.T)


def classify(eigs, rtol=DEGENERATE_RTOL):
    eigs = np.sort(np.asarray(eigs))
    top = np.max(np.abs(eigs))
    if top == 0.0 or np.min(np.abs(eigs)) <= rtol * top:
        return PointKind.DEGENERATE
    if eigs[0] > 0:
        return PointKind.MINIMUM
    if eigs[-1] < 0:
        return PointKind.MAXIMUM
    return PointKind.SADDLE


def _newton(q, Q, params, convention, spans, tol, max_iter=100):
    hq, hQ = NEWTON_STEP * spans[0], NEWTON_STEP * spans[1]
    for _ in range(max_iter):
        f = np.array(adiabatic_force(q, Q, params, convention))
        jac = _fd_jacobian(q, Q, params, convention, hq, hQ)
        try:
            dq, dQ = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        q, Q = q + dq, Q + dQ
        if not (math.isfinite(q) and math.isfinite(Q)):
            return None
        if abs(dq) <= tol * spans[0] and abs(dQ) <= tol * spans[1]:
            return q, Q
    return None


def _force_scale(params, spans):
    return params.omega_m ** 2 * spans[0], params.big_omega ** 2 * spans[1]


def _seed_cells(grid, params, convention):
    """Cells where both force components change sign, plus grid-local minima of |F|.

    The minima catch tangent nullclines at a fold, where neither component
    changes sign across a cell.
    """
    qq, QQ = np.meshgrid(grid.q, grid.Q, indexing="ij")
    fq, fQ = adiabatic_force(qq, QQ, params, convention)

    def changes(f):
        s = np.sign(f)
        corners = np.stack([s[:-1, :-1], s[1:, :-1], s[:-1, 1:], s[1:, 1:]])
        return (corners.max(axis=0) >= 0) & (corners.min(axis=0) <= 0)

    cells = np.argwhere(changes(fq) & changes(fQ))
    seeds = [(0.5 * (grid.q[i] + grid.q[i + 1]), 0.5 * (grid.Q[j] + grid.Q[j + 1])) for i, j in cells]
    sq, sQ = _force_scale(params, grid.spans)
    r = np.hypot(fq / sq, fQ / sQ)
    padded = np.pad(r, 1, constant_values=np.inf)
    neighbours = np.stack([padded[1 + a:padded.shape[0] - 1 + a, 1 + b:padded.shape[1] - 1 + b]
                           for a in (-1, 0, 1) for b in (-1, 0, 1) if a or b])
    for i, j in np.argwhere(r < neighbours.min(axis=0)):
        seeds.append((float(grid.q[i]), float(grid.Q[j])))
    return seeds


def _least_squares(q, Q, params, convention, spans, tol):
    """Fallback for a singular Jacobian: minimize the scaled force, accept a zero."""
    sq, sQ = _force_scale(params, spans)

    def resid(x):
        fq, fQ = adiabatic_force(q + x[0] * spans[0], Q + x[1] * spans[1], params, convention)
        return [fq / sq, fQ / sQ]

    sol = optimize.least_squares(resid, [0.0, 0.0], xtol=tol, ftol=tol, gtol=tol, method="lm")
    if not sol.success or np.hypot(*sol.fun) > FORCE_ZERO:
        return None
    return q + sol.x[0] * spans[0], Q + sol.x[1] * spans[1]


def find_critical_points(grid, params, tol=1e-12, convention=None):
    """Zeros of the force field seeded from sign-change cells, classified by curvature."""
    convention = convention or grid.convention
    spans = grid.spans
    found = []
    for seed in _seed_cells(grid, params, convention):
        hit = _newton(*seed, params, convention, spans, tol)
        if hit is None:
            hit = _least_squares(*seed, params, convention, spans, tol)
        if hit is None:
            log.debug("Newton from seed %s did not converge", seed)
            continue
        lo_q, hi_q = grid.q[0] - 0.5 * spans[0], grid.q[-1] + 0.5 * spans[0]
        lo_Q, hi_Q = grid.Q[0] - 0.5 * spans[1], grid.Q[-1] + 0.5 * spans[1]
        if not (lo_q <= hit[0] <= hi_q and lo_Q <= hit[1] <= hi_Q):
            continue
        if any(abs(hit[0] - p[0]) <= DEDUP * spans[0] and abs(hit[1] - p[1]) <= DEDUP * spans[1]
               for p in found):
            continue
        found.append(hit)
    out = []
    for q, Q in sorted(found, key=lambda p: p[0]):
        eigs = tuple(float(e) for e in np.linalg.eigvalsh(curvature_matrix(q, Q, params, convention, spans)))
        V = effective_potential(q, Q, params, grid.quad_tol, convention, grid.paper_literal_signs)
        out.append(CriticalPoint(float(q), float(Q), V, classify(eigs), eigs))
    return out


# --- steady-state potential versus photon number -------------------------------

def v_s_of_n(params, n_grid, quad_tol=1e-10):
    """Steady-state potential along the photon number, evaluated as printed.

    The two integrals carry eta^2 - eta_eff^2 (...)^2 in the numerator and
    differ in the sign of the condensate pull in their denominators; both are
    kept literally.  Returns (n, V_s, err_bound) arrays, the bound being the
    accumulated quadrature error estimate.
    """
    n_grid = np.asarray(n_grid, dtype=float)
    if n_grid.ndim != 1 or np.any(n_grid < 0) or np.any(np.diff(n_grid) < 0):
        raise ValueError("n_grid must be a non-negative ascending 1D array")
    f = steady_factor(params)
    big = params.big_omega
    xi, xs, wm = params.xi, params.xi_sm, params.omega_m
    k2, eta2, ee2, delta = params.kappa ** 2, params.eta ** 2, params.eta_eff ** 2, params.delta

    def integrand(m):
        a = xs * m / (big * f)
        num = eta2 - ee2 * a * a
        mirror = delta + xi * xi * m / wm
        return (xi * xi * num / (k2 + (mirror + xs * a) ** 2)
                + xs * xs / f * num / (k2 + (mirror - xs * a) ** 2))

    # resonances of the two denominators, useful as quadrature breakpoints
    pull1 = xi * xi / wm + xs * xs / (big * f)
    pull2 = xi * xi / wm - xs * xs / (big * f)
    peaks = [-delta / p for p in (pull1, pull2) if p != 0.0 and -delta / p > 0.0]

    harm = -wm * (xi * n_grid) ** 2 / 2.0 + big * (xs * n_grid) ** 2 / (2.0 * f * f)
    acc = np.empty_like(n_grid)
    err = np.empty_like(n_grid)
    total = total_err = 0.0
    last = 0.0
    for i, n in enumerate(n_grid):
        val, e = _quad(integrand, last, n, quad_tol, points=peaks)
        total += val
        total_err += e
        acc[i], err[i] = total, total_err
        last = n
    return n_grid, harm + acc, err
