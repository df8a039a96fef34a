"""Photon-number self-consistency cubic and its non-negative real roots.

Substituting the steady mirror and condensate positions into the adiabatic
photon number gives

    f(n) = n [kappa^2 + (Delta_s + B n)^2] - eta^2 - C n^2 = 0

with B, C from :func:`becbistab.params.derived`.  Roots are seeded by the
trigonometric / Cardano closed form and polished inside monotone brackets
delimited by the critical points of f, so each bracket holds at most one root.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DegeneratePolynomialError
from .params import derived, signed_delta

MERGE_RTOL = 1e-8
MAX_ITER = 200
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PhotonCubic:
    a3: float
    a2: float
    a1: float
    a0: float

    @property
    def coefficients(self):
        return (self.a3, self.a2, self.a1, self.a0)

    def __call__(self, n):
        return ((self.a3 * n + self.a2) * n + self.a1) * n + self.a0

    def derivative(self, n):
        return (3.0 * self.a3 * n + 2.0 * self.a2) * n + self.a1

    def scale(self, n=0.0):
        """Residual scale max|a_i| * max(1, |n|)^3."""
        return max(abs(c) for c in self.coefficients) * max(1.0, abs(n)) ** 3

    def residual_ok(self, n, tol):
        return abs(self(n)) <= tol * self.scale(n)


def build_cubic(params, convention="steady"):
    coeffs = derived(params)
    b, c = coeffs.b_shift, coeffs.c_gain
    delta = signed_delta(params, convention)
    return PhotonCubic(
        a3=b * b,
        a2=2.0 * delta * b - c,
        a1=params.kappa ** 2 + delta ** 2,
        a0=-params.eta ** 2,
    )


def closed_form_roots(a3, a2, a1, a0):
    """All real roots of a3 x^3 + a2 x^2 + a1 x + a0 (a3 != 0), unpolished."""
    b, c, d = a2 / a3, a1 / a3, a0 / a3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0.0 and disc <= 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        return sorted(m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3))
    s = math.sqrt(max(disc, 0.0))
    u = math.copysign(abs(-q / 2.0 + s) ** (1.0 / 3.0), -q / 2.0 + s)
    v = math.copysign(abs(-q / 2.0 - s) ** (1.0 / 3.0), -q / 2.0 - s)
    return [u + v - shift]


def _quadratic_roots(a, b, c):
    if a == 0.0:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return []
    if disc == 0.0:
        return [-b / (2.0 * a)]
    s = math.sqrt(disc)
    # stable pair: avoid cancellation in -b +/- s
    t = -0.5 * (b + math.copysign(s, b))
    roots = [t / a, c / t] if t != 0.0 else [0.0, 0.0]
    return sorted(roots)


def _noise_floor(cubic, x):
    """Rounding-error bound of the Horner evaluation at x."""
    ax = abs(x)
    return 8.0 * EPS * (((abs(cubic.a3) * ax + abs(cubic.a2)) * ax + abs(cubic.a1)) * ax + abs(cubic.a0))


def _polish(f, df, lo, hi, guess, f_lo):
    """Safeguarded Newton inside a sign-change bracket [lo, hi]."""
    x = guess if lo < guess < hi else 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        fx = f(x)
        if fx == 0.0 or abs(fx) <= _noise_floor(f, x):
            return x
        if (fx < 0.0) == (f_lo < 0.0):
            lo, f_lo = x, fx
        else:
            hi = x
        dfx = df(x)
        step_ok = False
        if dfx != 0.0:
            x_new = x - fx / dfx
            step_ok = lo <= x_new <= hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if x_new == x or hi - lo <= 4.0 * math.ulp(max(abs(lo), abs(hi))):
            return x_new
        x = x_new
    raise ConvergenceError("root polish did not converge", best=x)


def find_roots(cubic, tol=1e-12):
    """Non-negative real roots with multiplicity flags.

    Returns ``(roots, double)`` where ``double[i]`` marks a merged double root.
    """
    a3, a2, a1, a0 = cubic.coefficients
    if a3 == a2 == a1 == a0 == 0.0:
        raise DegeneratePolynomialError("all cubic coefficients are zero")
    if a3 == 0.0:
        candidates = _quadratic_roots(a2, a1, a0)
        roots = [r for r in candidates if r >= 0.0]
        double = [len(candidates) == 1 and a2 != 0.0] * len(roots)
        return roots, double

    f, df = cubic, cubic.derivative
    seeds = closed_form_roots(a3, a2, a1, a0)
    crit = _quadratic_roots(3.0 * a3, 2.0 * a2, a1)
    # monotone pieces of f on [0, inf)
    bounds = [0.0] + [c for c in crit if c > 0.0]
    upper = 1.0 + max(abs(a2), abs(a1), abs(a0)) / abs(a3)  # Cauchy bound
    bounds.append(max(upper, bounds[-1] * 2.0 + 1.0))

    roots, double = [], []
    for c in crit:
        if c >= 0.0 and cubic.residual_ok(c, tol) and _is_double(cubic, c, tol):
            roots.append(c)
            double.append(True)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        f_lo, f_hi = f(lo), f(hi)
        if any(abs(r - lo) <= _merge_tol(r) or abs(r - hi) <= _merge_tol(r) for r in roots):
            # the bracket end is a merged double root; it owns this sign pattern
            continue
        if f_lo == 0.0:
            roots.append(lo)
            double.append(False)
            continue
        if (f_lo < 0.0) == (f_hi < 0.0) or f_hi == 0.0 and hi != bounds[-1]:
            continue
        inside = [s for s in seeds if lo < s < hi]
        guess = inside[0] if inside else 0.5 * (lo + hi)
        r = _polish(f, df, lo, hi, guess, f_lo)
        if not cubic.residual_ok(r, tol):
            raise ConvergenceError(f"residual {abs(f(r)):.3e} above tolerance at n={r!r}", best=r)
        roots.append(r)
        double.append(False)

    order = sorted(range(len(roots)), key=roots.__getitem__)
    roots = [roots[i] for i in order]
    double = [double[i] for i in order]
    return _merge_close(roots, double)


def _merge_tol(r):
    return MERGE_RTOL * max(abs(r), 1e-300)


def _is_double(cubic, c, tol):
    """A critical point whose value is zero to the residual tolerance is a double root.

    The test is made relative to the local quadratic width: a root pair closer
    than the merge tolerance counts as one.
    """
    curv = abs(3.0 * cubic.a3 * c + cubic.a2)  # f''/2
    if curv == 0.0:
        return True
    half_gap = math.sqrt(abs(cubic(c)) / curv)
    return half_gap <= 0.5 * _merge_tol(c) or cubic(c) == 0.0


def _merge_close(roots, double):
    out_r, out_d = [], []
    for r, d in zip(roots, double):
        if out_r and abs(r - out_r[-1]) <= _merge_tol(max(r, out_r[-1])):
            out_d[-1] = True
            continue
        out_r.append(r)
        out_d.append(d)
    return out_r, out_d


def solve_cubic(cubic, tol=1e-12):
    """Ascending non-negative real roots of the photon cubic (double roots once)."""
    return find_roots(cubic, tol)[0]


def grid_scan_roots(cubic, n_points=10 ** 6, n_max=None):
    """Brute-force oracle: sign changes on a dense geometric grid, refined by bisection.

    Independent of the closed form and of the critical-point brackets.  Roots at
    exactly zero are reported when f(0) == 0.
    """
    a3, a2, a1, a0 = cubic.coefficients
    if n_max is None:
        lead = a3 if a3 != 0.0 else (a2 if a2 != 0.0 else a1)
        n_max = 1.0 + max(abs(c) for c in cubic.coefficients) / abs(lead)
    grid = np.concatenate(([0.0], np.geomspace(n_max * 1e-15, n_max, n_points)))
    vals = ((a3 * grid + a2) * grid + a1) * grid + a0
    roots = [0.0] if vals[0] == 0.0 else []
    sign = np.sign(vals)
    idx = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    exact = np.nonzero(sign[1:] == 0)[0] + 1
    for i in exact:
        roots.append(float(grid[i]))
    for i in idx:
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = cubic(lo)
        while True:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            f_mid = cubic(mid)
            if f_mid == 0.0:
                lo = hi = mid
                break
            if (f_mid < 0.0) == (f_lo < 0.0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return sorted(set(roots))
