"""Explicit Runge-Kutta integrators for small ODE systems.

States are plain lists of floats; for 4-6 component systems this is several
times faster than small numpy arrays.  Both integrators sample the solution at
a fixed output interval independent of the internal step.
"""

import math

from .exceptions import DivergenceError, StiffnessError

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def _check_finite(t, y, last_t, last_y):
    if not all(math.isfinite(v) for v in y):
        raise DivergenceError(f"non-finite state at t={t!r}", last_time=last_t, last_state=list(last_y))


def rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, [a + 0.5 * h * b for a, b in zip(y, k1)])
    k3 = f(t + 0.5 * h, [a + 0.5 * h * b for a, b in zip(y, k2)])
    k4 = f(t + h, [a + h * b for a, b in zip(y, k3)])
    return [a + h / 6.0 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


def _sample_times(t_end, interval):
    n = max(1, int(round(t_end / interval)))
    if abs(n * interval - t_end) > 1e-9 * t_end:
        n = int(math.floor(t_end / interval))
        times = [i * interval for i in range(n + 1)]
        if times[-1] < t_end:
            times.append(t_end)
        return times
    return [t_end * i / n for i in range(n + 1)]


def integrate_rk4(f, y0, t_end, dt, sample_interval):
    """Fixed-step classical RK4 from t=0 to t_end.

    Samples every ``round(sample_interval / dt)`` steps and at t_end.
    Returns (times, states).
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be positive")
    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    stride = max(1, int(round(sample_interval / dt)))
    y = [float(v) for v in y0]
    times, states = [0.0], [list(y)]
    t = 0.0
    for i in range(1, n_steps + 1):
        h = dt if i < n_steps else t_end - (n_steps - 1) * dt
        y_new = rk4_step(f, t, y, h)
        t_new = t_end if i == n_steps else i * dt
        _check_finite(t_new, y_new, t, y)
        y, t = y_new, t_new
        if i % stride == 0 or i == n_steps:
            times.append(t)
            states.append(list(y))
    return times, states


def dopri_step(f, t, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        yi = [yv + h * sum(a * k[j] for a, k in zip(_A[i], ks)) for j, yv in enumerate(y)]
        ks.append(f(t + _C[i] * h, yi))
    y_new = [yv + h * sum(b * k[j] for b, k in zip(_B5, ks)) for j, yv in enumerate(y)]
    err = [h * sum(e * k[j] for e, k in zip(_E, ks)) for j in range(len(y))]
    return y_new, err, ks[6]  # FSAL: last stage is f(t+h, y_new)


def integrate_dopri(f, y0, t_end, sample_interval, rtol=1e-9, atol=1e-12, h0=None, max_steps=10 ** 7):
    """Adaptive Dormand-Prince 5(4); steps are clipped to land on the sample times.

    Returns (times, states, n_accepted, n_rejected).
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    targets = _sample_times(t_end, sample_interval)
    y = [float(v) for v in y0]
    t = 0.0
    k1 = f(t, y)
    h = h0 if h0 else min(sample_interval, t_end) * 1e-3
    times, states = [0.0], [list(y)]
    accepted = rejected = 0
    for target in targets[1:]:
        while t < target:
            if accepted + rejected > max_steps:
                raise StiffnessError(f"step budget exhausted at t={t!r}")
            h_try = min(h, target - t)
            if h_try <= 16.0 * math.ulp(max(abs(t), 1.0)):
                raise StiffnessError(f"step size underflow (h={h_try!r}) at t={t!r}")
            y_new, err, k_new = dopri_step(f, t, y, h_try, k1)
            norm = max(abs(e) / (atol + rtol * max(abs(a), abs(b))) for e, a, b in zip(err, y, y_new))
            if not math.isfinite(norm):
                _check_finite(t + h_try, y_new, t, y)
                norm = 1e10
            if norm <= 1.0:
                t = target if h_try == target - t else t + h_try
                y, k1 = y_new, k_new
                accepted += 1
                factor = 5.0 if norm == 0.0 else min(5.0, 0.9 * norm ** -0.2)
            else:
                rejected += 1
                factor = max(0.2, 0.9 * norm ** -0.2)
            # keep the natural step when the last one was clipped to a sample time
            h = max(h, h_try) * factor if norm <= 1.0 else h_try * factor
        times.append(t)
        states.append(list(y))
    return times, states, accepted, rejected
