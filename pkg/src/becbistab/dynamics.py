"""Deterministic mean-field dynamics of the mirror and the condensate side mode.

Two models are integrated:

* the adiabatic 4D system (q, q', Q, Q') in which the cavity field follows the
  mechanics instantly, with optional velocity damping;
* the full 6D system (Re c, Im c, p, q, P, Q) of the Langevin equations with
  the noise operators dropped.

Time is measured in units of omega_m * t throughout: ``t_end``, ``dt`` and
``sample_interval`` are dimensionless and the returned grid is omega_m * t.
Velocities q', Q' are derivatives with respect to physical time.
"""

from dataclasses import dataclass, field

import numpy as np

from .cubic import PhotonCubic, find_roots
from .exceptions import ParameterError
from .forces import adiabatic_force, photon_number
from .integrators import integrate_dopri, integrate_rk4
from .params import TWO_PI, signed_delta

METHODS = ("rk4", "rk45-adaptive")
DEFAULT_DT = TWO_PI / 1000.0
DEFAULT_SAMPLE = TWO_PI / 50.0

__all__ = [
    "MechState", "FullState", "Trajectory", "adiabatic_force",
    "integrate_adiabatic", "integrate_full", "langevin_fixed_point", "full_state_from_branch",
    "mirror_energy", "max_amplitudes",
]


@dataclass(frozen=True)
class MechState:
    q: float = 0.0
    q_dot: float = 0.0
    Q: float = 0.0
    Q_dot: float = 0.0

    def as_list(self):
        return [self.q, self.q_dot, self.Q, self.Q_dot]


@dataclass(frozen=True)
class FullState:
    c_re: float = 0.0
    c_im: float = 0.0
    p: float = 0.0
    q: float = 0.0
    P: float = 0.0
    Q: float = 0.0

    @property
    def photon_number(self):
        return self.c_re ** 2 + self.c_im ** 2

    def as_list(self):
        return [self.c_re, self.c_im, self.p, self.q, self.P, self.Q]


@dataclass
class Trajectory:
    """Sampled trajectory.

    ``states`` has one row per sample with columns named in ``labels``;
    ``mech`` always holds (q, q', Q, Q') so adiabatic and full runs share a layout.
    """

    times: np.ndarray
    states: np.ndarray
    labels: tuple
    mech: np.ndarray
    photon_number: np.ndarray
    method: str
    dt: float
    model: str
    stats: dict = field(default_factory=dict)

    @property
    def q(self):
        return self.mech[:, 0]

    @property
    def Q(self):
        return self.mech[:, 2]

    def window(self, t_lo, t_hi):
        keep = (self.times >= t_lo) & (self.times <= t_hi)
        return self.mech[keep]


def _run(rhs, y0, t_end, dt, method, sample_interval, rtol, atol):
    if t_end <= 0:
        raise ParameterError("t_end", "must be positive")
    if dt <= 0:
        raise ParameterError("dt", "must be positive")
    if method == "rk4":
        times, states = integrate_rk4(rhs, y0, t_end, dt, sample_interval)
        return times, states, {}
    if method == "rk45-adaptive":
        times, states, acc, rej = integrate_dopri(rhs, y0, t_end, sample_interval, rtol, atol, h0=dt)
        return times, states, {"accepted_steps": acc, "rejected_steps": rej}
    raise ParameterError("method", f"expected one of {METHODS}, got {method!r}")


def integrate_adiabatic(initial, params, t_end, dt=DEFAULT_DT, method="rk4", sample_interval=DEFAULT_SAMPLE,
                        convention="dynamics", rtol=1e-10, atol=1e-12, forcing=None):
    """Integrate the damped adiabatic equations of motion from ``initial``.

    ``forcing(tau, state)``, if given, returns four terms added to the physical
    time derivative of (q, q', Q, Q').
    """
    wm, big = params.omega_m, params.big_omega
    delta_s = signed_delta(params, convention)
    xi, xi_sm, kappa2 = params.xi, params.xi_sm, params.kappa ** 2
    eta2, eta_eff2 = params.eta ** 2, params.eta_eff ** 2
    gm, gsm = params.gamma_m, params.gamma_sm
    inv_wm = 1.0 / wm

    def rhs(tau, y):
        q, qd, Q, Qd = y
        d = delta_s + xi * q - xi_sm * Q
        n = (eta2 + eta_eff2 * Q * Q) / (kappa2 + d * d)
        out = [qd, -wm * wm * q + wm * xi * n - gm * qd, Qd, -big * big * Q - big * xi_sm * n - gsm * Qd]
        if forcing is not None:
            out = [a + b for a, b in zip(out, forcing(tau, y))]
        return [v * inv_wm for v in out]

    times, states, stats = _run(rhs, initial.as_list(), t_end, dt, method, sample_interval, rtol, atol)
    mech = np.array(states)
    n = photon_number(mech[:, 0], mech[:, 2], params, convention)
    return Trajectory(np.array(times), mech, ("q", "q_dot", "Q", "Q_dot"), mech, n, method, dt, "adiabatic",
                      stats)


def integrate_full(initial, params, t_end, dt=DEFAULT_DT, method="rk4", sample_interval=DEFAULT_SAMPLE,
                   convention="dynamics", rtol=1e-10, atol=1e-12, forcing=None):
    """Integrate the six mean-field equations (cavity quadratures, mirror, condensate).

    The mirror momentum equation carries +xi |c|^2 so that q = xi n / omega_m is
    a fixed point.  ``forcing`` works as in :func:`integrate_adiabatic` on the
    six components.
    """
    wm, big = params.omega_m, params.big_omega
    delta_s = signed_delta(params, convention)
    xi, xi_sm, kappa = params.xi, params.xi_sm, params.kappa
    eta, eta_eff = params.eta, params.eta_eff
    gm, gsm = params.gamma_m, params.gamma_sm
    inv_wm = 1.0 / wm

    def rhs(tau, y):
        x, v, p, q, P, Q = y
        d = delta_s + xi * q - xi_sm * Q
        n = x * x + v * v
        out = [
            -d * v - kappa * x + eta,
            d * x - kappa * v + eta_eff * Q,
            -wm * q + xi * n - gm * p,
            wm * p,
            -big * Q - xi_sm * n - gsm * P,
            big * P - gsm * Q,
        ]
        if forcing is not None:
            out = [a + b for a, b in zip(out, forcing(tau, y))]
        return [val * inv_wm for val in out]

    times, states, stats = _run(rhs, initial.as_list(), t_end, dt, method, sample_interval, rtol, atol)
    arr = np.array(states)
    p, q, P, Q = arr[:, 2], arr[:, 3], arr[:, 4], arr[:, 5]
    mech = np.column_stack([q, wm * p, Q, big * P - gsm * Q])
    n = arr[:, 0] ** 2 + arr[:, 1] ** 2
    return Trajectory(np.array(times), arr, ("c_re", "c_im", "p", "q", "P", "Q"), mech, n, method, dt, "full",
                      stats)


def full_state_from_branch(branch, params, convention="dynamics"):
    """Cavity amplitude c = (eta + i eta_eff Q) / (kappa - i d) attached to a branch."""
    d = signed_delta(params, convention) + params.xi * branch.q_s - params.xi_sm * branch.Q_s
    c = complex(params.eta, params.eta_eff * branch.Q_s) / complex(params.kappa, -d)
    return FullState(c.real, c.imag, 0.0, branch.q_s, branch.P_s, branch.Q_s)


def langevin_fixed_point(n_guess, params, convention="dynamics"):
    """Exact fixed point of the six mean-field equations nearest ``n_guess`` photons.

    With condensate damping the Langevin equations give
    Q = -xi_sm n Omega / (Omega^2 + gamma_sm^2), which differs at O(gamma_sm / Omega)
    from the steady-state expression built on 1 - gamma_sm / Omega; the photon
    number solves the corresponding cubic.
    """
    big, g = params.big_omega, params.gamma_sm
    q_per = params.xi / params.omega_m
    qq_per = params.xi_sm * big / (big * big + g * g)
    b = params.xi * q_per + params.xi_sm * qq_per
    c = (params.eta_eff * qq_per) ** 2
    delta = signed_delta(params, convention)
    cubic = PhotonCubic(b * b, 2.0 * delta * b - c, params.kappa ** 2 + delta ** 2, -params.eta ** 2)
    roots, _ = find_roots(cubic)
    n = min(roots, key=lambda r: abs(r - n_guess))
    q, Q = q_per * n, -qq_per * n
    d = delta + params.xi * q - params.xi_sm * Q
    amp = complex(params.eta, params.eta_eff * Q) / complex(params.kappa, -d)
    return FullState(amp.real, amp.imag, 0.0, q, g * Q / big, Q)


def mirror_energy(q, q_dot, Q, params, convention="dynamics"):
    """Energy of the mirror at frozen condensate position Q.

    E = q'^2/2 + omega_m^2 q^2/2 - omega_m xi int_0^q R(s, Q) ds, with the
    Lorentzian integral in closed form.
    """
    kappa = params.kappa
    d0 = signed_delta(params, convention) - params.xi_sm * Q
    num = params.eta ** 2 + (params.eta_eff * Q) ** 2
    work = params.omega_m * num / kappa * (np.arctan((d0 + params.xi * q) / kappa) - np.arctan(d0 / kappa))
    return 0.5 * q_dot ** 2 + 0.5 * params.omega_m ** 2 * q ** 2 - work


def max_amplitudes(traj, t_lo=0.0, t_hi=100.0):
    """max|q| and max|Q| over omega_m t in [t_lo, t_hi]."""
    w = traj.window(t_lo, t_hi)
    return float(np.max(np.abs(w[:, 0]))), float(np.max(np.abs(w[:, 2])))
