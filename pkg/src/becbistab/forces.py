"""Adiabatic radiation-pressure forces on the mirror (q) and condensate (Q).

With the cavity field slaved to the mechanics, the accelerations are

    q'' = -omega_m^2 q + omega_m xi R(q, Q)
    Q'' = -(4 omega_r)^2 Q - 4 omega_r xi_sm R(q, Q)

where R = (eta^2 + eta_eff^2 Q^2) / (kappa^2 + d^2) is the adiabatic photon
number and d = Delta_s + xi q - xi_sm Q.  ``Delta_s`` is the detuning with the
sign fixed by the convention (see :func:`becbistab.params.signed_delta`).
"""

import numpy as np

from .params import signed_delta


def photon_number(q, Q, params, convention="dynamics"):
    """Adiabatic intra-cavity photon number at mechanical positions (q, Q)."""
    d = signed_delta(params, convention) + params.xi * q - params.xi_sm * Q
    return (params.eta ** 2 + (params.eta_eff * Q) ** 2) / (params.kappa ** 2 + d * d)


def radiation_forces(q, Q, params, convention="dynamics"):
    """Radiation-pressure parts of the two accelerations."""
    n = photon_number(q, Q, params, convention)
    return params.omega_m * params.xi * n, -params.big_omega * params.xi_sm * n


def adiabatic_force(q, Q, params, convention="dynamics"):
    """Total accelerations (F_q, F_Q) of the undamped adiabatic equations of motion."""
    rq, rQ = radiation_forces(q, Q, params, convention)
    return -params.omega_m ** 2 * q + rq, -params.big_omega ** 2 * Q + rQ


def force_jacobian(q, Q, params, convention="dynamics"):
    """Analytic 2x2 Jacobian d(F_q, F_Q)/d(q, Q)."""
    kappa2 = params.kappa ** 2
    d = signed_delta(params, convention) + params.xi * q - params.xi_sm * Q
    den = kappa2 + d * d
    num = params.eta ** 2 + (params.eta_eff * Q) ** 2
    dn_dq = -num * 2.0 * d * params.xi / den ** 2
    dn_dQ = 2.0 * params.eta_eff ** 2 * Q / den + num * 2.0 * d * params.xi_sm / den ** 2
    wm, big = params.omega_m, params.big_omega
    return np.array([
        [-wm ** 2 + wm * params.xi * dn_dq, wm * params.xi * dn_dQ],
        [-big * params.xi_sm * dn_dq, -big ** 2 - big * params.xi_sm * dn_dQ],
    ])
