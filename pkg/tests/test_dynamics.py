import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from becbistab.dynamics import (FullState, MechState, full_state_from_branch, integrate_adiabatic,
                                integrate_full, langevin_fixed_point, max_amplitudes, mirror_energy)
from becbistab.exceptions import DivergenceError, ParameterError, StiffnessError
from becbistab.forces import adiabatic_force, force_jacobian, photon_number
from becbistab.integrators import integrate_dopri, integrate_rk4
from becbistab.params import FIG5_DELTA, FIG5_ETA, SystemParams
from becbistab.steady_state import Stability, steady_state_at

T = 2.0 * math.pi  # one mirror period in omega_m t


@pytest.fixture(scope="module")
def fig5():
    from becbistab import preset
    return preset("paper-2015").replace(eta=FIG5_ETA, delta=FIG5_DELTA)


def harmonic_params():
    return SystemParams(eta=0.0, eta_eff=0.0, kappa=1.0, delta=0.0, omega_m=1.0, omega_r=0.25, xi=1.0, xi_sm=1.0)


# --- forces --------------------------------------------------------------------

def test_force_dark_origin(base):
    assert adiabatic_force(0.0, 0.0, base.replace(eta=0.0)) == (0.0, 0.0)


def test_force_signs_at_origin(base):
    p = base.with_ratios(eta=5.0)
    fq, fQ = adiabatic_force(0.0, 0.0, p)
    n0 = p.eta ** 2 / (p.kappa ** 2 + p.delta ** 2)
    assert fq == pytest.approx(p.omega_m * p.xi * n0, rel=1e-14) and fq > 0
    assert fQ == pytest.approx(-p.big_omega * p.xi_sm * n0, rel=1e-14) and fQ < 0


def test_force_hand_value():
    p = SystemParams(eta=1.0, eta_eff=0.0, kappa=1.0, delta=0.0, omega_m=1.0, omega_r=1.0, xi=1.0, xi_sm=0.0)
    assert adiabatic_force(1.0, 0.0, p)[0] == pytest.approx(-0.5, rel=1e-15)


def test_force_independent_implementation(base):
    p = base.with_ratios(eta=7.0, eta_eff=3.0)
    for q, Q in [(1e-4, -0.3), (-2e-4, 0.7), (0.0, -1.0)]:
        d = p.delta + p.xi * q - p.xi_sm * Q
        n = (p.eta ** 2 + p.eta_eff ** 2 * Q ** 2) / (p.kappa ** 2 + d ** 2)
        fq, fQ = adiabatic_force(q, Q, p, "dynamics")
        assert fq == pytest.approx(-p.omega_m ** 2 * q + p.omega_m * p.xi * n, rel=1e-12)
        assert fQ == pytest.approx(-(4 * p.omega_r) ** 2 * Q - 4 * p.omega_r * p.xi_sm * n, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1e-3, 1e-3), st.floats(-1.5, 0.5), st.sampled_from(["steady", "dynamics"]))
def test_force_jacobian_fd(q, Q, convention):
    from becbistab import preset
    p = preset("paper-2015").with_ratios(eta=10.0, eta_eff=50.0)
    jac = force_jacobian(q, Q, p, convention)
    hq, hQ = 1e-9, 1e-5
    fd = np.empty((2, 2))
    for j, (dq, dQ) in enumerate(((hq, 0.0), (0.0, hQ))):
        plus = np.array(adiabatic_force(q + dq, Q + dQ, p, convention))
        minus = np.array(adiabatic_force(q - dq, Q - dQ, p, convention))
        fd[:, j] = (plus - minus) / (2 * (dq + dQ))
    scale = np.abs(jac).max(axis=1, keepdims=True)
    assert np.all(np.abs(fd - jac) <= 1e-5 * scale)


# --- harmonic limit and integrator order ----------------------------------------

def test_harmonic_limit_cosine():
    tr = integrate_adiabatic(MechState(q=1.0), harmonic_params(), 10 * T, dt=T / 1000, sample_interval=T / 50)
    assert np.max(np.abs(tr.q - np.cos(tr.times))) < 1e-6
    assert np.all(tr.Q == 0.0)


def test_rk4_fourth_order():
    errs = []
    for dt in (T / 50, T / 100, T / 200):
        tr = integrate_adiabatic(MechState(q=1.0), harmonic_params(), 10 * T, dt=dt, sample_interval=T / 10)
        errs.append(np.max(np.abs(tr.q - np.cos(tr.times))))
    for a, b in zip(errs, errs[1:]):
        assert 8.0 <= a / b <= 32.0


def test_dopri_harmonic():
    tr = integrate_adiabatic(MechState(q=1.0), harmonic_params(), 10 * T, method="rk45-adaptive",
                             sample_interval=T / 50, rtol=1e-10, atol=1e-12)
    assert np.max(np.abs(tr.q - np.cos(tr.times))) < 1e-8
    assert tr.stats["accepted_steps"] > 0
    assert np.allclose(np.diff(tr.times), T / 50)


def test_trajectory_grid(fig5):
    tr = integrate_adiabatic(MechState(), fig5, 10.0, sample_interval=0.5)
    assert np.all(np.diff(tr.times) > 0)
    assert len(tr.times) == len(tr.mech) == len(tr.photon_number) == 21
    assert tr.times[-1] == 10.0


def test_generic_integrators_agree():
    f = lambda t, y: [y[1], -y[0]]
    t1, y1 = integrate_rk4(f, [1.0, 0.0], 3.0, 1e-3, 0.5)
    t2, y2, _, _ = integrate_dopri(f, [1.0, 0.0], 3.0, 0.5, 1e-11, 1e-13)
    assert t1 == pytest.approx(t2)
    assert np.allclose(y1, y2, atol=1e-10)


# --- conservation -----------------------------------------------------------------

def test_frozen_q_energy_conservation(fig5):
    Q0 = -3.0

    def pin(tau, y):
        return [0.0, 0.0, 0.0, -adiabatic_force(y[0], y[2], fig5)[1]]

    tr = integrate_adiabatic(MechState(Q=Q0), fig5, 100 * T, dt=T / 1000, sample_interval=T / 10, forcing=pin)
    assert np.all(tr.Q == Q0)
    energy = mirror_energy(tr.q, tr.mech[:, 1], tr.Q, fig5)
    scale = 0.5 * np.max(tr.mech[:, 1] ** 2)
    assert np.max(np.abs(energy - energy[0])) / scale < 1e-6


def test_time_reversal(fig5):
    dt = T / 2000
    fwd = integrate_adiabatic(MechState(), fig5, 100.0, dt=dt, sample_interval=1.0)
    q, qd, Q, Qd = fwd.mech[-1]
    back = integrate_adiabatic(MechState(q, -qd, Q, -Qd), fig5, 100.0, dt=dt, sample_interval=100.0)
    scale = np.abs(fwd.mech).max(axis=0)
    end = back.mech[-1] * [1, -1, 1, -1]
    assert np.all(np.abs(end) / scale < 1e-5)


# --- full mean-field system ------------------------------------------------------

def test_full_dark_zero():
    p = harmonic_params()
    tr = integrate_full(FullState(), p, 20.0)
    assert np.all(tr.states == 0.0)


def test_full_momentum_consistency(fig5):
    tr = integrate_full(FullState(), fig5, 20.0)
    assert np.allclose(tr.mech[:, 1] / fig5.omega_m, tr.states[:, 2], rtol=4 * np.finfo(float).eps, atol=0.0)
    assert np.all(tr.photon_number >= 0.0)


def test_branch_is_fixed_point_without_damping(base):
    p = base.with_ratios(eta=5.0, eta_eff=10.0)
    for b in steady_state_at(p, convention="dynamics"):
        s = full_state_from_branch(b, p, "dynamics")
        fp = langevin_fixed_point(b.n_s, p, "dynamics")
        assert np.allclose(s.as_list(), fp.as_list(), rtol=1e-9, atol=1e-15)


def test_stable_fixed_point_persists(fig5):
    p = fig5.replace(gamma_m=1e-3 * fig5.omega_m, gamma_sm=0.05 * fig5.big_omega)
    (branch,) = steady_state_at(p, convention="dynamics")
    assert branch.stability is Stability.STABLE
    fp = langevin_fixed_point(branch.n_s, p, "dynamics")
    # the steady-state factor 1 - gamma/Omega is first order in gamma/Omega
    assert abs(fp.photon_number - branch.n_s) / branch.n_s < 0.05
    tr = integrate_full(fp, p, 1000 * T, method="rk45-adaptive", sample_interval=10 * T)
    y0 = np.array(fp.as_list())
    dev = np.abs(tr.states - y0).max(axis=0)
    assert np.all(dev <= 1e-6 * np.maximum(np.abs(y0), 1.0))


ADIABATIC_REGIME = SystemParams(eta=100.0, eta_eff=20.0, kappa=100.0, delta=50.0, omega_m=1.0, omega_r=0.25,
                                xi=10.0, xi_sm=10.0)


def adiabatic_rms(params, t_end, dt, sample):
    tr = integrate_full(FullState(), params, t_end, dt=dt, sample_interval=sample)
    n_ad = photon_number(tr.q, tr.Q, params, "dynamics")
    keep = tr.times >= 5.0 * params.omega_m / params.kappa
    err = (tr.photon_number[keep] - n_ad[keep]) / n_ad[keep]
    return math.sqrt(np.mean(err ** 2))


def test_adiabatic_elimination_large_kappa():
    assert adiabatic_rms(ADIABATIC_REGIME, 20.0, 0.005, 0.01) < 0.01


def test_adiabatic_elimination_fails_at_preset(fig5):
    # kappa << omega_m: the field cannot follow the mirror
    tr = integrate_full(FullState(), fig5, 100.0, sample_interval=0.1)
    n_ad = photon_number(tr.q, tr.Q, fig5, "dynamics")
    keep = tr.times >= 10.0
    err = (tr.photon_number[keep] - n_ad[keep]) / n_ad[keep]
    assert math.sqrt(np.mean(err ** 2)) > 1.0


def test_adiabatic_vs_full_large_kappa_mechanics():
    p = ADIABATIC_REGIME
    a = integrate_adiabatic(MechState(), p, 20.0, dt=0.005, sample_interval=0.5)
    f = integrate_full(FullState(), p, 20.0, dt=0.005, sample_interval=0.5)
    assert np.max(np.abs(a.q - f.q)) < 0.05 * np.max(np.abs(a.q))


# --- Fig. 5 regime ----------------------------------------------------------------

def test_fig5_bounded_oscillation(fig5):
    tr = integrate_adiabatic(MechState(), fig5, 100.0)
    q_max, Q_max = max_amplitudes(tr)
    assert 0.0 < q_max < 100.0 and 0.0 < Q_max < 100.0
    assert np.all(np.isfinite(tr.mech))
    # oscillation, not drift: q changes sign of its velocity many times
    assert np.count_nonzero(np.diff(np.sign(tr.mech[:, 1]))) > 20


def test_fig5_transverse_drive_increases_mirror_amplitude(fig5):
    base = max_amplitudes(integrate_adiabatic(MechState(), fig5, 100.0))
    driven = max_amplitudes(integrate_adiabatic(MechState(), fig5.with_ratios(eta_eff=0.8), 100.0))
    assert driven[0] > base[0]


# --- hooks and errors ------------------------------------------------------------

def test_forcing_hook_shifts_equilibrium():
    p = harmonic_params()
    tr = integrate_adiabatic(MechState(), p, 10 * T, forcing=lambda t, y: [0.0, 1.0, 0.0, 0.0])
    # q'' = -q + 1 from rest: q = 1 - cos t
    assert np.max(np.abs(tr.q - (1.0 - np.cos(tr.times)))) < 1e-6


def test_divergence_detected():
    p = harmonic_params()
    with pytest.raises(DivergenceError) as info:
        integrate_adiabatic(MechState(q=1.0), p, 10.0, forcing=lambda t, y: [0.0, math.nan, 0.0, 0.0])
    assert info.value.last_time == 0.0


def test_stiffness_on_blow_up():
    with pytest.raises((StiffnessError, DivergenceError)):
        integrate_dopri(lambda t, y: [y[0] ** 2], [1.0], 2.0, 0.5)


@pytest.mark.parametrize("kw", [{"method": "euler"}, {"dt": 0.0}, {"t_end": -1.0}])
def test_invalid_arguments(kw):
    args = dict(t_end=1.0)
    args.update(kw)
    with pytest.raises(ParameterError):
        integrate_adiabatic(MechState(), harmonic_params(), **args)
