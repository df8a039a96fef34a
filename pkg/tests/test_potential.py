
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from becbistab.forces import adiabatic_force, radiation_forces
from becbistab.potential import (PointKind, classify, effective_potential, find_critical_points,
                                 potential_grid, q_leg, v_s_of_n)
from becbistab.steady_state import eta_folds, steady_state_at


@pytest.fixture(scope="module")
def bistable():
    from becbistab import preset
    return preset("paper-2015").with_ratios(eta=10.0, eta_eff=0.8)


@pytest.fixture(scope="module")
def bistable_grid(bistable):
    return potential_grid(bistable, resolution=81)


def dark(base):
    return base.replace(eta=0.0)


def d_dQ(params, q, Q, h, tol):
    """Fourth-order central difference of V along Q."""
    v = [effective_potential(q, Q + k * h, params, tol) for k in (-2, -1, 1, 2)]
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)


def d_dq(params, q, h, tol):
    v = [effective_potential(q + k * h, 0.0, params, tol) for k in (-2, -1, 1, 2)]
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)


def test_anchor(bistable, base):
    assert effective_potential(0.0, 0.0, bistable) == 0.0
    assert effective_potential(0.0, 0.0, base, paper_literal_signs=True) == 0.0
    g = potential_grid(bistable, q_range=(-1e-3, 1e-3), Q_range=(-1.5, 1.5), resolution=(21, 31))
    i, j = np.nonzero(g.q == 0.0)[0], np.nonzero(g.Q == 0.0)[0]
    assert i.size == 1 and j.size == 1
    assert g.V[i[0], j[0]] == 0.0


def test_harmonic_limit_values(base):
    p = dark(base)
    for q, Q in [(1e-3, 0.5), (-2e-4, -1.0), (0.0, 0.3)]:
        expected = 0.5 * p.omega_m ** 2 * q ** 2 + 0.5 * (4 * p.omega_r) ** 2 * Q ** 2
        assert effective_potential(q, Q, p) == pytest.approx(expected, rel=1e-14)


def test_harmonic_limit_single_minimum(base):
    p = dark(base)
    g = potential_grid(p, q_range=(-1.0, 1.0), Q_range=(-1.0, 1.0), resolution=41)
    i, j = np.unravel_index(np.argmin(g.V), g.V.shape)
    assert g.q[i] == 0.0 and g.Q[j] == 0.0
    (cp,) = find_critical_points(g, p)
    assert cp.kind is PointKind.MINIMUM
    assert abs(cp.q) < 1e-12 and abs(cp.Q) < 1e-12


def test_paper_literal_signs(bistable):
    for q, Q in [(3e-4, -0.4), (-1e-4, 0.2)]:
        assert effective_potential(q, Q, bistable, paper_literal_signs=True) == -effective_potential(q, Q, bistable)
    g = potential_grid(bistable, resolution=11)
    lit = potential_grid(bistable, resolution=11, paper_literal_signs=True)
    assert np.array_equal(lit.V, -g.V)


def test_grid_matches_pointwise(bistable, bistable_grid):
    g = bistable_grid
    rng = np.random.default_rng(3)
    for _ in range(10):
        i, j = rng.integers(len(g.q)), rng.integers(len(g.Q))
        direct = effective_potential(g.q[i], g.Q[j], bistable, 1e-12)
        scale = np.max(np.abs(g.V))
        assert abs(g.V[i, j] - direct) <= 1e-8 * scale


def test_grid_parallel_identical(bistable):
    a = potential_grid(bistable, resolution=21, jobs=1)
    b = potential_grid(bistable, resolution=21, jobs=3)
    assert np.array_equal(a.V, b.V)


def test_gradient_along_q_on_axis(bistable, bistable_grid):
    span = bistable_grid.spans[0]
    rng = np.random.default_rng(11)
    for q in rng.uniform(bistable_grid.q[0], bistable_grid.q[-1], 30):
        fq, _ = adiabatic_force(q, 0.0, bistable, "steady")
        scale = abs(bistable.omega_m ** 2 * q) + abs(radiation_forces(q, 0.0, bistable, "steady")[0])
        assert abs(d_dq(bistable, q, 1e-4 * span, 1e-13) + fq) <= 1e-6 * scale


def test_radiation_term_scales_with_eta_squared(base):
    qs = np.linspace(-1e-3, 1e-3, 11)
    a = np.max(np.abs(q_leg(qs, base.with_ratios(eta=2.0))))
    b = np.max(np.abs(q_leg(qs, base.with_ratios(eta=6.0))))
    assert b / a == pytest.approx(9.0, rel=1e-12)


def test_double_well(bistable, bistable_grid):
    points = find_critical_points(bistable_grid, bistable)
    kinds = [c.kind for c in points]
    assert kinds == [PointKind.MINIMUM, PointKind.SADDLE, PointKind.MINIMUM]
    branches = steady_state_at(bistable)
    sq, sQ = bistable_grid.spans
    for c, b in zip(points, branches):
        assert abs(c.q - b.q_s) <= 1e-6 * sq and abs(c.Q - b.Q_s) <= 1e-6 * sQ


def test_refinement_stability(bistable, bistable_grid):
    coarse = find_critical_points(bistable_grid, bistable)
    fine_grid = potential_grid(bistable, q_range=(bistable_grid.q[0], bistable_grid.q[-1]),
                               Q_range=(bistable_grid.Q[0], bistable_grid.Q[-1]), resolution=161)
    fine = find_critical_points(fine_grid, bistable)
    assert len(fine) == len(coarse)
    cell_q = bistable_grid.q[1] - bistable_grid.q[0]
    cell_Q = bistable_grid.Q[1] - bistable_grid.Q[0]
    for a, b in zip(coarse, fine):
        assert abs(a.q - b.q) < cell_q and abs(a.Q - b.Q) < cell_Q and a.kind == b.kind


@pytest.mark.parametrize("which", [0, 1])
def test_fold_tuned_degenerate(base, which):
    p = base.replace(eta=eta_folds(base)[which])
    points = find_critical_points(potential_grid(p, resolution=61), p)
    assert sorted(c.kind.value for c in points) == ["Degenerate", "Minimum"]


def test_curvature_eigs_real_and_sorted(bistable, bistable_grid):
    for c in find_critical_points(bistable_grid, bistable):
        assert all(isinstance(e, float) for e in c.hess_eigs)
        assert c.hess_eigs[0] <= c.hess_eigs[1]


def test_classify():
    assert classify([1.0, 2.0]) is PointKind.MINIMUM
    assert classify([-1.0, 2.0]) is PointKind.SADDLE
    assert classify([-1.0, -2.0]) is PointKind.MAXIMUM
    assert classify([1e-9, 2.0]) is PointKind.DEGENERATE
    assert classify([0.0, 0.0]) is PointKind.DEGENERATE


def test_ranges_widened_to_branches(bistable):
    g = potential_grid(bistable, q_range=(0.0, 1e-5), Q_range=(-0.01, 0.0), resolution=11)
    for b in steady_state_at(bistable):
        assert g.q[0] <= b.q_s <= g.q[-1] and g.Q[0] <= b.Q_s <= g.Q[-1]


# --- V_s(n) ---------------------------------------------------------------------

def test_v_s_origin(base):
    n, vs, err = v_s_of_n(base.with_ratios(eta=10.0), np.linspace(0.0, 0.02, 5))
    assert vs[0] == 0.0 and err[0] == 0.0


def test_v_s_self_convergence(base):
    p = base.with_ratios(eta=10.0, eta_eff=0.8)
    grid = np.linspace(0.0, 0.03, 100)
    _, coarse, err = v_s_of_n(p, grid, 1e-8)
    _, fine, _ = v_s_of_n(p, grid, 5e-9)
    assert np.all(np.abs(fine - coarse) <= err)


def test_v_s_monotone_without_transverse_drive(base):
    for eta in (1.0, 10.0, 20.0):
        _, vs, _ = v_s_of_n(base.with_ratios(eta=eta), np.linspace(0.0, 0.05, 51))
        assert np.all(np.diff(vs) < 0) or np.all(np.diff(vs) > 0)


def test_v_s_pump_dependence(base):
    """At fixed n the pump enters only through the integral, which grows with eta^2."""
    n = np.linspace(0.0, 0.05, 11)
    ref = v_s_of_n(base.replace(eta=0.0), n)[1]
    prev = None
    for eta in (5.0, 10.0, 20.0):
        pumped = v_s_of_n(base.with_ratios(eta=eta), n)[1] - ref
        assert np.all(pumped[1:] > 0)
        if prev is not None:
            assert np.all(pumped[1:] > prev[1:])
        prev = pumped


def test_v_s_bad_grid(base):
    with pytest.raises(ValueError):
        v_s_of_n(base, [0.0, -1.0])


# --- gradient contract as a property ----------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_gradient_along_Q_property(u, v):
    from becbistab import preset
    p = preset("paper-2015").with_ratios(eta=10.0, eta_eff=0.8)
    grid = potential_grid(p, resolution=5)
    sq, sQ = grid.spans
    q = grid.q[0] + u * sq
    Q = grid.Q[0] + v * sQ
    _, fQ = adiabatic_force(q, Q, p, "steady")
    scale = abs(p.big_omega ** 2 * Q) + abs(radiation_forces(q, Q, p, "steady")[1])
    assert abs(d_dQ(p, q, Q, 1e-4 * sQ, 1e-13) + fQ) <= 1e-6 * scale
