import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlswave import functionals as fn
from nlswave.cli_io import write_snapshot
from nlswave.grid import FieldPair, ModelParams, make_grid
from nlswave.ground_state import (
    NotAdmissibleError,
    RescaleError,
    SolverConfig,
    make_initial_guess,
    minimize_action,
    nehari_rescale,
    semitrivial_threshold,
    semitrivial_threshold_from_proof,
    solve_real_elliptic,
)

G1 = make_grid(1, [1024], [40.0])
SECH = math.sqrt(2) / 3 / np.cosh(G1.coords[0])


@pytest.fixture(scope="module")
def sech_solution():
    return solve_real_elliptic("semitrivial_q", 1.0, 1 / 3, G1)


def test_semitrivial_solve_matches_sech(sech_solution):
    res = sech_solution
    assert res.converged
    assert np.max(np.abs(res.state.u)) == 0.0
    assert np.max(np.abs(res.state.v.real - SECH)) <= 1e-6
    assert G1.integrate(np.abs(res.state.v) ** 2) == pytest.approx(4 / 9, abs=1e-8)
    assert res.action_value == pytest.approx(4 / 27, abs=1e-8)


def test_minimize_from_gaussian_reaches_sech():
    p = ModelParams(1.0, 1 / 3, (0.0,), 1)
    init = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (0.0, 1.0), "width": 2.0}, G1)
    res = minimize_action(p, G1, init)
    assert res.converged
    # compare moduli: translation was fixed at the origin, phase is free
    assert np.max(np.abs(np.abs(res.state.v) - SECH)) <= 1e-6
    assert res.action_value == pytest.approx(4 / 27, abs=1e-8)
    assert max(abs(r) for r in res.pohozaev_residuals) <= 1e-6


def test_two_dimensional_boosted_state_has_v():
    g = make_grid(2, [256, 256], [8 * math.pi] * 2)
    res = minimize_action(ModelParams(1.0, 1.0, (0.5, 0.0), 2), g)
    assert res.converged
    assert res.params.velocity[0] == pytest.approx(0.5)   # 4 pi / L = 0.5 exactly
    assert res.snap_distance == pytest.approx(0.0, abs=1e-15)
    assert g.integrate(np.abs(res.state.v) ** 2) > 1e-3
    assert res.action_value >= 1e-8
    assert max(abs(r) for r in res.pohozaev_residuals) <= 1e-5


def test_gauge_invariance_of_action():
    g = make_grid(1, [256], [30.0])
    p = ModelParams(2.0, 1.0, (0.0,), 1)
    res = minimize_action(p, g)
    s0 = fn.action_suite(res.state, p).action
    rolled = FieldPair(np.roll(res.state.u, 17), np.roll(res.state.v, 17), g)
    for st_ in (res.state.phase_rotated(0.7), rolled):
        assert abs(fn.action_suite(st_, p).action - s0) <= 1e-10 * s0


def test_inadmissible_params_rejected():
    g = make_grid(1, [64], [20.0])
    with pytest.raises(NotAdmissibleError):
        minimize_action(ModelParams(1.0, 0.1, (1.0,), 1), g)
    with pytest.raises(NotAdmissibleError):
        solve_real_elliptic("reduced_qstar_pstar", 1.0, -1.0, g)


def test_nehari_rescale_examples():
    g = make_grid(1, [64], [20.0])
    p = ModelParams(1.0, 1.0, (0.0,), 1)
    s = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (1.0, 0.5), "width": 1.5}, g)
    r = fn.action_suite(s, p)
    # scale so that Q = D: then lambda0 = 1/sqrt 2
    t = math.sqrt(r.quadratic / r.interaction)
    s1 = s.scaled(t)
    r1 = fn.action_suite(s1, p)
    assert r1.quadratic == pytest.approx(r1.interaction, rel=1e-12)
    on, lam = nehari_rescale(s1, p)
    assert lam == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert abs(fn.action_suite(on, p).nehari) <= 1e-12 * r1.quadratic
    again, lam2 = nehari_rescale(on, p)
    assert lam2 == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(RescaleError):
        nehari_rescale(FieldPair.zeros(g), p)


@given(st.integers(0, 5000), st.floats(0.3, 3.0))
def test_rescale_lands_on_manifold(seed, gamma):
    g = make_grid(1, [64], [20.0])
    p = ModelParams(gamma, 1.0, (0.0,), 1)
    s = make_initial_guess({"kind": "random", "seed": seed}, g)
    on, _ = nehari_rescale(s, p)
    r = fn.action_suite(on, p)
    assert abs(r.nehari) <= 1e-12 * r.quadratic
    assert r.action == pytest.approx(r.quadratic / 2, rel=1e-12)


def test_initial_guess_examples(tmp_path):
    g = make_grid(2, [32, 32], [10.0, 10.0])
    s = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (0.0, 1.0), "width": 1.0}, g)
    assert not np.any(s.u)
    a = make_initial_guess({"kind": "random", "seed": 7}, g)
    b = make_initial_guess({"kind": "random", "seed": 7}, g)
    assert np.array_equal(a.u, b.u) and np.array_equal(a.v, b.v)
    path = tmp_path / "x.nlsw"
    write_snapshot(a, ModelParams(1.0, 1.0, (0.0, 0.0), 2), path)
    c = make_initial_guess({"kind": "from_file", "path": str(path)}, g)
    assert np.array_equal(a.u, c.u) and np.array_equal(a.v, c.v)
    with pytest.raises(ValueError):
        make_initial_guess({"kind": "random"}, g)
    with pytest.raises(ValueError):
        make_initial_guess({"kind": "nope"}, g)


def test_stated_threshold_values():
    # stated formula (9/sqrt2)^{4/(N-4)}, evaluated by hand
    assert semitrivial_threshold(3) == pytest.approx(4 / 6561, rel=1e-12)
    assert semitrivial_threshold(2) == pytest.approx(2 / 81, rel=1e-12)
    assert semitrivial_threshold(1) == pytest.approx((2 / 81) ** (2 / 3), rel=1e-12)
    # independent evaluation: exp((2/3) ln(2/81)) = 0.084794 (a quoted 8.4899e-2 is off in the 3rd digit)
    assert semitrivial_threshold(1) == pytest.approx(math.exp(2 / 3 * math.log(2 / 81)), rel=1e-12)
    assert semitrivial_threshold(1) == pytest.approx(8.4794e-2, rel=1e-4)


def test_corrected_threshold_equates_scalar_actions():
    # with R the unit cubic ground state: u-only action (81/36) |R|_4^4 at omega=1,
    # v-only action (1/36)(3 gamma)^{(4-N)/2} |R|_4^4; equal when (3 gamma)^{(4-N)/2} = 81
    for N in (1, 2, 3):
        t = semitrivial_threshold_from_proof(N)
        assert t ** ((4 - N) / 2) == pytest.approx(81, rel=1e-12)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(gradient_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(nehari_tol=1.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
