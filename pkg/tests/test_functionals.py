import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlswave import functionals as fn
from nlswave.grid import FieldPair, ModelParams, make_grid

G1 = make_grid(1, [1024], [40.0])
SECH_AMP = math.sqrt(2) / 3


def sech_pair(grid=G1):
    # (0, (sqrt2/3) sech x): exact solution at gamma=1, omega=1/3, c=0
    v = SECH_AMP / np.cosh(grid.coords[0])
    return FieldPair(np.zeros(grid.shape, complex), v.astype(complex), grid)


def smooth_pair(seed, grid):
    rng = np.random.default_rng(seed)
    r2 = sum(x**2 for x in grid.coords)
    env = np.exp(-r2 / 4)
    a = rng.normal(size=4) + 0.3
    ph = sum(rng.integers(-2, 3) * 2 * math.pi * x / L for x, L in zip(grid.coords, grid.box_lengths))
    u = (a[0] + 1j * a[1]) * env * np.exp(1j * ph)
    v = (a[2] + 1j * a[3]) * env**1.5
    return FieldPair(np.broadcast_to(u, grid.shape).copy(), np.broadcast_to(v, grid.shape).copy(), grid)


def test_mass_examples():
    g = make_grid(1, [16], [2.0])
    u = np.ones(g.shape, complex)                 # ||u||^2 = 2
    v = np.ones(g.shape, complex) / math.sqrt(2)  # ||v||^2 = 1
    assert fn.mass(FieldPair(u, v, g), 3.0) == pytest.approx(11.0, rel=1e-14)
    assert fn.mass(FieldPair.zeros(g), 3.0) == 0.0
    assert fn.mass(sech_pair(), 1.0) == pytest.approx(4 / 3, abs=1e-10)


def test_interaction_examples():
    g = make_grid(2, [8, 8], [2.0, 3.0])
    V = 6.0
    one = np.ones(g.shape, complex)
    zero = np.zeros(g.shape, complex)
    assert fn.interaction_d(FieldPair(zero, one, g)) == pytest.approx(9 / 4 * V, rel=1e-14)
    # coefficient sum 1/36 + 9/4 + 1 + 1/9 = 122/36 (a quoted 125/36 is an arithmetic slip)
    assert fn.interaction_d(FieldPair(one, one, g)) == pytest.approx(122 / 36 * V, rel=1e-14)
    assert fn.interaction_d(FieldPair(one, 1j * one, g)) == pytest.approx((1 / 36 + 9 / 4 + 1) * V, rel=1e-14)


def test_momentum_examples():
    g = make_grid(1, [32], [2 * math.pi])
    e = np.exp(1j * g.coords[0])
    z = np.zeros(g.shape, complex)
    np.testing.assert_allclose(fn.momentum(FieldPair(e, z, g), 1.0), [-2 * math.pi], rtol=1e-13)
    np.testing.assert_allclose(fn.momentum(FieldPair(z, e, g), 2.0), [-4 * math.pi], rtol=1e-13)


@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
def test_momentum_of_real_pair_vanishes(seed, dims):
    g = make_grid(dims, [32] * dims, [10.0] * dims)
    s = smooth_pair(seed, g)
    real = FieldPair(s.u.real.astype(complex), s.v.real.astype(complex), g)
    assert np.max(np.abs(fn.momentum(real, 1.7))) <= 1e-12


def test_action_suite_zero_state():
    g = make_grid(1, [16], [5.0])
    r = fn.action_suite(FieldPair.zeros(g), ModelParams(1.0, 1.0, (0.5,), 1))
    assert all(x == 0 for x in (r.mass, r.kinetic, r.interaction, r.energy, r.action, r.quadratic, r.nehari))
    assert r.momentum == (0.0,)


def test_sech_oracle_functionals():
    # closed forms: int sech^2 = 2, int sech^2 tanh^2 = 2/3, int sech^4 = 4/3
    p = ModelParams(1.0, 1 / 3, (0.0,), 1)
    r = fn.action_suite(sech_pair(), p)
    assert r.kinetic == pytest.approx(4 / 27, abs=1e-10)
    assert r.interaction == pytest.approx(4 / 27, abs=1e-10)
    assert r.action == pytest.approx(4 / 27, abs=1e-10)
    assert r.nehari == pytest.approx(0.0, abs=1e-10)


def test_sech_pohozaev_residuals_vanish():
    res = fn.pohozaev_residuals(sech_pair(), ModelParams(1.0, 1 / 3, (0.0,), 1))
    assert max(abs(x) for x in res) <= 1e-9


def test_pohozaev_zero_and_generic():
    g = make_grid(1, [64], [20.0])
    p = ModelParams(1.0, 1.0, (0.0,), 1)
    assert fn.pohozaev_residuals(FieldPair.zeros(g), p) == (0.0, 0.0, 0.0)
    assert max(abs(x) for x in fn.pohozaev_residuals(smooth_pair(3, g), p)) > 1e-2


@given(st.integers(0, 10_000), st.floats(0.5, 3.0), st.floats(0.1, 2.0))
def test_action_identities(seed, gamma, omega):
    g = make_grid(1, [64], [20.0])
    r = fn.action_suite(smooth_pair(seed, g), ModelParams(gamma, omega, (0.3,), 1))
    assert r.energy == r.kinetic / 2 - r.interaction
    assert r.nehari == 2 * r.quadratic - 4 * r.interaction
    assert r.action == r.quadratic - r.interaction


@given(st.integers(0, 10_000), st.floats(0.0, 2 * math.pi))
def test_interaction_phase_invariance(seed, theta):
    g = make_grid(2, [32, 32], [10.0, 10.0])
    s = smooth_pair(seed, g)
    d0 = fn.interaction_d(s)
    d1 = fn.interaction_d(s.phase_rotated(theta))
    assert abs(d1 - d0) <= 1e-12 * abs(d0)


@given(st.integers(0, 10_000), st.sampled_from([0.5, 2.0]))
def test_nehari_homogeneity(seed, lam):
    g = make_grid(1, [64], [20.0])
    p = ModelParams(1.3, 0.8, (0.0,), 1)
    s = smooth_pair(seed, g)
    r = fn.action_suite(s, p)
    expect = 2 * lam**2 * r.quadratic - 4 * lam**4 * r.interaction
    got = fn.action_suite(s.scaled(lam), p).nehari
    assert abs(got - expect) <= 1e-12 * (abs(expect) + 2 * lam**2 * abs(r.quadratic) + 4 * lam**4 * r.interaction)


@given(st.integers(0, 10_000), st.sampled_from([1.0, 2.0, 3.0]), st.integers(-3, 3), st.integers(-3, 3),
       st.floats(0.5, 3.0))
def test_boost_covariance(seed, gamma, m1, m2, omega):
    g = make_grid(2, [64, 64], [12.0, 12.0])
    c = (4 * math.pi / 12.0 * m1, 4 * math.pi / 12.0 * m2)
    s = smooth_pair(seed, g)
    boosted = fn.galilean_boost(s, c, gamma, +1)
    c2 = c[0] ** 2 + c[1] ** 2
    nu, nv = fn.component_norms(s)
    expect = (fn.kinetic(s) / 2 + (omega - c2 / 4) / 2 * nu + (3 * gamma * omega - gamma**2 * c2 / 4) / 2 * nv)
    got = fn.quadratic_q(boosted, ModelParams(gamma, omega, c, 2))
    assert abs(got - expect) <= 1e-10 * (abs(expect) + fn.kinetic(s) + abs(omega) * fn.mass(s, gamma) + c2 * (nu + nv))


def test_boost_identity_and_inverse():
    g = make_grid(2, [32, 32], [4 * math.pi, 4 * math.pi])
    s = smooth_pair(1, g)
    same = fn.galilean_boost(s, (0.0, 0.0), 1.0)
    assert np.array_equal(same.u, s.u) and np.array_equal(same.v, s.v)
    there = fn.galilean_boost(s, (2.0, -1.0), 2.0, +1)
    back = fn.galilean_boost(there, (2.0, -1.0), 2.0, -1)
    assert max(np.max(np.abs(back.u - s.u)), np.max(np.abs(back.v - s.v))) <= 1e-13


def test_boost_rejects_nonperiodic_phase():
    g = make_grid(1, [32], [10.0])
    with pytest.raises(fn.BoostCompatibilityError):
        fn.galilean_boost(FieldPair.zeros(g), (0.5,), 1.0)
    with pytest.warns(UserWarning):
        fn.galilean_boost(FieldPair.zeros(g), (0.5,), 1.0, allow_mismatch=True)


@given(st.floats(-5, 5), st.floats(5.0, 60.0))
def test_snap_lands_on_lattice(c, L):
    g = make_grid(1, [16], [L])
    (cs,), dist = fn.snap_velocity((c,), g)
    step = 4 * math.pi / L
    assert abs(cs / step - round(cs / step)) <= 1e-9
    assert dist <= step / 2 + 1e-12
    assert fn.boost_phase_mismatch((cs,), 1.0, g) <= 1e-9


@given(st.integers(0, 1000))
def test_action_gradient_matches_finite_difference(seed):
    g = make_grid(1, [64], [20.0])
    p = ModelParams(1.5, 0.9, (0.4,), 1)
    s = smooth_pair(seed, g)
    d = smooth_pair(seed + 1, g)
    grad = fn.action_gradient(s, p)
    h = 1e-5
    fd = (fn.action_suite(FieldPair(s.u + h * d.u, s.v + h * d.v, g), p).action
          - fn.action_suite(FieldPair(s.u - h * d.u, s.v - h * d.v, g), p).action) / (2 * h)
    from nlswave.grid import inner_real
    lin = inner_real(grad.u, d.u, g) + inner_real(grad.v, d.v, g)
    assert fd == pytest.approx(lin, rel=1e-6, abs=1e-8)
