import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlswave.grid import FieldPair, GridError, ModelParams, h1_distance, inner_real, make_grid, qsum, spectral_derivatives


def test_wavenumbers_unit_box():
    g = make_grid(1, [8], [2 * math.pi])
    np.testing.assert_array_equal(g.wavenumbers[0], [0, 1, 2, 3, -4, -3, -2, -1])
    assert g.cell_volume == pytest.approx(2 * math.pi / 8, rel=1e-15)


def test_cell_volume_2d():
    assert make_grid(2, [16, 16], [10, 10]).cell_volume == pytest.approx(100 / 256, rel=1e-15)


@pytest.mark.parametrize("args", [(1, [7], [1.0]), (1, [8], [0.0]), (1, [8], [-1.0]), (4, [8] * 4, [1.0] * 4), (1, [4], [1.0])])
def test_make_grid_rejects(args):
    with pytest.raises(GridError):
        make_grid(*args)


@given(st.sampled_from([8, 16, 32, 64]), st.floats(0.5, 100.0))
def test_wavenumber_antisymmetry_and_volume(n, L):
    g = make_grid(1, [n], [L])
    k = g.wavenumbers[0]
    # all modes except the unmatched Nyquist come in +/- pairs
    body = np.delete(k, n // 2)
    np.testing.assert_allclose(np.sort(body), np.sort(-body), atol=0)
    assert abs(g.integrate(np.ones(g.shape)) - L) <= 1e-14 * L


def test_plane_wave_derivatives():
    g = make_grid(1, [32], [2 * math.pi])
    x = g.coords[0]
    f = np.exp(1j * x)
    (d,) = spectral_derivatives(f, g, "gradient")
    assert np.max(np.abs(d - 1j * f)) <= 1e-12
    assert np.max(np.abs(spectral_derivatives(f, g, "laplacian") + f)) <= 1e-12
    f2 = np.exp(2j * x)
    adv = spectral_derivatives(f2, g, "advection", c=[3.0])
    assert np.max(np.abs(adv + 6 * f2)) <= 1e-12


def test_advection_needs_matching_velocity():
    g = make_grid(2, [8, 8], [1, 1])
    with pytest.raises(GridError):
        spectral_derivatives(np.ones(g.shape, complex), g, "advection", c=[1.0])


def test_inner_real_examples():
    g = make_grid(2, [8, 16], [3.0, 5.0])
    one = np.ones(g.shape, complex)
    assert inner_real(one, one, g) == pytest.approx(15.0, rel=1e-14)
    assert inner_real(one, 1j * one, g) == 0.0
    g1 = make_grid(1, [16], [2 * math.pi])
    e = np.exp(1j * g1.coords[0])
    assert inner_real(e, e, g1) == pytest.approx(2 * math.pi, rel=1e-14)


def test_h1_distance_examples():
    g = make_grid(1, [32], [2 * math.pi])
    z = FieldPair.zeros(g)
    eps = 1e-3
    assert h1_distance(z, z) == 0.0
    const = FieldPair(np.full(g.shape, eps, complex), np.zeros(g.shape, complex), g)
    assert h1_distance(const, z) == pytest.approx(eps * math.sqrt(2 * math.pi), rel=1e-12)
    wave = FieldPair(eps * np.exp(1j * g.coords[0]), np.zeros(g.shape, complex), g)
    assert h1_distance(wave, z) == pytest.approx(eps * math.sqrt(4 * math.pi), rel=1e-12)


def test_h1_distance_rejects_mixed_grids():
    a = FieldPair.zeros(make_grid(1, [16], [1.0]))
    b = FieldPair.zeros(make_grid(1, [16], [2.0]))
    with pytest.raises(GridError):
        h1_distance(a, b)


def test_fieldpair_rejects_nonfinite():
    g = make_grid(1, [8], [1.0])
    bad = np.zeros(g.shape, complex)
    bad[0] = np.nan
    with pytest.raises(FloatingPointError):
        FieldPair(bad, np.zeros(g.shape, complex), g)


@pytest.mark.parametrize("gamma,omega,c,ok", [
    (1.0, 1.0, (0.0,), True),
    (1.0, 0.25, (1.0,), False),   # omega equals |c|^2/4
    (1.0, 0.26, (1.0,), True),
    (6.0, 0.4, (1.0,), False),    # gamma |c|^2 / 12 = 0.5 dominates
    (6.0, 0.51, (1.0,), True),
])
def test_admissibility(gamma, omega, c, ok):
    assert ModelParams(gamma, omega, c, 1).admissible() is ok


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0, (0.0,), 1)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, (0.0,), 4)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_qsum_matches_fsum(xs):
    a = np.array(xs)
    assert abs(qsum(a) - math.fsum(xs)) <= 1e-9 * (1 + math.fsum(abs(x) for x in xs))
