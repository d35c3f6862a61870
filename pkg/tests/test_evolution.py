import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nlswave.evolution import (
    TrajectoryRecord,
    default_dt,
    detect_blowup,
    nonlinear_substep_invariant_check,
    split_step_evolve,
)
from nlswave.grid import FieldPair, ModelParams, make_grid
from nlswave.ground_state import make_initial_guess

G = make_grid(1, [128], [30.0])
P = ModelParams(1.5, 1.0, (0.0,), 1)


def datum(grid=G):
    s = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (0.8, 0.4), "width": (2.0, 1.5),
                            "phase": 0.4}, grid)
    kick = np.exp(0.5j * grid.coords[0] * 2 * math.pi / 30.0 * 2)
    return FieldPair(s.u * kick, s.v, grid)


def test_zero_data_stays_zero():
    fin, rec = split_step_evolve(FieldPair.zeros(G), P, 1e-2, 0.2)
    assert not np.any(fin.u) and not np.any(fin.v)
    assert all(x == 0 for x in rec.mass + rec.energy + rec.grad_norm + rec.max_amp)


@pytest.fixture(scope="module")
def run():
    return split_step_evolve(datum(), P, 1e-3, 1.0, record_every=10)


def test_conservation(run):
    _, rec = run
    assert rec.drift("mass") <= 1e-8
    assert rec.drift("energy") <= 1e-6
    assert rec.drift("momentum") <= 1e-6
    assert len(rec) == 101
    assert np.all(np.diff(rec.times) > 0)
    assert not rec.blowup_flag


def test_energy_drift_shrinks_with_dt():
    d1 = split_step_evolve(datum(), P, 4e-3, 1.0, record_every=5)[1].drift("energy")
    d2 = split_step_evolve(datum(), P, 2e-3, 1.0, record_every=10)[1].drift("energy")
    assert d2 < d1 / 3


def test_time_reversibility(run):
    fin, _ = run
    back, _ = split_step_evolve(fin, P, -1e-3, 1.0, record_every=100)
    s0 = datum()
    assert max(np.max(np.abs(back.u - s0.u)), np.max(np.abs(back.v - s0.v))) <= 1e-8


def test_second_order_convergence():
    ref, _ = split_step_evolve(datum(), P, 0.02 / 16, 0.5, record_every=1000)
    errs = []
    for dt in (0.02, 0.01):
        out, _ = split_step_evolve(datum(), P, dt, 0.5, record_every=1000)
        errs.append(max(np.max(np.abs(out.u - ref.u)), np.max(np.abs(out.v - ref.v))))
    assert math.log2(errs[0] / errs[1]) >= 1.9


def test_substep_invariant_examples():
    g = make_grid(1, [64], [20.0])
    s = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (1.0, 0.0), "width": 2.0}, g)
    assert nonlinear_substep_invariant_check(s, 1.0, 1e-4) <= 1e-12
    s2 = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (1.2, 0.8), "width": 2.0, "phase": 1.0}, g)
    d1 = nonlinear_substep_invariant_check(s2, 2.0, 0.2)
    d2 = nonlinear_substep_invariant_check(s2, 2.0, 0.1)
    assert d1 / d2 >= 2**4
    # the cancellation does not involve gamma
    e2 = nonlinear_substep_invariant_check(s2, 2.0, 0.05)
    e3 = nonlinear_substep_invariant_check(s2, 3.0, 0.05)
    assert e2 < 1e-6 and e3 < 1e-6


@given(st.integers(0, 5000), st.floats(0.3, 5.0))
def test_substep_density_invariant(seed, gamma):
    g = make_grid(1, [32], [10.0])
    s = make_initial_guess({"kind": "random", "seed": seed}, g)
    assert nonlinear_substep_invariant_check(s, gamma, 1e-3) <= 1e-10


def _rec(values):
    r = TrajectoryRecord(dims=1)
    r.grad_norm = list(values)
    return r


def test_detect_blowup_examples():
    assert not detect_blowup(_rec([1.0] * 30))
    assert detect_blowup(_rec([2.0**k for k in range(8)]), window=5, growth_factor=10)
    assert not detect_blowup(_rec([2.0**-k for k in range(30)]))
    assert detect_blowup(_rec([1.0, float("inf")]))


@given(st.lists(st.floats(0.1, 10.0), min_size=2, max_size=40))
def test_detect_blowup_needs_monotone_growth(values):
    r = _rec(values)
    if detect_blowup(r, window=5, growth_factor=10):
        tail = values[-6:]
        assert all(b > a for a, b in zip(tail, tail[1:])) and tail[-1] >= 10 * tail[0]


def test_argument_validation():
    with pytest.raises(ValueError):
        split_step_evolve(datum(), P, 1e-3, 0.0)
    with pytest.raises(ValueError):
        split_step_evolve(datum(), P, 0.0, 1.0)
    with pytest.raises(ValueError):
        split_step_evolve(datum(), P, 1e-3, 1.0, record_every=0)


def test_sink_receives_every_row():
    rows = []
    _, rec = split_step_evolve(datum(), P, 1e-2, 0.1, record_every=2, sink=rows.append)
    assert [r["t"] for r in rows] == rec.times


def test_adaptive_dt_default():
    assert default_dt(G) == pytest.approx(0.5 * (30.0 / 128) ** 2)
    _, rec = split_step_evolve(datum(), P, None, 0.05, record_every=10)
    assert rec.dt_history[0] == (0.0, default_dt(G))


def test_focusing_collapse_is_flagged():
    # supercritical-mass 2-D datum with negative energy; the grid resolves ~8x gradient growth
    g = make_grid(2, [128, 128], [8.0, 8.0])
    s = make_initial_guess({"kind": "gaussian_pair", "amplitudes": (0.0, 3.0), "width": 1.0}, g)
    _, rec = split_step_evolve(s, ModelParams(1.0, 1.0, (0.0, 0.0), 2), 5e-5, 0.1,
                               record_every=20, blowup_window=30, blowup_growth=5.0)
    assert rec.blowup_flag
    assert 0.01 < rec.blowup_time_estimate < 0.1
    assert rec.grad_norm[-1] >= 5.0 * rec.grad_norm[-31]
