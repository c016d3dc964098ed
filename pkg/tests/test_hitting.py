import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleywalk.group import GroupSpec, unit_generators
from cayleywalk.hitting import (
    MeasuredWalkConfig,
    average,
    concurrent,
    measured_arrival_curve,
    measured_step,
    one_shot,
    unitary_arrival_curve,
)
from cayleywalk.walk import Coin, grover_coin, hadamard_coin, point_state, uniform_coin_vector

from conftest import dense_arrival_oracle, dense_walk_operator, random_instance

Z2 = GroupSpec.finite(2)
HOP = Coin(np.eye(1), "trivial")
LINE = GroupSpec.line()


def _cube(n):
    spec = GroupSpec.hypercube(n)
    return spec, unit_generators(spec), grover_coin(n), (0,) * n, (1,) * n


def test_measured_step_deterministic_hop():
    state = point_state(Z2, unit_generators(Z2), [1.0])
    out, p = measured_step(state, HOP, MeasuredWalkConfig((1,), 5))
    assert p == 1.0
    assert out.norm() == 0


def test_measured_step_off_support():
    spec, gens, coin, g1, _ = _cube(4)
    state = point_state(spec, gens, uniform_coin_vector(4), g1)
    # After one step the walker sits at Hamming weight 1 only.
    out, p = measured_step(state, coin, MeasuredWalkConfig((1, 1, 0, 0), 5))
    assert p == 0.0
    assert out.norm() == pytest.approx(1.0)


def test_z2_definitions():
    assert one_shot((0,), (1,), HOP, Z2, threshold=1.0, t_max=3).value == 1
    c = concurrent((0,), (1,), HOP, Z2, threshold=1.0, t_max=3)
    assert (c.value, c.curve.cumulative[-1]) == (1, 1.0)
    a = average((0,), (1,), HOP, Z2, t_max=10)
    assert a.value == 1.0 and a.diagnostics["residual_mass"] == 0 and a.reached


def test_hypercube_n4_matches_dense_trace_formula():
    spec, gens, coin, g1, g2 = _cube(4)
    curve, _ = measured_arrival_curve(g1, g2, coin, spec, gens, t_max=40)
    U = dense_walk_operator(spec, gens, coin)
    psi0 = point_state(spec, gens, uniform_coin_vector(4), g1).amplitudes.reshape(-1)
    expected = dense_arrival_oracle(U, psi0, spec.index(g2), spec.order, 4, 40)
    assert np.max(np.abs(curve.p - expected)) < 1e-10
    assert np.max(np.abs(curve.cumulative - np.cumsum(expected))) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_measured_walk_matches_dense_oracle(seed):
    rng = np.random.default_rng(seed)
    spec, gens, coin, _ = random_instance(rng, max_order=64)
    phi0 = rng.normal(size=len(gens)) + 1j * rng.normal(size=len(gens))
    phi0 /= np.linalg.norm(phi0)
    g1 = spec.from_index(int(rng.integers(spec.order)))
    g2 = spec.from_index(int(rng.integers(spec.order)))
    t_max = int(rng.integers(1, 41))
    curve, state = measured_arrival_curve(g1, g2, coin, spec, gens, phi0, t_max)
    U = dense_walk_operator(spec, gens, coin)
    psi0 = point_state(spec, gens, phi0, g1).amplitudes.reshape(-1)
    expected = dense_arrival_oracle(U, psi0, spec.index(g2), spec.order, len(gens), t_max)
    assert np.max(np.abs(curve.p - expected)) < 1e-10
    assert abs(1 - state.norm() ** 2 - curve.cumulative[-1]) < 1e-10


def test_measured_norm_is_non_increasing():
    spec, gens, coin, g1, g2 = _cube(5)
    cfg = MeasuredWalkConfig(g2, 60)
    state = point_state(spec, gens, uniform_coin_vector(5), g1)
    norms, total = [1.0], 0.0
    for _ in range(60):
        state, p = measured_step(state, coin, cfg)
        total += p
        norms.append(state.norm())
        assert abs(1 - state.norm() ** 2 - total) < 1e-10
    assert np.all(np.diff(norms) <= 1e-15)


def test_one_shot_hypercube_n10():
    spec, gens, coin, g1, g2 = _cube(10)
    res = one_shot(g1, g2, coin, spec, gens, threshold="auto-peak", t_max=30)
    assert res.reached and res.value == 14
    assert res.value % 2 == 0
    assert abs(res.value - math.pi * 10 / 2) <= 2
    assert res.parameters["threshold"] == pytest.approx(0.881, abs=1e-3)


def test_one_shot_threshold_monotone():
    spec, gens, coin, g1, g2 = _cube(8)
    times = [one_shot(g1, g2, coin, spec, gens, threshold=p, t_max=40).value for p in (0.1, 0.3, 0.6, 0.9)]
    assert times == sorted(times)


def test_one_shot_same_vertex_and_unreached():
    spec, gens, coin, g1, g2 = _cube(6)
    assert one_shot(g1, g1, coin, spec, gens, threshold=0.0).value == 0
    miss = one_shot(g1, g2, coin, spec, gens, threshold=1.0, t_max=20)
    assert not miss.reached and miss.value is None
    assert 0 < miss.diagnostics["max_probability"] < 1
    with pytest.raises(ValueError):
        one_shot(g1, g2, coin, spec, gens, threshold=1.5)


def test_one_shot_line_near_sqrt2_d():
    res = one_shot((0,), (40,), hadamard_coin(), LINE, t_max=120)
    assert abs(res.value - math.sqrt(2) * 40) <= 0.1 * math.sqrt(2) * 40


def test_line_target_outside_window_is_never_hit():
    curve = unitary_arrival_curve((0,), (50,), hadamard_coin(), LINE, t_max=10)
    assert np.all(curve.p == 0)


def test_concurrent_n10_scale():
    spec, gens, coin, g1, g2 = _cube(10)
    curve, _ = measured_arrival_curve(g1, g2, coin, spec, gens, t_max=16)
    floor = 1 / (10 * math.log(10) ** 2)
    assert floor <= curve.cumulative[-1] < 1


def test_concurrent_zero_threshold_and_unreached():
    spec, gens, coin, g1, g2 = _cube(6)
    assert concurrent(g1, g2, coin, spec, gens, threshold=0.0).value == 1
    miss = concurrent(g1, g2, coin, spec, gens, threshold=0.99, t_max=5)
    assert not miss.reached
    assert miss.diagnostics["cumulative"] == 0.0


def test_zeno_distinction():
    spec, gens, coin, g1, g2 = _cube(6)
    unitary = unitary_arrival_curve(g1, g2, coin, spec, gens, t_max=30)
    measured, _ = measured_arrival_curve(g1, g2, coin, spec, gens, t_max=30)
    assert np.max(np.abs(unitary.p[1:] - measured.p)) > 1e-3


@pytest.mark.parametrize("n, expected", [(4, 6.667), (6, 13.6), (8, 22.31)])
def test_average_hypercube(n, expected):
    spec, gens, coin, g1, g2 = _cube(n)
    res = average(g1, g2, coin, spec, gens, t_max=5000)
    assert res.diagnostics["residual_mass"] < 1e-9
    assert res.value == pytest.approx(expected, abs=1e-2)


def test_average_line_reports_residual():
    res = average((0,), (10,), hadamard_coin(), LINE, t_max=2000)
    d = res.diagnostics
    assert d["residual_mass"] > 0.05
    assert d["lower_bound_gap"] == pytest.approx(d["residual_mass"] * (d["steps"] + 1))
    assert not res.reached


def test_result_to_dict():
    res = concurrent((0,), (1,), HOP, Z2, threshold=1.0)
    out = res.to_dict()
    assert out["definition"] == "concurrent" and out["value"] == 1
