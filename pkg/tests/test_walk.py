import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleywalk.group import GroupSpec, unit_generators
from cayleywalk.walk import (
    Coin,
    WalkState,
    WindowOverflowError,
    apply_coin,
    apply_shift,
    evolve,
    grover_coin,
    hadamard_coin,
    hypercube_symmetric_state,
    identity_coin,
    inverse_step,
    point_state,
    position_distribution,
    random_coin,
    step,
    symmetric_line_state,
)

from conftest import dense_walk_operator, random_instance

LINE = GroupSpec.line()
LINE_GENS = unit_generators(LINE)


def test_coin_unitarity_gate():
    with pytest.raises(ValueError, match="unitary"):
        Coin(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="square"):
        Coin(np.ones((2, 3)))
    for d in (1, 2, 5, 8):
        m = grover_coin(d).matrix
        np.testing.assert_allclose(m @ m.conj().T, np.eye(d), atol=1e-12)


def test_grover_entries():
    n = 6
    m = grover_coin(n).matrix
    for i in range(n):
        for j in range(n):
            assert m[i, j] == pytest.approx(2 / n - (i == j))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_random_coin_unitary(d, seed):
    m = random_coin(d, seed).matrix
    np.testing.assert_allclose(m @ m.conj().T, np.eye(d), atol=1e-10)


def test_apply_coin_examples():
    state = point_state(LINE, LINE_GENS, np.array([1, 1j]) / np.sqrt(2), 0, horizon=1)
    out = apply_coin(state, hadamard_coin())
    col = state.column(0)
    np.testing.assert_allclose(out.amplitudes[:, col], [(1 + 1j) / 2, (1 - 1j) / 2], atol=1e-15)
    same = apply_coin(state, identity_coin(2))
    np.testing.assert_array_equal(same.amplitudes, state.amplitudes)

    cube = GroupSpec.hypercube(4)
    s = point_state(cube, unit_generators(cube), [1, 0, 0, 0])
    g = apply_coin(s, grover_coin(4))
    np.testing.assert_allclose(g.amplitudes[:, 0], [-0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_apply_coin_dimension_mismatch():
    s = hypercube_symmetric_state(3)
    with pytest.raises(ValueError, match="dimension"):
        apply_coin(s, hadamard_coin())


def test_shift_hypercube_moves_along_e0():
    cube = GroupSpec.hypercube(4)
    gens = unit_generators(cube)
    s = point_state(cube, gens, [1, 0, 0, 0])
    out = apply_shift(s)
    assert out.amplitudes[0, cube.index((0, 0, 0, 1))] == 1
    assert np.sum(np.abs(out.amplitudes)) == 1
    np.testing.assert_array_equal(apply_shift(out).amplitudes, s.amplitudes)


def test_shift_line():
    s = point_state(LINE, LINE_GENS, [1, 0], 5, horizon=3)
    out = apply_shift(s)
    assert out.amplitudes[0, out.column(6)] == 1
    s = point_state(LINE, LINE_GENS, [0, 1], 5, horizon=3)
    assert apply_shift(s).amplitudes[1, s.column(4)] == 1


def test_line_window_overflow():
    s = point_state(LINE, LINE_GENS, [1, 0], 0, horizon=2)
    s = evolve(s, identity_coin(2), 2)
    with pytest.raises(WindowOverflowError):
        step(s, identity_coin(2))


def test_step_examples():
    s = symmetric_line_state(horizon=1)
    out = step(s, hadamard_coin())
    assert out.time == 1
    np.testing.assert_allclose(out.amplitudes[0, out.column(1)], (1 + 1j) / 2, atol=1e-15)
    np.testing.assert_allclose(out.amplitudes[1, out.column(-1)], (1 - 1j) / 2, atol=1e-15)
    P = position_distribution(out)
    assert P[out.column(1)] == pytest.approx(0.5)
    assert P[out.column(-1)] == pytest.approx(0.5)

    z2 = GroupSpec.finite(2)
    hop = step(point_state(z2, unit_generators(z2), [1.0]), Coin(np.eye(1)))
    np.testing.assert_array_equal(hop.amplitudes, [[0, 1]])


def test_evolve_zero_steps_and_negative():
    s = hypercube_symmetric_state(3)
    assert evolve(s, grover_coin(3), 0) is s
    with pytest.raises(ValueError):
        evolve(s, grover_coin(3), -1)


def test_distribution_point_start():
    s = hypercube_symmetric_state(5)
    P = position_distribution(s)
    assert P[0] == pytest.approx(1)
    assert P.sum() == pytest.approx(1)


def test_line_support_light_cone():
    s = symmetric_line_state(horizon=30)
    coin = hadamard_coin()
    for t in range(1, 31):
        s = step(s, coin)
        support = s.positions[position_distribution(s) > 0]
        assert support.min() >= -t and support.max() <= t


def test_hadamard_distribution_t100_peaks():
    s = evolve(symmetric_line_state(100), hadamard_coin(), 100)
    P = position_distribution(s)
    assert P.sum() == pytest.approx(1, abs=1e-10)
    x = s.positions
    right = x[np.argmax(np.where(x > 0, P, 0))]
    left = x[np.argmax(np.where(x < 0, P, 0))]
    assert abs(right - 100 / math.sqrt(2)) <= 3
    assert abs(left + 100 / math.sqrt(2)) <= 3
    outside = P[np.abs(x) > 100 / math.sqrt(2)].sum()
    assert 0 < outside < 0.5


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60))
def test_norm_preserved(seed, t):
    rng = np.random.default_rng(seed)
    spec, gens, coin, state = random_instance(rng, max_order=128)
    out = evolve(state, coin, t)
    assert abs(out.norm() - 1) < t * 1e-13 + 1e-14


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_step_matches_dense_operator(seed):
    rng = np.random.default_rng(seed)
    spec, gens, coin, state = random_instance(rng, max_order=32)
    U = dense_walk_operator(spec, gens, coin)
    expected = (U @ state.amplitudes.reshape(-1)).reshape(state.amplitudes.shape)
    np.testing.assert_allclose(step(state, coin).amplitudes, expected, atol=1e-13)


@pytest.mark.parametrize("moduli", [(5,), (3, 4), (2, 2, 2), (6, 2)])
def test_shift_orbit_returns_to_start(moduli, rng):
    spec = GroupSpec.finite(*moduli)
    gens = unit_generators(spec)
    a = rng.normal(size=(len(gens), spec.order)) + 0j
    s = WalkState(a, spec, gens)
    order = int(np.lcm.reduce(moduli))
    out = s
    for _ in range(order):
        out = apply_shift(out)
    np.testing.assert_array_equal(out.amplitudes, a)
    # Every intermediate power is a permutation of the entries.
    np.testing.assert_allclose(np.sort(np.abs(apply_shift(s).amplitudes).ravel()),
                               np.sort(np.abs(a).ravel()))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 200))
def test_reversibility(seed, t):
    rng = np.random.default_rng(seed)
    spec, gens, coin, state = random_instance(rng, max_order=64)
    out = evolve(state, coin, t)
    for _ in range(t):
        out = inverse_step(out, coin)
    assert np.max(np.abs(out.amplitudes - state.amplitudes)) < 1e-9


def test_reversibility_line():
    # Round-off left by inverse steps spreads one site per step, so leave headroom.
    s = symmetric_line_state(100)
    coin = hadamard_coin()
    out = evolve(s, coin, 50)
    for _ in range(50):
        out = inverse_step(out, coin)
    assert np.max(np.abs(out.amplitudes - s.amplitudes)) < 1e-9


def test_point_state_validation():
    cube = GroupSpec.hypercube(3)
    with pytest.raises(ValueError, match="normalized"):
        point_state(cube, unit_generators(cube), [1, 1, 0])
    with pytest.raises(ValueError, match="entries"):
        point_state(cube, unit_generators(cube), [1, 0])
