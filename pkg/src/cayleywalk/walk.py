"""
State-vector simulation of the coined walk ``U = S (C x I)``.

Amplitudes are stored densely as a ``(|S|, positions)`` complex array: row
``h`` is the coin label (generator), column the position. Finite groups use
the flat mixed-radix index for columns. The line uses a finite window of
consecutive integers ``lo, lo+1, ..., lo+width-1``; since the walker moves at
most ``max|h|`` sites per step, a window sized for the planned horizon is
exact, and leaving it is an error rather than a silent wrap.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from .group import GeneratorSet, GroupSpec, unit_generators

__all__ = [
    "Coin",
    "WalkState",
    "WindowOverflowError",
    "grover_coin",
    "hadamard_coin",
    "identity_coin",
    "random_coin",
    "point_state",
    "uniform_coin_vector",
    "symmetric_line_state",
    "hypercube_symmetric_state",
    "apply_coin",
    "apply_shift",
    "apply_inverse_shift",
    "step",
    "inverse_step",
    "evolve",
    "position_distribution",
]

UNITARY_TOL = 1e-10


class WindowOverflowError(RuntimeError):
    """Amplitude would leave the allocated line window."""


@dataclass(frozen=True, eq=False)
class Coin:
    """Unitary ``|S| x |S|`` coin; rows and columns follow generator labels."""

    matrix: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"coin must be square, got shape {m.shape}")
        err = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"coin is not unitary (max |CC^dagger - I| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_grover(self) -> bool:
        return np.allclose(self.matrix, _grover_matrix(self.dim), atol=1e-12)


def _grover_matrix(d: int) -> np.ndarray:
    return 2.0 / d * np.ones((d, d), dtype=np.complex128) - np.eye(d, dtype=np.complex128)


def grover_coin(d: int) -> Coin:
    """Grover coin, entries ``2/d - delta_ij``."""
    if d < 1:
        raise ValueError(f"Grover coin requires d >= 1, got {d}")
    return Coin(_grover_matrix(d), "grover")


def hadamard_coin() -> Coin:
    return Coin(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0), "hadamard")


def identity_coin(d: int) -> Coin:
    return Coin(np.eye(d), "identity")


def random_coin(d: int, rng: np.random.Generator | int | None = None) -> Coin:
    """Haar-random ``d x d`` unitary coin."""
    rng = np.random.default_rng(rng)
    if d == 1:
        return Coin(np.exp(2j * np.pi * rng.random((1, 1))), "random")
    return Coin(unitary_group.rvs(d, random_state=rng), "random")


@dataclass(frozen=True, eq=False)
class WalkState:
    """
    Amplitude table ``psi[h, position]`` at integer time ``time``.

    For the line, ``origin`` is the position of column 0; it is ignored for
    finite groups.
    """

    amplitudes: np.ndarray
    spec: GroupSpec
    gens: GeneratorSet
    time: int = 0
    origin: int = 0

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != len(self.gens):
            raise ValueError(
                f"amplitudes must have shape (|S|={len(self.gens)}, positions), got {a.shape}"
            )
        if not self.spec.is_line and a.shape[1] != self.spec.require_dense():
            raise ValueError(f"expected {self.spec.order} positions, got {a.shape[1]}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def positions(self) -> np.ndarray:
        """Integer positions of the columns (flat indices for finite groups)."""
        n = self.amplitudes.shape[1]
        if self.spec.is_line:
            return np.arange(self.origin, self.origin + n)
        return np.arange(n)

    def column(self, g: Sequence[int] | int) -> int:
        """Column index of position ``g``."""
        if self.spec.is_line:
            x = int(g[0]) if isinstance(g, (tuple, list)) else int(g)
            col = x - self.origin
            if not 0 <= col < self.amplitudes.shape[1]:
                raise WindowOverflowError(f"position {x} is outside the window")
            return col
        return self.spec.index(g)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amplitudes: np.ndarray, time: int | None = None) -> "WalkState":
        return replace(self, amplitudes=amplitudes, time=self.time if time is None else time)


def uniform_coin_vector(d: int) -> np.ndarray:
    return np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128)


def point_state(
    spec: GroupSpec,
    gens: GeneratorSet,
    coin_vector: Sequence[complex],
    position: Sequence[int] | int = 0,
    horizon: int = 0,
) -> WalkState:
    """
    Walker localized at ``position`` with the given coin vector.

    On the line the window covers every site reachable within ``horizon``
    steps. The coin vector must have unit norm.
    """
    phi = np.asarray(coin_vector, dtype=np.complex128)
    if phi.shape != (len(gens),):
        raise ValueError(f"coin vector needs {len(gens)} entries, got shape {phi.shape}")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-10:
        raise ValueError(f"coin vector must be normalized, norm = {np.linalg.norm(phi):.6g}")
    if spec.is_line:
        x0 = int(position[0]) if isinstance(position, (tuple, list)) else int(position)
        reach = int(horizon) * int(np.max(np.abs(gens.as_array())))
        amps = np.zeros((len(gens), 2 * reach + 1), dtype=np.complex128)
        amps[:, reach] = phi
        return WalkState(amps, spec, gens, 0, x0 - reach)
    if isinstance(position, int):
        position = spec.from_index(position) if position else spec.identity
    amps = np.zeros((len(gens), spec.require_dense()), dtype=np.complex128)
    amps[:, spec.index(position)] = phi
    return WalkState(amps, spec, gens)


def symmetric_line_state(horizon: int, position: int = 0) -> WalkState:
    """``(|0> + i|1>)/sqrt(2)`` at ``position`` on the line, unit generators."""
    spec = GroupSpec.line()
    phi = np.array([1.0, 1.0j]) / np.sqrt(2.0)
    return point_state(spec, unit_generators(spec), phi, position, horizon)


def hypercube_symmetric_state(n: int) -> WalkState:
    """Equal superposition of all coin directions at the origin of ``Z_2^n``."""
    spec = GroupSpec.hypercube(n)
    return point_state(spec, unit_generators(spec), uniform_coin_vector(n))


def apply_coin(state: WalkState, coin: Coin) -> WalkState:
    if coin.dim != len(state.gens):
        raise ValueError(f"coin dimension {coin.dim} does not match |S| = {len(state.gens)}")
    return state.with_amplitudes(coin.matrix @ state.amplitudes)


@lru_cache(maxsize=64)
def _source_table(spec: GroupSpec, gens: GeneratorSet, sign: int) -> np.ndarray:
    """``src[h, g]`` = flat index of ``g - sign*h``; gathering from it shifts by ``sign*h``."""
    coords = spec.coordinates()
    moduli = np.asarray(spec.moduli)[:, None]
    src = np.empty((len(gens), coords.shape[1]), dtype=np.intp)
    for label, h in enumerate(gens.as_array()):
        shifted = np.remainder(coords - sign * h[:, None], moduli)
        src[label] = np.ravel_multi_index(tuple(shifted), spec.moduli)
    src.setflags(write=False)
    return src


def _shift(state: WalkState, sign: int) -> WalkState:
    a = state.amplitudes
    if not state.spec.is_line:
        src = _source_table(state.spec, state.gens, sign)
        return state.with_amplitudes(np.take_along_axis(a, src, axis=1))
    out = np.zeros_like(a)
    width = a.shape[1]
    for label, (h,) in enumerate(state.gens.as_array()):
        s = sign * int(h)
        row = a[label]
        lost = row[width - s:] if s > 0 else row[: -s]
        if np.any(lost != 0):
            raise WindowOverflowError(
                f"shift by {s} at t={state.time} moves amplitude out of the window "
                f"[{state.origin}, {state.origin + width - 1}]"
            )
        if s > 0:
            out[label, s:] = row[: width - s]
        else:
            out[label, : width + s] = row[-s:]
    return state.with_amplitudes(out)


def apply_shift(state: WalkState) -> WalkState:
    """Move the amplitude at ``(h, g)`` to ``(h, g h)``."""
    return _shift(state, +1)


def apply_inverse_shift(state: WalkState) -> WalkState:
    return _shift(state, -1)


def step(state: WalkState, coin: Coin) -> WalkState:
    out = apply_shift(apply_coin(state, coin))
    return out.with_amplitudes(out.amplitudes, time=state.time + 1)


def inverse_step(state: WalkState, coin: Coin) -> WalkState:
    """Exact inverse of :func:`step`."""
    back = apply_inverse_shift(state)
    return back.with_amplitudes(coin.matrix.conj().T @ back.amplitudes, time=state.time - 1)


def evolve(state: WalkState, coin: Coin, t: int) -> WalkState:
    if t < 0:
        raise ValueError(f"number of steps must be >= 0, got {t}")
    for _ in range(t):
        state = step(state, coin)
    return state


def position_distribution(state: WalkState) -> np.ndarray:
    """``P_g = sum_h |psi[h, g]|^2`` over the state's columns."""
    return np.sum(np.abs(state.amplitudes) ** 2, axis=0)
