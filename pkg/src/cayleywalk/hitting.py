"""
Simulated hitting times: one-shot, concurrent and average.

The one-shot time watches the unitary walk's probability at the target.
The concurrent and average times use the measured walk: after every step
the target is checked with ``P = I x |g2><g2|``; the detected part is
removed and the remainder continues without renormalization, so the
squared norm of the state is the probability of not having stopped yet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .group import GeneratorSet, GroupSpec, unit_generators
from .walk import Coin, WalkState, point_state, step, uniform_coin_vector

__all__ = [
    "HittingDefinition",
    "MeasuredWalkConfig",
    "ArrivalCurve",
    "HittingResult",
    "default_coin_state",
    "unitary_arrival_curve",
    "peak_threshold",
    "measured_step",
    "measured_arrival_curve",
    "one_shot",
    "concurrent",
    "average",
]


class HittingDefinition(str, Enum):
    ONE_SHOT = "one-shot"
    CONCURRENT = "concurrent"
    AVERAGE = "average"
    GROUP_VELOCITY = "gv"


@dataclass(frozen=True)
class MeasuredWalkConfig:
    target: tuple[int, ...]
    t_max: int
    eps_tail: float = 1e-9


@dataclass(frozen=True, eq=False)
class ArrivalCurve:
    """
    ``times[i]`` with probability ``p[i]`` and running sum ``cumulative[i]``.

    For the unitary walk ``p`` is the instantaneous probability at the
    target (``times`` starts at 0); for the measured walk it is the
    probability of stopping exactly at that step (``times`` starts at 1).
    """

    times: np.ndarray
    p: np.ndarray
    cumulative: np.ndarray
    kind: str


@dataclass(frozen=True, eq=False)
class HittingResult:
    definition: HittingDefinition
    value: float | int | None
    reached: bool
    parameters: dict
    curve: ArrivalCurve | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "definition": self.definition.value,
            "value": self.value,
            "reached": self.reached,
            "parameters": self.parameters,
            "diagnostics": self.diagnostics,
        }


def default_coin_state(spec: GroupSpec, gens: GeneratorSet) -> np.ndarray:
    """``(|0> + i|1>)/sqrt 2`` on the unit line, the uniform superposition otherwise."""
    if spec.is_line and len(gens) == 2:
        return np.array([1.0, 1.0j]) / np.sqrt(2.0)
    return uniform_coin_vector(len(gens))


def _start(spec, gens, phi0, g1, horizon) -> WalkState:
    if phi0 is None:
        phi0 = default_coin_state(spec, gens)
    return point_state(spec, gens, phi0, tuple(g1), horizon)


def _column(state: WalkState, g: Sequence[int]) -> int | None:
    """Target column, or None when the target lies outside a line window (never reachable)."""
    if state.spec.is_line:
        col = int(g[0]) - state.origin
        return col if 0 <= col < state.amplitudes.shape[1] else None
    return state.spec.index(g)


def unitary_arrival_curve(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    phi0: Sequence[complex] | None = None,
    t_max: int = 100,
) -> ArrivalCurve:
    """Probability at ``g2`` of the unmeasured walk for ``t = 0..t_max``."""
    gens = gens or unit_generators(spec)
    state = _start(spec, gens, phi0, g1, t_max)
    col = _column(state, g2)
    p = np.zeros(t_max + 1)
    for t in range(t_max + 1):
        if t:
            state = step(state, coin)
        if col is not None:
            p[t] = np.sum(np.abs(state.amplitudes[:, col]) ** 2)
    return ArrivalCurve(np.arange(t_max + 1), p, np.cumsum(p), "unitary")


def peak_threshold(curve: ArrivalCurve, skip_start: bool = True) -> tuple[int, float]:
    """First time of the largest instantaneous probability, and that probability."""
    p = curve.p[1:] if skip_start and len(curve.p) > 1 else curve.p
    offset = 1 if skip_start and len(curve.p) > 1 else 0
    i = int(np.argmax(p))
    return int(curve.times[i + offset]), float(p[i])


def measured_step(state: WalkState, coin: Coin, cfg: MeasuredWalkConfig) -> tuple[WalkState, float]:
    """
    One step of the measured walk.

    Returns the unnormalized no-detection state and the probability of
    detecting the walker at the target on this step.
    """
    state = step(state, coin)
    col = _column(state, cfg.target)
    if col is None:
        return state, 0.0
    a = state.amplitudes.copy()
    p = float(np.sum(np.abs(a[:, col]) ** 2))
    a[:, col] = 0.0
    return state.with_amplitudes(a), p


def measured_arrival_curve(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    phi0: Sequence[complex] | None = None,
    t_max: int = 100,
    stop_at: float | None = None,
    eps_tail: float = 0.0,
) -> tuple[ArrivalCurve, WalkState]:
    """
    Stopping probabilities ``p(1..T)`` of the measured walk.

    Iteration ends at ``t_max``, when the cumulative probability reaches
    ``stop_at``, or when the surviving mass drops to ``eps_tail``.
    """
    gens = gens or unit_generators(spec)
    cfg = MeasuredWalkConfig(tuple(spec.element(g2)), t_max, eps_tail)
    state = _start(spec, gens, phi0, g1, t_max)
    ps = []
    total = 0.0
    for _ in range(t_max):
        state, p = measured_step(state, coin, cfg)
        ps.append(p)
        total += p
        if stop_at is not None and total >= stop_at:
            break
        if eps_tail > 0 and state.norm() ** 2 <= eps_tail:
            break
    p = np.asarray(ps)
    return ArrivalCurve(np.arange(1, len(p) + 1), p, np.cumsum(p), "measured"), state


def _params(g1, g2, coin, spec, gens, phi0, **extra) -> dict:
    phi = default_coin_state(spec, gens) if phi0 is None else np.asarray(phi0, dtype=complex)
    return {
        "group": str(spec),
        "generators": [list(h) for h in gens.elements],
        "coin": coin.name,
        "from": list(spec.element(g1)),
        "to": list(spec.element(g2)),
        "coin_state": [[float(z.real), float(z.imag)] for z in phi],
        **extra,
    }


def one_shot(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    phi0: Sequence[complex] | None = None,
    threshold: float | str = "auto-peak",
    t_max: int = 100,
) -> HittingResult:
    """
    Smallest ``T <= t_max`` with unitary probability at ``g2`` at least ``threshold``.

    ``T = 0`` counts, so ``g1 == g2`` with any threshold the initial state
    meets gives 0. ``threshold="auto-peak"`` uses the largest probability
    seen at ``t >= 1`` within the horizon. When the threshold is never met
    the result is marked unreached and carries the best probability and its
    time.
    """
    gens = gens or unit_generators(spec)
    curve = unitary_arrival_curve(g1, g2, coin, spec, gens, phi0, t_max)
    t_peak, p_peak = peak_threshold(curve)
    if threshold == "auto-peak":
        p = p_peak
    else:
        p = float(threshold)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {p}")
    params = _params(g1, g2, coin, spec, gens, phi0, threshold=p, t_max=t_max,
                     threshold_rule=threshold if isinstance(threshold, str) else "fixed")
    hits = np.flatnonzero(curve.p >= p)
    diag = {"max_probability": float(np.max(curve.p)), "time_of_max": int(np.argmax(curve.p)),
            "peak_time_after_start": t_peak, "peak_probability_after_start": p_peak}
    if hits.size == 0:
        return HittingResult(HittingDefinition.ONE_SHOT, None, False, params, curve, diag)
    T = int(curve.times[hits[0]])
    diag["probability_at_hit"] = float(curve.p[hits[0]])
    return HittingResult(HittingDefinition.ONE_SHOT, T, True, params, curve, diag)


def concurrent(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    phi0: Sequence[complex] | None = None,
    threshold: float = 0.5,
    t_max: int = 100,
) -> HittingResult:
    """
    Smallest ``T <= t_max`` with measured-walk stopping probability by ``T`` at least ``threshold``.

    The first step is always counted, so ``threshold = 0`` gives ``T = 1``.
    """
    gens = gens or unit_generators(spec)
    p = float(threshold)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {p}")
    curve, state = measured_arrival_curve(g1, g2, coin, spec, gens, phi0, t_max, stop_at=p)
    params = _params(g1, g2, coin, spec, gens, phi0, threshold=p, t_max=t_max)
    attained = float(curve.cumulative[-1]) if len(curve.p) else 0.0
    diag = {"cumulative": attained, "residual_mass": state.norm() ** 2}
    hits = np.flatnonzero(curve.cumulative >= p)
    if hits.size == 0:
        return HittingResult(HittingDefinition.CONCURRENT, None, False, params, curve, diag)
    return HittingResult(HittingDefinition.CONCURRENT, int(curve.times[hits[0]]), True, params, curve, diag)


def average(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    phi0: Sequence[complex] | None = None,
    t_max: int = 1000,
    eps_tail: float = 1e-12,
) -> HittingResult:
    """
    Partial sum of ``sum_t t p(t)`` over the measured walk.

    The series may converge slowly or diverge, so the result always carries
    the surviving mass ``r = 1 - sum p(t)``; the full series exceeds the
    partial sum by at least ``r * (T + 1)`` where ``T`` is the last step
    taken. Iteration stops early once ``r <= eps_tail``.
    """
    gens = gens or unit_generators(spec)
    curve, state = measured_arrival_curve(g1, g2, coin, spec, gens, phi0, t_max, eps_tail=eps_tail)
    partial = float(np.sum(curve.times * curve.p))
    residual = float(state.norm() ** 2)
    steps = int(curve.times[-1]) if len(curve.times) else 0
    params = _params(g1, g2, coin, spec, gens, phi0, t_max=t_max, eps_tail=eps_tail)
    diag = {
        "partial_sum": partial,
        "residual_mass": residual,
        "steps": steps,
        "lower_bound_gap": residual * (steps + 1),
    }
    return HittingResult(HittingDefinition.AVERAGE, partial, residual <= max(eps_tail, 1e-9), params, curve, diag)
