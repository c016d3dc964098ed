"""
Group and phase velocities, and the group-velocity hitting time.

Velocities are derivatives (group) and ratios (phase) of branch energies
with respect to the wave number. Three routes to the group velocity exist:

``finite-difference``
    ``np.gradient`` on the unwrapped branch energies: central differences
    inside, one-sided at the ends.
``spectral``
    Exact derivative from the eigenvectors. For ``U(k) = D(k) C`` with
    ``D = diag(exp(-i h k))`` a branch with eigenvector ``v`` has
    ``dE/dk = sum_h h |v_h|^2``; degenerate eigenspaces are resolved by
    diagonalizing the displacement operator inside them.
``closed``
    Closed forms for the Grover hypercube and the Hadamard line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .group import GeneratorSet, GroupSpec, graph_distance, unit_generators
from .spectral import (
    DEGENERACY_TOL,
    DispersionTable,
    diagonalize,
    dispersion_table,
    reduced_operator,
    wrap_phase,
)
from .walk import Coin

__all__ = [
    "VelocityProfile",
    "GvHittingResult",
    "group_velocity_numeric",
    "group_velocity_spectral",
    "group_velocity_closed_hypercube",
    "group_velocity_closed_line",
    "phase_velocity_closed_line",
    "phase_velocity",
    "velocity_profile",
    "gv_hitting_time",
]


@dataclass(frozen=True, eq=False)
class VelocityProfile:
    """Per-(row, branch) velocities plus the location of the fastest group velocity."""

    group_velocity: np.ndarray
    phase_velocity: np.ndarray
    v_g_max: float
    argmax_wave_number: float | int | tuple
    argmax_branch: int
    method: str


@dataclass(frozen=True)
class GvHittingResult:
    distance: int
    v_g_max: float
    hitting_time: float


def group_velocity_closed_hypercube(n: int, weight: int) -> float:
    """``1/sqrt(|k|(n-|k|))`` for ``0 < |k| < n``, else 0 (positive branch)."""
    if not 0 <= weight <= n:
        raise ValueError(f"Hamming weight must lie in [0, {n}], got {weight}")
    if weight in (0, n):
        return 0.0
    return 1.0 / math.sqrt(weight * (n - weight))


def group_velocity_closed_line(k):
    """Positive Hadamard branch ``cos k / sqrt(1 + cos^2 k)``."""
    c = np.cos(k)
    return c / np.sqrt(1.0 + c * c)


def phase_velocity_closed_line(k):
    """Positive Hadamard branch ``arcsin(sin k / sqrt 2) / k``, limit ``1/sqrt 2`` at 0."""
    k = np.asarray(k, dtype=float)
    safe = np.where(k == 0, 1.0, k)
    v = np.arcsin(np.sin(safe) / np.sqrt(2.0)) / safe
    out = np.where(k == 0, 1.0 / np.sqrt(2.0), v)
    return out if out.ndim else float(out)


def group_velocity_numeric(table: DispersionTable) -> np.ndarray:
    """Finite-difference ``dE/dk`` per branch, shape (rows, branches)."""
    if table.kind == "general":
        raise ValueError("finite differences need a 1-D, branch-matched table")
    if len(table) < 2:
        raise ValueError(f"need at least 2 wave numbers per branch, got {len(table)}")
    return np.gradient(table.energies, table.spacing, axis=0, edge_order=1)


def _displacements(gens: GeneratorSet, spec: GroupSpec) -> np.ndarray:
    """Signed generator components, shape (|S|, rank), in the sign convention of dE/dk."""
    h = gens.signed_array().astype(float)
    # Finite groups carry exp(+i h.k) where the line carries exp(-i h k).
    return h if spec.is_line else -h


def _spectral_derivatives(phases: np.ndarray, vectors: np.ndarray, disp: np.ndarray) -> np.ndarray:
    """dE/dk_axis for one block; returns (branches, axes)."""
    nb = phases.shape[0]
    out = np.zeros((nb, disp.shape[1]))
    # Group branches into clusters of equal eigenphase.
    clusters: list[list[int]] = []
    for b in range(nb):
        for c in clusters:
            if abs(wrap_phase(phases[b] - phases[c[0]])) < DEGENERACY_TOL:
                c.append(b)
                break
        else:
            clusters.append([b])
    for c in clusters:
        Vc = vectors[:, c]
        for axis in range(disp.shape[1]):
            M = Vc.conj().T @ (disp[:, axis, None] * Vc)
            if len(c) == 1:
                out[c[0], axis] = M[0, 0].real
            else:
                out[c, axis] = np.linalg.eigvalsh(M)
    return out


def group_velocity_spectral(table: DispersionTable) -> np.ndarray:
    """
    Eigenvector-based derivative of each branch energy.

    For the 1-D kinds this is ``dE/dk``; for ``general`` tables it is the
    Euclidean norm of the per-axis derivative vector.
    """
    if table.eigenvectors is None:
        raise ValueError("table does not store eigenvectors")
    disp = _displacements(table.gens, table.spec)
    out = np.empty(table.eigenphases.shape)
    for i in range(len(table)):
        d = _spectral_derivatives(table.eigenphases[i], table.eigenvectors[i], disp)
        out[i] = d[:, 0] if table.kind != "general" else np.linalg.norm(d, axis=1)
    return out


def _spectral_speed_at(k: float, coin: Coin, spec: GroupSpec, gens: GeneratorSet) -> float:
    dec = diagonalize(reduced_operator(k, coin, spec, gens))
    d = _spectral_derivatives(dec.eigenphases, dec.eigenvectors, _displacements(gens, spec))
    return float(np.max(np.abs(d)))


def _closed_hypercube_velocities(table: DispersionTable) -> np.ndarray:
    n = table.meta["n"]
    v = np.array([group_velocity_closed_hypercube(n, int(w)) for w in table.wave_numbers])
    out = np.zeros(table.eigenphases.shape)
    out[:, 0] = v
    out[:, 1] = -v
    return out


def phase_velocity(table: DispersionTable, group_velocity: np.ndarray | None = None) -> np.ndarray:
    """
    ``E / k`` per branch.

    At ``k = 0`` the ratio is replaced by its limit ``dE/dk`` when the branch
    energy vanishes there (taken from ``group_velocity``) and is NaN
    otherwise. Hypercube rows at ``|k| = 0`` are flat and get 0. General
    tables divide by the norm of the per-axis wave-number vector.
    """
    E = table.energies
    if table.kind == "general":
        kappa = 2 * np.pi * table.wave_numbers / np.asarray(table.spec.moduli)
        signed = wrap_phase(kappa)
        k = np.linalg.norm(np.atleast_2d(signed), axis=1)
    else:
        k = table.wave_numbers.astype(float)
    k = k[:, None]
    zero = np.isclose(k, 0.0, atol=1e-15)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(zero, np.nan, E / np.where(zero, 1.0, k))
    if table.kind == "hypercube":
        v[zero[:, 0]] = 0.0
    elif group_velocity is not None:
        limit = np.where(np.abs(E) < 1e-12, group_velocity, np.nan)
        v = np.where(zero, limit, v)
    return v


def _closed_form_available(table: DispersionTable) -> bool:
    if table.kind == "hypercube":
        return True
    return (
        table.kind == "line"
        and table.gens.is_unit
        and np.allclose(table.coin.matrix, np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-14)
    )


def velocity_profile(table: DispersionTable, method: str = "auto") -> VelocityProfile:
    """
    Fill group and phase velocities for a dispersion table and locate ``v_g^max``.

    ``method="auto"`` uses the closed form on the Grover hypercube (whose
    rows are integer Hamming weights, where a derivative needs the analytic
    continuation) and the spectral derivative everywhere else. On the line
    the grid maximum is refined by a bounded scalar search between the
    neighbouring grid points, so ``v_g^max`` is not limited by grid
    resolution.
    """
    if method == "auto":
        method = "closed" if table.kind == "hypercube" else "spectral"
    if method == "closed":
        if not _closed_form_available(table):
            raise ValueError(f"no closed form for a {table.kind} table with coin {table.coin.name!r}")
        if table.kind == "hypercube":
            vg = _closed_hypercube_velocities(table)
        else:
            v = group_velocity_closed_line(table.wave_numbers)
            # Branch 0 carries energy +omega_k at k = 0.
            vg = np.stack([v, -v], axis=1)
    elif method == "spectral":
        vg = group_velocity_spectral(table)
    elif method in ("finite-difference", "numeric"):
        method = "finite-difference"
        vg = group_velocity_numeric(table)
    else:
        raise ValueError(f"unknown velocity method {method!r}")
    vph = phase_velocity(table, vg)

    speed = np.abs(vg)
    # Ties (e.g. k = 0 and k = +-pi on the line) go to the smallest |k|.
    rows, branches = np.nonzero(speed >= np.max(speed) - 1e-12)
    if table.kind == "general":
        size = np.linalg.norm(wrap_phase(2 * np.pi * table.wave_numbers[rows] / np.asarray(table.spec.moduli)), axis=1)
    else:
        size = np.abs(table.wave_numbers[rows].astype(float))
    pick = int(np.argmin(size))
    flat_row, flat_branch = int(rows[pick]), int(branches[pick])
    vmax = float(speed[flat_row, flat_branch])
    argmax_k = table.wave_number(flat_row)
    if table.kind == "line" and 0 < flat_row < len(table) - 1 and method != "finite-difference":
        lo = float(table.wave_numbers[flat_row - 1])
        hi = float(table.wave_numbers[flat_row + 1])
        res = minimize_scalar(
            lambda k: -_spectral_speed_at(k, table.coin, table.spec, table.gens),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if -res.fun > vmax:
            vmax, argmax_k = float(-res.fun), float(res.x)
    return VelocityProfile(vg, vph, vmax, argmax_k, int(flat_branch), method)


def gv_hitting_time(
    g1: Sequence[int],
    g2: Sequence[int],
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    profile: VelocityProfile | None = None,
    grid: int = 1025,
) -> GvHittingResult:
    """
    Word-metric distance divided by the largest group speed over all wave numbers and branches.

    A walk whose bands are all flat has no propagating mode; its hitting
    time is reported as ``inf``.
    """
    gens = gens or unit_generators(spec)
    d = graph_distance(g1, g2, gens)
    if profile is None:
        profile = velocity_profile(dispersion_table(coin, spec, gens, grid=grid))
    vmax = profile.v_g_max
    if d == 0:
        return GvHittingResult(0, vmax, 0.0)
    if vmax <= 1e-14:
        return GvHittingResult(d, vmax, math.inf)
    return GvHittingResult(d, vmax, d / vmax)
