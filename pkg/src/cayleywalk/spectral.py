"""
Fourier-space analysis of the walk.

In the Fourier basis the walk decouples into one ``|S| x |S|`` block per
wave vector ``g``: ``U_g[h1, h2] = chi_{h1}(g) C[h1, h2]``. This module
builds those blocks, diagonalizes them, propagates states through them,
and assembles dispersion tables.

Conventions
-----------
* Eigenvalues are stored as eigenphases ``theta`` in ``(-pi, pi]`` with
  eigenvalue ``exp(i theta)``. The energy of a branch is ``-theta``
  (``U = exp(-iH)``), unwrapped to be continuous along the branch.
* Finite groups use ``chi_h(g) = exp(+2 pi i h.g / N)``. On the line the
  transform is ``psi_k = sum_n exp(-ikn) psi_n``, so the block is
  ``diag(exp(-ihk)) C``; for the Hadamard coin this is
  ``[[e^{-ik}, e^{-ik}], [e^{ik}, -e^{ik}]] / sqrt(2)``. The two conventions
  differ by ``k -> -k``, which flips the sign labels of velocity branches
  and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from .group import GeneratorSet, GroupSpec, fourier_transform, unit_generators
from .walk import Coin, WalkState, point_state

__all__ = [
    "SpectralError",
    "ReducedOperator",
    "SpectralDecomposition",
    "DispersionPoint",
    "DispersionTable",
    "reduced_operator",
    "reduced_operator_stack",
    "diagonalize",
    "spectral_evolve",
    "dispersion_table",
    "line_grid",
    "wrap_phase",
]

DEGENERACY_TOL = 1e-8


class SpectralError(RuntimeError):
    """Eigensolver failure or loss of normality."""


def wrap_phase(theta):
    """Map angles into ``(-pi, pi]``; values within 1e-12 of ``-pi`` go to ``pi``."""
    t = np.remainder(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    t = np.where(t <= -np.pi + 1e-12, t + 2 * np.pi, t)
    return t if t.ndim else float(t)


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    wave_vector: tuple[int, ...] | float
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenphases sorted ascending; column ``b`` of ``eigenvectors`` is branch ``b``."""

    eigenphases: np.ndarray
    eigenvectors: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.eigenphases)

    def power(self, t: int) -> np.ndarray:
        """``U^t`` rebuilt from the eigensystem."""
        V = self.eigenvectors
        return (V * np.exp(1j * t * self.eigenphases)) @ V.conj().T

    def reconstruct(self) -> np.ndarray:
        return self.power(1)


def _line_phases(k, gens: GeneratorSet) -> np.ndarray:
    """``exp(-i h k)`` for every wave number and generator, shape (M, |S|)."""
    h = gens.as_array()[:, 0].astype(float)
    return np.exp(-1j * np.outer(np.atleast_1d(k), h))


def _finite_phases(wave_vectors: np.ndarray, spec: GroupSpec, gens: GeneratorSet) -> np.ndarray:
    """``chi_h(g)`` for wave vectors of shape (M, rank), result (M, |S|)."""
    hs = gens.as_array()
    frac = np.zeros((wave_vectors.shape[0], hs.shape[0]))
    for j, m in enumerate(spec.moduli):
        frac += np.remainder(np.outer(wave_vectors[:, j], hs[:, j]), m) / m
    return np.exp(2j * np.pi * np.remainder(frac, 1.0))


def reduced_operator(
    wave_vector: Sequence[int] | float,
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet,
) -> ReducedOperator:
    """
    Block of the walk at one wave vector: row ``h`` of the coin scaled by ``chi_h(g)``.

    ``wave_vector`` is a group element for finite groups and a real ``k`` for
    the line.
    """
    if coin.dim != len(gens):
        raise ValueError(f"coin dimension {coin.dim} does not match |S| = {len(gens)}")
    if spec.is_line:
        if len(gens) != 2:
            raise ValueError(f"the line reduction needs |S| = 2, got {len(gens)}")
        k = float(wave_vector)
        chi = _line_phases(k, gens)[0]
        return ReducedOperator(k, chi[:, None] * coin.matrix)
    g = spec.element(wave_vector)
    chi = _finite_phases(np.array([g], dtype=np.int64), spec, gens)[0]
    return ReducedOperator(g, chi[:, None] * coin.matrix)


def reduced_operator_stack(phases: np.ndarray, coin: Coin) -> np.ndarray:
    """All blocks at once from a (M, |S|) array of character values."""
    return phases[:, :, None] * coin.matrix[None, :, :]


def diagonalize(op: ReducedOperator | np.ndarray) -> SpectralDecomposition:
    """
    Eigensystem of a unitary block via the complex Schur form.

    For a normal matrix the Schur factor is diagonal and the Schur vectors
    are an orthonormal eigenbasis, including inside degenerate eigenspaces.
    A non-negligible strictly upper part means the input was not normal;
    that is reported rather than approximated.
    """
    m = op.matrix if isinstance(op, ReducedOperator) else np.asarray(op, dtype=np.complex128)
    try:
        T, Z = scipy.linalg.schur(m, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(f"Schur decomposition failed: {exc}") from exc
    off = np.max(np.abs(np.triu(T, 1))) if m.shape[0] > 1 else 0.0
    if off > 1e-9:
        raise SpectralError(f"matrix is not normal (Schur off-diagonal {off:.3g})")
    phases = wrap_phase(np.angle(np.diag(T)))
    order = np.argsort(phases, kind="stable")
    return SpectralDecomposition(np.atleast_1d(phases)[order], Z[:, order])


def _block_powers(blocks: np.ndarray, t: int) -> np.ndarray:
    out = np.empty_like(blocks)
    for i, b in enumerate(blocks):
        out[i] = diagonalize(b).power(t)
    return out


def spectral_evolve(state: WalkState, coin: Coin, t: int) -> WalkState:
    """
    Propagate ``t`` steps in Fourier space.

    Each coin row is transformed with ``F_G``, every wave-vector block is
    raised to the ``t``-th power through its eigendecomposition, and the
    result is transformed back. Line states are embedded in the cycle
    ``Z_W`` (``W`` = window width), which is exact as long as the support
    after ``t`` steps stays inside the window; otherwise a ``ValueError`` is
    raised.
    """
    if t < 0:
        raise ValueError(f"number of steps must be >= 0, got {t}")
    if state.spec.is_line:
        return _spectral_evolve_line(state, coin, t)
    spec, gens = state.spec, state.gens
    if coin.dim != len(gens):
        raise ValueError(f"coin dimension {coin.dim} does not match |S| = {len(gens)}")
    psi = fourier_transform(state.amplitudes, spec, "forward")
    blocks = reduced_operator_stack(_finite_phases(spec.coordinates().T, spec, gens), coin)
    powers = _block_powers(blocks, t)
    psi = np.einsum("gab,bg->ag", powers, psi)
    out = fourier_transform(psi, spec, "inverse")
    return state.with_amplitudes(out, time=state.time + t)


def _spectral_evolve_line(state: WalkState, coin: Coin, t: int) -> WalkState:
    a = state.amplitudes
    width = a.shape[1]
    reach = t * int(np.max(np.abs(state.gens.as_array())))
    support = np.flatnonzero(np.any(a != 0, axis=0))
    if support.size and (support[0] - reach < 0 or support[-1] + reach >= width):
        raise ValueError(
            f"{t} steps would leave the line window; allocate a wider window for exact embedding"
        )
    cycle = GroupSpec.finite(width)
    cyc_gens = GeneratorSet(cycle, tuple((int(h) % width,) for h in state.gens.as_array()[:, 0]))
    embedded = WalkState(a, cycle, cyc_gens)
    evolved = spectral_evolve(embedded, coin, t)
    return state.with_amplitudes(evolved.amplitudes, time=state.time + t)


# --------------------------------------------------------------------------
# Dispersion tables


@dataclass(frozen=True)
class DispersionPoint:
    wave_number: float | int | tuple[int, ...]
    branch: int
    omega: float
    group_velocity: float = float("nan")
    phase_velocity: float = float("nan")
    multiplicity: int = 1


@dataclass(eq=False)
class DispersionTable:
    """
    Branch-matched eigenphases over a set of wave numbers.

    Attributes
    ----------
    kind : str
        ``"hypercube"`` (rows are Hamming weights ``0..n``), ``"line"``,
        ``"cycle"`` (single cyclic factor, ``k = 2 pi g / N``) or
        ``"general"`` (every element of a finite group, no continuity
        matching).
    wave_numbers : ndarray
        Shape (M,) for the 1-D kinds, (M, rank) integer elements for general.
    eigenphases : ndarray
        Shape (M, B), values in ``(-pi, pi]``; column ``b`` is branch ``b``.
    energies : ndarray
        ``-eigenphases`` unwrapped along each branch from the reference row,
        where the energy is taken in ``[-pi, pi)``.
    eigenvectors : ndarray or None
        Shape (M, |S|, B) when stored.
    multiplicity : ndarray
        Shape (M, B) multiplicity of each branch's eigenvalue in its block.
    spacing : float
        Wave-number step between adjacent rows (1 for hypercube weights).
    reference : int
        Row index where branch labels are fixed by ascending eigenphase.
    """

    kind: str
    wave_numbers: np.ndarray
    eigenphases: np.ndarray
    energies: np.ndarray
    eigenvectors: np.ndarray | None
    multiplicity: np.ndarray
    spacing: float
    reference: int
    coin: Coin
    spec: GroupSpec
    gens: GeneratorSet
    meta: dict = field(default_factory=dict)

    @property
    def n_branches(self) -> int:
        return self.eigenphases.shape[1]

    def __len__(self) -> int:
        return self.eigenphases.shape[0]

    def wave_number(self, row: int):
        w = self.wave_numbers[row]
        if self.kind == "general":
            return tuple(int(x) for x in w)
        if self.kind == "hypercube":
            return int(w)
        return float(w)

    def points(
        self,
        group_velocity: np.ndarray | None = None,
        phase_velocity: np.ndarray | None = None,
    ) -> Iterator[DispersionPoint]:
        """Records in wave-number order, branches inner."""
        nan = float("nan")
        for i in range(len(self)):
            for b in range(self.n_branches):
                yield DispersionPoint(
                    self.wave_number(i),
                    b,
                    float(self.eigenphases[i, b]),
                    nan if group_velocity is None else float(group_velocity[i, b]),
                    nan if phase_velocity is None else float(phase_velocity[i, b]),
                    int(self.multiplicity[i, b]),
                )


def line_grid(m: int = 1025) -> np.ndarray:
    """Uniform endpoint-inclusive grid on ``[-pi, pi]``."""
    if m < 2:
        raise ValueError(f"grid needs at least 2 points, got {m}")
    return np.linspace(-np.pi, np.pi, m)


def _count_multiplicity(phases: np.ndarray, values: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    diff = np.abs(wrap_phase(values[:, None] - phases[None, :]))
    return np.sum(diff < tol, axis=1)


def _unwrap_from(values: np.ndarray, ref: int) -> np.ndarray:
    """Unwrap each column outward from row ``ref``."""
    out = values.copy()
    out[ref:] = np.unwrap(values[ref:], axis=0)
    out[: ref + 1] = np.unwrap(values[ref::-1], axis=0)[::-1]
    return out


def _track_branches(phases: np.ndarray, vectors: np.ndarray, ref: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Reorder branches so each column varies continuously, walking outward from ``ref``.

    Adjacent rows are matched greedily by eigenvector overlap
    ``|<v_i(k)|v_j(k')>|^2``; ties, and rows with degenerate eigenphases
    (where eigenvectors are not unique), use eigenphase proximity instead.
    """
    m, _, nb = vectors.shape
    P = phases.copy()
    V = vectors.copy()

    def match(prev: int, cur: int, before: int | None):
        theta_prev = P[prev]
        if before is not None:
            predicted = theta_prev + wrap_phase(P[prev] - P[before])
        else:
            predicted = theta_prev
        dist = np.abs(wrap_phase(predicted[:, None] - P[cur][None, :]))
        gaps = np.abs(wrap_phase(P[cur][:, None] - P[cur][None, :]))
        degenerate = np.any(gaps[~np.eye(nb, dtype=bool)] < DEGENERACY_TOL) if nb > 1 else False
        if degenerate:
            score = -dist
        else:
            overlap = np.abs(V[prev].conj().T @ V[cur]) ** 2
            # Round so near-equal overlaps tie and fall through to the phase term.
            score = np.round(overlap, 9) - 1e-12 * dist
        perm = np.empty(nb, dtype=int)
        free_a = set(range(nb))
        free_b = set(range(nb))
        for flat in np.argsort(-score, axis=None, kind="stable"):
            a, b = divmod(int(flat), nb)
            if a in free_a and b in free_b:
                perm[a] = b
                free_a.discard(a)
                free_b.discard(b)
                if not free_a:
                    break
        P[cur] = P[cur][perm]
        V[cur] = V[cur][:, perm]

    for i in range(ref + 1, m):
        match(i - 1, i, i - 2 if i - 2 >= ref else None)
    for i in range(ref - 1, -1, -1):
        match(i + 1, i, i + 2 if i + 2 <= ref else None)
    return P, V


def _hypercube_table(coin: Coin, spec: GroupSpec, gens: GeneratorSet) -> DispersionTable:
    """
    Rows are Hamming weights; four branches per row.

    Branch 0 carries the eigenvalue ``exp(-i omega)``, branch 1
    ``exp(+i omega)`` (``0 <= omega <= pi``), branch 2 the flat ``+1`` band and
    branch 3 the flat ``-1`` band. At ``|k| = 0`` and ``|k| = n`` the pair
    merges into ``+1`` or ``-1``; a flat band can also be absent from a row,
    which shows up as multiplicity 0.
    """
    n = spec.rank
    weights = np.arange(n + 1)
    phases = np.zeros((n + 1, 4))
    energies = np.zeros((n + 1, 4))
    mult = np.zeros((n + 1, 4), dtype=int)
    for w in weights:
        k = np.zeros(n, dtype=np.int64)
        # gens label j flips tuple position of generator j; flip the first w labels.
        for h in gens.as_array()[:w]:
            k = k + h
        dec = diagonalize(reduced_operator(tuple(k % 2), coin, spec, gens))
        th = dec.eigenphases
        off = th[(np.abs(th) > 1e-7) & (np.abs(wrap_phase(th - np.pi)) > 1e-7)]
        if off.size == 2:
            omega = float(np.max(np.abs(off)))
        elif off.size == 0:
            omega = 0.0 if w < n / 2 else np.pi
        else:
            raise SpectralError(
                f"weight {w}: expected a conjugate pair off +-1, found phases {off}"
            )
        phases[w] = wrap_phase(np.array([-omega, omega, 0.0, np.pi]))
        mult[w] = _count_multiplicity(th, phases[w])
        energies[w] = [omega, -omega, 0.0, -np.pi]
    return DispersionTable(
        "hypercube", weights, phases, energies, None, mult, 1.0, 0, coin, spec, gens,
        {"n": n},
    )


def _reference_energies(phases_row: np.ndarray) -> np.ndarray:
    e = -phases_row
    return np.where(e >= np.pi - 1e-12, e - 2 * np.pi, e)


def _one_dim_table(kind: str, ks: np.ndarray, phases_stack: np.ndarray, coin, spec, gens, spacing):
    blocks = reduced_operator_stack(phases_stack, coin)
    m, d = len(ks), coin.dim
    P = np.empty((m, d))
    V = np.empty((m, d, d), dtype=np.complex128)
    mult = np.empty((m, d), dtype=int)
    for i, b in enumerate(blocks):
        dec = diagonalize(b)
        P[i], V[i] = dec.eigenphases, dec.eigenvectors
        mult[i] = _count_multiplicity(dec.eigenphases, dec.eigenphases)
    ref = int(np.argmin(np.abs(ks)))
    P, V = _track_branches(P, V, ref)
    raw = -P
    raw[ref] = _reference_energies(P[ref])
    energies = _unwrap_from(raw, ref)
    return DispersionTable(kind, ks, P, energies, V, mult, spacing, ref, coin, spec, gens)


def dispersion_table(
    coin: Coin,
    spec: GroupSpec,
    gens: GeneratorSet | None = None,
    grid: int = 1025,
) -> DispersionTable:
    """
    Eigenphases of every reduced block, organized by wave number.

    * line: a uniform grid of ``grid`` points on ``[-pi, pi]``;
    * hypercube with unit generators and the Grover coin: Hamming weights
      ``0..n`` (the spectrum depends only on the weight);
    * single cyclic factor: ``k = 2 pi g / N`` ordered on ``(-pi, pi]``;
    * any other finite group: every element, branches sorted by eigenphase.
    """
    gens = gens or unit_generators(spec)
    if coin.dim != len(gens):
        raise ValueError(f"coin dimension {coin.dim} does not match |S| = {len(gens)}")
    if spec.is_line:
        if len(gens) != 2:
            raise ValueError(f"the line reduction needs |S| = 2, got {len(gens)}")
        ks = line_grid(grid)
        return _one_dim_table("line", ks, _line_phases(ks, gens), coin, spec, gens, ks[1] - ks[0])
    if spec.is_hypercube and gens.is_unit and coin.is_grover() and spec.rank > 1:
        return _hypercube_table(coin, spec, gens)
    if spec.rank == 1:
        N = spec.moduli[0]
        g = np.arange(N)
        signed = np.where(g > N // 2, g - N, g)
        order = np.argsort(signed, kind="stable")
        g, signed = g[order], signed[order]
        ks = 2 * np.pi * signed / N
        stack = _finite_phases(g[:, None], spec, gens)
        return _one_dim_table("cycle", ks, stack, coin, spec, gens, 2 * np.pi / N)
    coords = spec.coordinates().T
    stack = reduced_operator_stack(_finite_phases(coords, spec, gens), coin)
    m, d = coords.shape[0], coin.dim
    P = np.empty((m, d))
    V = np.empty((m, d, d), dtype=np.complex128)
    mult = np.empty((m, d), dtype=int)
    for i, b in enumerate(stack):
        dec = diagonalize(b)
        P[i], V[i] = dec.eigenphases, dec.eigenvectors
        mult[i] = _count_multiplicity(dec.eigenphases, dec.eigenphases)
    energies = -P
    energies = np.where(energies >= np.pi - 1e-12, energies - 2 * np.pi, energies)
    return DispersionTable(
        "general", coords, P, energies, V, mult, float("nan"), 0, coin, spec, gens,
        {"extension": "per-axis wave numbers 2*pi*g_j/N_j; group velocity is the norm "
                      "of the per-axis derivative vector"},
    )
