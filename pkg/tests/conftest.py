"""Shared oracles and random-instance builders.

The dense builders here enumerate group elements with plain Python
integer arithmetic and never touch the library's shift tables or Fourier
code, so they serve as independent references.
"""

import itertools

import numpy as np
import pytest

from cayleywalk.group import GeneratorSet, GroupSpec, unit_generators
from cayleywalk.walk import Coin, WalkState, random_coin


def enumerate_elements(moduli):
    """Row-major order, matching the mixed-radix flat index."""
    return list(itertools.product(*[range(m) for m in moduli]))


def dense_walk_operator(spec: GroupSpec, gens: GeneratorSet, coin: Coin) -> np.ndarray:
    """Full ``U = S (C x I)`` on the basis ``|h>|g>`` with index ``h * |G| + g``."""
    elems = enumerate_elements(spec.moduli)
    pos = {g: i for i, g in enumerate(elems)}
    n, d = len(elems), len(gens)
    S = np.zeros((d * n, d * n))
    for a, h in enumerate(gens.elements):
        for g in elems:
            gh = tuple((x + y) % m for x, y, m in zip(g, h, spec.moduli))
            S[a * n + pos[gh], a * n + pos[g]] = 1.0
    return S @ np.kron(coin.matrix, np.eye(n))


def dense_arrival_oracle(U, psi0, target_col, n_positions, d, t_max):
    """``p(t) = Tr{P U (QU)^{t-1} rho (U^dag Q)^{t-1} U^dag P}`` with explicit matrices."""
    dim = U.shape[0]
    P = np.zeros((dim, dim))
    for a in range(d):
        P[a * n_positions + target_col, a * n_positions + target_col] = 1.0
    Q = np.eye(dim) - P
    rho = np.outer(psi0, psi0.conj())
    QU = Q @ U
    M = np.eye(dim)
    out = []
    for _ in range(t_max):
        A = P @ U @ M
        out.append(float(np.real(np.trace(A @ rho @ A.conj().T))))
        M = QU @ M
    return np.array(out)


def random_group(rng, max_order=64, max_factors=3):
    while True:
        k = int(rng.integers(1, max_factors + 1))
        moduli = tuple(int(m) for m in rng.integers(2, 9, size=k))
        if np.prod(moduli) <= max_order:
            return GroupSpec.finite(*moduli)


def random_generators(spec, rng, max_size=8):
    """Unit generators plus a few random extra inverse pairs, capped at ``max_size``."""
    base = list(unit_generators(spec).elements)
    if len(base) > max_size:
        return None
    elems = set(base)
    for _ in range(4):
        h = tuple(int(rng.integers(0, m)) for m in spec.moduli)
        hinv = tuple((-x) % m for x, m in zip(h, spec.moduli))
        if h == spec.identity or h in elems:
            continue
        extra = {h, hinv}
        if len(elems | extra) <= max_size:
            elems |= extra
    ordered = base + sorted(elems - set(base))
    return GeneratorSet(spec, tuple(ordered))


def random_instance(rng, max_order=64, max_deg=8):
    """(spec, gens, coin, state) with a random normalized state."""
    while True:
        spec = random_group(rng, max_order)
        gens = random_generators(spec, rng, max_deg)
        if gens is not None:
            break
    coin = random_coin(len(gens), rng)
    n = spec.order
    a = rng.normal(size=(len(gens), n)) + 1j * rng.normal(size=(len(gens), n))
    a /= np.linalg.norm(a)
    return spec, gens, coin, WalkState(a, spec, gens)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Lines recorded by the acceptance module, echoed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
