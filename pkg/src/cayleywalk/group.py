"""
Finite Abelian groups, the integer line, and their Cayley-graph machinery.

A finite Abelian group is handled in its cyclic decomposition
``Z_{N_1} x ... x Z_{N_n}``; elements are integer tuples reduced modulo
each ``N_j``. Dense arrays address elements by the row-major mixed-radix
flat index ``sum_j g_j * prod_{l>j} N_l``.

The line ``Z`` is a separate kind with single-component elements and no
moduli.
"""

from __future__ import annotations

import ast
import math
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GroupKind",
    "GroupSpec",
    "GeneratorSet",
    "DENSE_LIMIT",
    "parse_group",
    "parse_generators",
    "unit_generators",
    "compose",
    "inverse",
    "character",
    "character_table",
    "fourier_matrix",
    "fourier_transform",
    "graph_distance",
]

# Largest group order for which dense per-element arrays are built.
DENSE_LIMIT = 2**24

Element = tuple[int, ...]


class GroupKind(str, Enum):
    FINITE = "finite"
    LINE = "line"


@dataclass(frozen=True)
class GroupSpec:
    """
    Position space of the walk.

    Parameters
    ----------
    kind : GroupKind
        ``FINITE`` for ``Z_{N_1} x ... x Z_{N_n}``, ``LINE`` for ``Z``.
    moduli : tuple of int
        Cyclic factor orders ``N_j >= 2``. Empty for the line.
    """

    kind: GroupKind
    moduli: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", GroupKind(self.kind))
        object.__setattr__(self, "moduli", tuple(int(m) for m in self.moduli))
        if self.kind is GroupKind.LINE:
            if self.moduli:
                raise ValueError("the line takes no moduli")
            return
        if not self.moduli:
            raise ValueError("a finite group needs at least one cyclic factor")
        bad = [m for m in self.moduli if m < 2]
        if bad:
            raise ValueError(f"cyclic factor orders must be >= 2, got {bad}")

    @classmethod
    def finite(cls, *moduli: int) -> "GroupSpec":
        return cls(GroupKind.FINITE, tuple(moduli))

    @classmethod
    def hypercube(cls, n: int) -> "GroupSpec":
        return cls(GroupKind.FINITE, (2,) * n)

    @classmethod
    def line(cls) -> "GroupSpec":
        return cls(GroupKind.LINE)

    @property
    def is_line(self) -> bool:
        return self.kind is GroupKind.LINE

    @property
    def is_hypercube(self) -> bool:
        return not self.is_line and all(m == 2 for m in self.moduli)

    @property
    def rank(self) -> int:
        """Number of tuple components (1 for the line)."""
        return 1 if self.is_line else len(self.moduli)

    @property
    def order(self) -> int:
        """|G| as an exact Python int (may exceed the dense limit)."""
        if self.is_line:
            raise ValueError("the line has infinite order")
        return math.prod(self.moduli)

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def require_dense(self) -> int:
        """Return |G|, raising if per-element arrays would be too large."""
        if self.is_line:
            raise ValueError("operation requires a finite group, got the line")
        n = self.order
        if n > DENSE_LIMIT:
            raise ValueError(
                f"|G| = {n} exceeds the dense limit {DENSE_LIMIT}; "
                "this operation needs one array slot per group element"
            )
        return n

    def element(self, components: Iterable[int]) -> Element:
        """Validate and reduce an integer tuple to a group element."""
        comps = tuple(int(c) for c in components)
        if len(comps) != self.rank:
            raise ValueError(
                f"element {comps} has {len(comps)} components, group has rank {self.rank}"
            )
        if self.is_line:
            return comps
        return tuple(c % m for c, m in zip(comps, self.moduli))

    def index(self, g: Sequence[int]) -> int:
        """Mixed-radix flat index of ``g``."""
        self.require_dense()
        return int(np.ravel_multi_index(self.element(g), self.moduli))

    def from_index(self, i: int) -> Element:
        self.require_dense()
        return tuple(int(c) for c in np.unravel_index(int(i), self.moduli))

    def coordinates(self) -> np.ndarray:
        """Array of shape (rank, |G|); column ``i`` is the element with flat index ``i``."""
        n = self.require_dense()
        return np.indices(self.moduli).reshape(self.rank, n)

    def elements(self) -> list[Element]:
        return [tuple(int(c) for c in col) for col in self.coordinates().T]

    def ones(self) -> Element:
        """All-ones tuple (the corner opposite the identity on a hypercube)."""
        return self.element((1,) * self.rank)

    def signed(self, g: Sequence[int]) -> np.ndarray:
        """Representatives of each component in ``(-N_j/2, N_j/2]``."""
        g = np.asarray(self.element(g))
        if self.is_line:
            return g
        m = np.asarray(self.moduli)
        r = g % m
        return np.where(r > m // 2, r - m, r)

    def __str__(self) -> str:
        if self.is_line:
            return "line"
        if self.is_hypercube and len(self.moduli) > 1:
            return f"Z2^{len(self.moduli)}"
        return "x".join(f"Z{m}" for m in self.moduli)


def compose(a: Sequence[int], b: Sequence[int], spec: GroupSpec) -> Element:
    """Group operation: componentwise addition, reduced mod ``N_j`` on finite groups."""
    if len(a) != spec.rank or len(b) != spec.rank:
        raise ValueError(
            f"dimension mismatch: {len(a)} and {len(b)} components for rank {spec.rank}"
        )
    return spec.element(x + y for x, y in zip(a, b))


def inverse(a: Sequence[int], spec: GroupSpec) -> Element:
    return spec.element(-x for x in a)


@dataclass(frozen=True)
class GeneratorSet:
    """
    Symmetric generating set S, ordered; position in ``elements`` is the coin label.

    Validation happens at construction: elements must be distinct, exclude the
    identity, be closed under inversion, and generate the whole group.
    """

    spec: GroupSpec
    elements: tuple[Element, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        elems = tuple(self.spec.element(h) for h in self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems:
            raise ValueError("generating set is empty")
        if len(set(elems)) != len(elems):
            raise ValueError(f"duplicate generators in {elems}")
        ident = self.spec.identity
        if ident in elems:
            raise ValueError("the identity cannot be a generator (graph has no loops)")
        missing = [h for h in elems if inverse(h, self.spec) not in elems]
        if missing:
            raise ValueError(f"generating set is not symmetric: inverses of {missing} missing")
        if set(elems) != set(_unit_elements(self.spec)) and not self._generates():
            raise ValueError(f"{list(elems)} does not generate {self.spec}")

    def _generates(self) -> bool:
        if self.spec.is_line:
            return math.gcd(*(abs(h[0]) for h in self.elements)) == 1
        n = self.spec.require_dense()
        return len(_bfs_distances(self, self.spec.identity)) == n

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def label(self, h: Sequence[int]) -> int:
        return self.elements.index(self.spec.element(h))

    def as_array(self) -> np.ndarray:
        """Integer array of shape (|S|, rank)."""
        return np.array(self.elements, dtype=np.int64).reshape(len(self), self.spec.rank)

    def signed_array(self) -> np.ndarray:
        """Generators as signed displacements, components in ``(-N_j/2, N_j/2]``."""
        return np.array([self.spec.signed(h) for h in self.elements], dtype=np.int64)

    @property
    def is_unit(self) -> bool:
        return set(self.elements) == set(_unit_elements(self.spec))


def unit_generators(spec: GroupSpec) -> GeneratorSet:
    """
    The ``{±e_j}`` generating set.

    Axes are enumerated from the last tuple component to the first, ``+e_j``
    before ``-e_j``, and ``-e_j`` is dropped when ``N_j = 2``. On ``Z_2^n`` this
    gives label ``j`` to the generator flipping bit ``j`` of
    ``x = (x_{n-1}, ..., x_0)``; on ``Z_N`` and the line label 0 moves right and
    label 1 moves left.
    """
    return GeneratorSet(spec, _unit_elements(spec), name="unit")


def _unit_elements(spec: GroupSpec) -> tuple[Element, ...]:
    if spec.is_line:
        return ((1,), (-1,))
    gens = []
    r = spec.rank
    for axis in reversed(range(r)):
        e = [0] * r
        e[axis] = 1
        gens.append(tuple(e))
        if spec.moduli[axis] > 2:
            e[axis] = spec.moduli[axis] - 1
            gens.append(tuple(e))
    return tuple(gens)


_FACTOR = re.compile(r"Z(\d+)(?:\^(\d+))?$")


def parse_group(text: str) -> GroupSpec:
    """
    Parse ``line``, ``Z8``, ``Z2^10`` or ``Z3xZ4`` (factors may carry ``^power``).

    Errors name the 1-based column where the offending factor starts.
    """
    s = text.strip()
    if s.lower() == "line":
        return GroupSpec.line()
    moduli: list[int] = []
    col = 1
    for part in s.split("x"):
        m = _FACTOR.match(part.strip())
        if not m:
            raise ValueError(
                f"group spec {text!r}, column {col}: expected 'Z<N>' or 'Z<N>^<k>', got {part!r}"
            )
        moduli += [int(m.group(1))] * int(m.group(2) or 1)
        col += len(part) + 1
    return GroupSpec(GroupKind.FINITE, tuple(moduli))


def parse_generators(text: str, spec: GroupSpec) -> GeneratorSet:
    """Parse ``unit`` or an explicit tuple list such as ``(1,0),(0,1)`` or ``1,7``."""
    s = text.strip()
    if s.lower() == "unit":
        return unit_generators(spec)
    try:
        raw = ast.literal_eval(s)
    except (ValueError, SyntaxError) as exc:
        col = getattr(exc, "offset", None) or 1
        raise ValueError(f"generator list {text!r}, column {col}: not a tuple list") from exc
    if isinstance(raw, int):
        raw = (raw,)
    items = []
    for h in raw:
        items.append((h,) if isinstance(h, int) else tuple(h))
    return GeneratorSet(spec, tuple(items))


def character(g: Sequence[int], h: Sequence[int], spec: GroupSpec) -> complex:
    """``chi_g(h) = prod_j exp(2 pi i g_j h_j / N_j)``."""
    if spec.is_line:
        raise ValueError("characters are defined here for finite groups only")
    g = spec.element(g)
    h = spec.element(h)
    # Reduce the exponent exactly in integers before going to floating point.
    frac = sum(((gj * hj) % m) / m for gj, hj, m in zip(g, h, spec.moduli))
    return complex(np.exp(2j * np.pi * (frac % 1.0)))


def _phase_fractions(gs: np.ndarray, hs: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """``sum_j (g_j h_j mod N_j) / N_j`` for every pair, shape (len(gs), len(hs))."""
    out = np.zeros((gs.shape[1], hs.shape[1]))
    for j, m in enumerate(spec.moduli):
        out += np.remainder(np.outer(gs[j], hs[j]), m) / m
    return np.remainder(out, 1.0)


def character_table(spec: GroupSpec) -> np.ndarray:
    """Matrix ``X[g, h] = chi_g(h)`` over flat indices."""
    coords = spec.coordinates()
    return np.exp(2j * np.pi * _phase_fractions(coords, coords, spec))


def fourier_matrix(spec: GroupSpec) -> np.ndarray:
    """Dense ``F_G = |G|^{-1/2} sum chi_g(h) |g><h|``."""
    return character_table(spec) / np.sqrt(spec.require_dense())


def fourier_transform(
    amplitudes: np.ndarray,
    spec: GroupSpec,
    direction: str = "forward",
    method: str = "fft",
) -> np.ndarray:
    """
    Apply ``F_G`` (forward) or ``F_G^dagger`` (inverse) along the last axis.

    ``method="direct"`` multiplies by the dense matrix; ``method="fft"``
    uses an n-dimensional FFT over the cyclic factors. Both agree to
    roundoff. Leading axes (e.g. coin labels) are transformed independently.
    """
    n = spec.require_dense()
    v = np.asarray(amplitudes, dtype=np.complex128)
    if v.shape[-1] != n:
        raise ValueError(f"vector length {v.shape[-1]} does not match |G| = {n}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if method == "direct":
        F = fourier_matrix(spec)
        if direction == "inverse":
            F = F.conj().T
        return v @ F.T
    if method != "fft":
        raise ValueError(f"unknown method {method!r}")
    lead = v.shape[:-1]
    cube = v.reshape(lead + spec.moduli)
    axes = tuple(range(len(lead), len(lead) + spec.rank))
    # chi has a + sign in the exponent, which is numpy's inverse DFT.
    if direction == "forward":
        out = np.fft.ifftn(cube, axes=axes, norm="ortho")
    else:
        out = np.fft.fftn(cube, axes=axes, norm="ortho")
    return out.reshape(lead + (n,))


def _bfs_distances(gens: GeneratorSet, source: Element) -> dict[Element, int]:
    spec = gens.spec
    dist = {source: 0}
    queue = deque([source])
    while queue:
        g = queue.popleft()
        for h in gens.elements:
            nxt = compose(g, h, spec)
            if nxt not in dist:
                dist[nxt] = dist[g] + 1
                queue.append(nxt)
    return dist


def graph_distance(a: Sequence[int], b: Sequence[int], gens: GeneratorSet) -> int:
    """
    Word-metric distance: fewest generator steps taking ``a`` to ``b``.

    Unit generating sets use the closed form (sum of per-axis cyclic
    distances, Hamming distance on the hypercube), which also works for
    groups too large to enumerate. Other sets fall back to BFS.
    """
    spec = gens.spec
    a = spec.element(a)
    b = spec.element(b)
    if a == b:
        return 0
    if gens.is_unit:
        if spec.is_line:
            return abs(b[0] - a[0])
        return sum(min((y - x) % m, (x - y) % m) for x, y, m in zip(a, b, spec.moduli))
    if spec.is_line:
        return _line_bfs(a[0], b[0], [h[0] for h in gens.elements])
    d = _bfs_distances(gens, a).get(b)
    if d is None:
        raise ValueError(f"{b} is unreachable from {a}; generators do not span the group")
    return d


def _line_bfs(a: int, b: int, steps: list[int]) -> int:
    # Some shortest word stays within one step length of the segment [a, b].
    reach = max(abs(s) for s in steps)
    lo, hi = min(a, b) - reach, max(a, b) + reach
    dist = {a: 0}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            return dist[x]
        for s in steps:
            y = x + s
            if lo <= y <= hi and y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    raise ValueError(f"{b} is unreachable from {a}")
