"""Coined quantum walks on Cayley graphs of Abelian groups: simulation, dispersion, hitting times."""

from .group import (
    GeneratorSet,
    GroupSpec,
    character,
    compose,
    fourier_transform,
    graph_distance,
    parse_generators,
    parse_group,
    unit_generators,
)
from .walk import (
    Coin,
    WalkState,
    evolve,
    grover_coin,
    hadamard_coin,
    point_state,
    position_distribution,
    step,
)

__version__ = "0.1.0"
