"""Random finite test instances for the randomized theorem checks."""

from __future__ import annotations

import numpy as np

from .comparison import VectorialComparison
from .cone import Cone
from .cone_metric import TableSpace, random_table_space, verify_cone_metric_axioms
from .fixedpoint import SelfMap, condition_C_cases

LAMBDAS = tuple(np.round(np.arange(1, 10) / 10, 1))


def random_self_map(space: TableSpace, rng: np.random.Generator) -> SelfMap:
    n = len(space)
    # small images make contraction pairs common
    image = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
    return SelfMap.table(space, list(rng.choice(image, size=n)))


def random_valid_space(cone: Cone, n_points: int, rng: np.random.Generator) -> TableSpace:
    """A random table space that has been re-verified against the axioms."""
    for _ in range(100):
        space = random_table_space(cone, n_points, rng)
        if verify_cone_metric_axioms(space).passed:
            return space
    raise RuntimeError("could not generate a valid cone metric table")


def random_contraction_instance(cone: Cone, rng: np.random.Generator, max_points: int = 20):
    """(space, f, vc) with a random map and ``vc = linear(lambda)``, lambda in 0.1..0.9."""
    space = random_valid_space(cone, int(rng.integers(2, max_points + 1)), rng)
    vc = VectorialComparison.linear(cone, float(rng.choice(LAMBDAS)))
    return space, random_self_map(space, rng), vc


def random_condition_C_instance(
    cone: Cone, rng: np.random.Generator, lam: float = 0.9, max_tries: int = 10_000
):
    """(space, f, g, vc) for which condition (C) holds on every pair.

    Drawn by rejection over small spaces (3 to 5 points).
    """
    vc = VectorialComparison.linear(cone, lam)
    for _ in range(max_tries):
        n = int(rng.integers(3, 6))
        space = random_valid_space(cone, n, rng)
        f = random_self_map(space, rng)
        g = SelfMap.table(space, list(rng.integers(0, n, n)))
        a, b = np.triu_indices(n)
        if condition_C_cases(f, g, vc, a, b).any(axis=1).all():
            return space, f, g, vc
    raise RuntimeError("no instance satisfying (C) found")
