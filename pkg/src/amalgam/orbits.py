"""Orbit tables: partitions of ordered vertex tuples under Aut(G/fixed).

Orbit membership is decided by rooted canonical keys (see canonical.py),
which stays cheap on hosts whose full automorphism group is astronomically
large.  The explicit element-list route survives in graphs.automorphisms for
small hosts and for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable

from .canonical import tuple_key
from .graphs import FinGraph, InvalidInput, ResourceBudget, VertexSet


@dataclass(frozen=True)
class OrbitTable:
    """Partition of all ``arity``-tuples of host vertices into orbits.

    ``classes`` are sorted tuples of tuples; ``classes[i]`` lists the tuples
    of orbit i.  Orbit ids are canonical: they follow the sorted order of
    the underlying rooted canonical keys.
    """

    arity: int
    fixed: VertexSet
    classes: tuple[tuple[tuple[int, ...], ...], ...]

    def class_index(self) -> dict[tuple[int, ...], int]:
        return {t: i for i, cls in enumerate(self.classes) for t in cls}

    def orbit_of(self, tup: Iterable[int]) -> int:
        tup = tuple(tup)
        for i, cls in enumerate(self.classes):
            if tup in cls:
                return i
        raise InvalidInput(f"tuple {tup} not in table")

    def same_orbit(self, t1: Iterable[int], t2: Iterable[int]) -> bool:
        return self.orbit_of(t1) == self.orbit_of(t2)


def tuple_orbits(
    g: FinGraph,
    arity: int,
    fixed: Iterable[int] = (),
    tuple_budget: int = 250_000,
) -> OrbitTable:
    """Orbits of all ordered ``arity``-tuples under Aut(g) fixing ``fixed``."""
    if arity < 1:
        raise InvalidInput("arity must be at least 1")
    fixed = g.check_subset(fixed)
    if g.n ** arity > tuple_budget:
        raise ResourceBudget(
            f"{g.n}^{arity} tuples exceed the orbit-table budget"
        )
    buckets: dict[object, list[tuple[int, ...]]] = {}
    for tup in product(range(g.n), repeat=arity):
        buckets.setdefault(tuple_key(g, tup, fixed), []).append(tup)
    classes = tuple(
        tuple(sorted(buckets[k])) for k in sorted(buckets, key=repr)
    )
    return OrbitTable(arity=arity, fixed=fixed, classes=classes)


def same_orbit(
    g: FinGraph,
    t1: Iterable[int],
    t2: Iterable[int],
    fixed: Iterable[int] = (),
) -> bool:
    """Orbit equality for two tuples without building the full table."""
    t1, t2 = tuple(t1), tuple(t2)
    if len(t1) != len(t2):
        return False
    return tuple_key(g, t1, fixed) == tuple_key(g, t2, fixed)


def vertex_orbit_count(g: FinGraph) -> int:
    return len({tuple_key(g, (v,)) for v in range(g.n)})
