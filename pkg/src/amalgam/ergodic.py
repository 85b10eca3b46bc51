"""Finite group actions: invariant measures, ergodicity, decomposition.

On a finite action the ergodic invariant measures are exactly the uniform
measures on single orbits, and the ergodic decomposition of an invariant
measure is its orbit-mass vector.  Everything is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .graphs import InvalidInput


@dataclass(frozen=True)
class FiniteAction:
    """A finite permutation group given by its full element list."""

    n_points: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_points < 1:
            raise InvalidInput("actions need at least one point")
        if not self.perms:
            raise InvalidInput("the group element list is empty")
        seen = set()
        for p in self.perms:
            if sorted(p) != list(range(self.n_points)):
                raise InvalidInput(f"{p} is not a permutation of the points")
            seen.add(p)
        if len(seen) != len(self.perms):
            raise InvalidInput("duplicate group elements")
        # Closure under composition forces identity and inverses in a
        # finite set of bijections, so closure alone certifies a group.
        for p in self.perms:
            for q in self.perms:
                comp = tuple(p[q[i]] for i in range(self.n_points))
                if comp not in seen:
                    raise InvalidInput(
                        f"element list not closed: {p} after {q} missing"
                    )

    def orbits(self) -> list[tuple[int, ...]]:
        seen = [False] * self.n_points
        out = []
        for i in range(self.n_points):
            if seen[i]:
                continue
            orb = {p[i] for p in self.perms}
            for j in orb:
                seen[j] = True
            out.append(tuple(sorted(orb)))
        return out

    def check_invariant(self, mu: tuple[Fraction, ...]):
        """Raises naming a violating group element if mu is not invariant."""
        if len(mu) != self.n_points:
            raise InvalidInput("measure length differs from the point count")
        if any(m < 0 for m in mu):
            raise InvalidInput("measure has a negative mass")
        if sum(mu) != 1:
            raise InvalidInput(f"measure masses sum to {sum(mu)}, not 1")
        for p in self.perms:
            for i in range(self.n_points):
                if mu[p[i]] != mu[i]:
                    raise InvalidInput(
                        f"not invariant: element {p} moves mass at point {i}"
                    )


@dataclass(frozen=True)
class OrbitComponent:
    """Weight times the uniform measure on one orbit."""

    orbit: tuple[int, ...]
    weight: Fraction

    def mass_at(self, i: int) -> Fraction:
        if i in self.orbit:
            return Fraction(1, len(self.orbit))
        return Fraction(0)


def ergodic_decompose_finite(
    action: FiniteAction, mu: Iterable[Fraction]
) -> list[OrbitComponent]:
    """Unique decomposition of an invariant measure into orbit-uniform parts.

    Weights are the orbit masses; reconstruction is exact.
    """
    mu = tuple(Fraction(m) for m in mu)
    action.check_invariant(mu)
    out = []
    for orb in action.orbits():
        w = sum((mu[i] for i in orb), Fraction(0))
        if w > 0:
            out.append(OrbitComponent(orbit=orb, weight=w))
    return out


def reconstruct(action: FiniteAction, comps: Iterable[OrbitComponent]):
    mu = [Fraction(0)] * action.n_points
    for c in comps:
        for i in c.orbit:
            mu[i] += c.weight * Fraction(1, len(c.orbit))
    return tuple(mu)


def check_ergodic_finite(action: FiniteAction, mu: Iterable[Fraction]) -> bool:
    """True iff the measure is uniform on a single orbit.

    Equivalently every invariant subset has mass 0 or 1 (invariant subsets
    are unions of orbits).
    """
    mu = tuple(Fraction(m) for m in mu)
    action.check_invariant(mu)
    positive = [orb for orb in action.orbits()
                if sum((mu[i] for i in orb), Fraction(0)) > 0]
    return len(positive) == 1


def invariant_subset_oracle(
    action: FiniteAction, mu: Iterable[Fraction], cap: int = 20
) -> bool:
    """Brute-force ergodicity: every invariant subset has mass 0 or 1."""
    mu = tuple(Fraction(m) for m in mu)
    action.check_invariant(mu)
    n = action.n_points
    if n > cap:
        raise InvalidInput(f"subset oracle capped at {cap} points")
    for bits in range(1 << n):
        sub = {i for i in range(n) if bits >> i & 1}
        if any({p[i] for i in sub} != sub for p in action.perms):
            continue
        mass = sum((mu[i] for i in sub), Fraction(0))
        if mass not in (0, 1):
            return False
    return True


def product_witness_check(
    action: FiniteAction, mu: Iterable[Fraction], cap: int = 20
) -> bool:
    """For every positive-mass subset A, some tau has mu(A n tauA) = mu(A)^2.

    The sound direction: when this holds for all subsets, the measure is
    ergodic.  Uniform orbit measures can fail it on a finite action (the
    square need not be an achievable mass), so it is a secondary verifier
    only.
    """
    mu = tuple(Fraction(m) for m in mu)
    action.check_invariant(mu)
    n = action.n_points
    if n > cap:
        raise InvalidInput(f"product-witness check capped at {cap} points")
    for bits in range(1, 1 << n):
        sub = {i for i in range(n) if bits >> i & 1}
        mass = sum((mu[i] for i in sub), Fraction(0))
        if mass == 0:
            continue
        want = mass * mass
        ok = False
        for p in action.perms:
            moved = {p[i] for i in sub}
            inter = sum((mu[i] for i in sub & moved), Fraction(0))
            if inter == want:
                ok = True
                break
        if not ok:
            return False
    return True


# -- action file format -----------------------------------------------------------


def parse_action_text(text: str) -> tuple[FiniteAction, tuple[Fraction, ...]]:
    n = None
    perms = []
    mu = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "points" and len(parts) == 2:
            n = int(parts[1])
        elif parts[0] == "perm":
            perms.append(tuple(int(t) for t in parts[1:]))
        elif parts[0] == "mu":
            mu = tuple(Fraction(t) for t in parts[1:])
        else:
            raise InvalidInput(f"line {ln}: cannot parse {line!r}")
    if n is None or not perms or mu is None:
        raise InvalidInput("action file needs points, perm and mu lines")
    return FiniteAction(n, tuple(perms)), mu


def action_to_text(action: FiniteAction, mu: tuple[Fraction, ...]) -> str:
    lines = [f"points {action.n_points}"]
    for p in action.perms:
        lines.append("perm " + " ".join(str(i) for i in p))
    lines.append("mu " + " ".join(str(m) for m in mu))
    return "\n".join(lines) + "\n"
