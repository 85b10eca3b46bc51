"""Predimension calculus: delta, closures, dimension, d-independence.

All arithmetic is exact (fractions.Fraction); delta comparisons decide class
membership and closure boundaries, so floating point is banned throughout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable

from ._kernels import min_superset_delta
from .graphs import FinGraph, InvalidInput, VertexSet, mask_of, set_of

Dim = Fraction


@dataclass(frozen=True)
class PredimensionSpec:
    """Weights of the predimension: delta(A) = c_v*|A| - alpha*e(A)."""

    c_v: Fraction = Fraction(2)
    alpha: Fraction = Fraction(1)

    def __post_init__(self):
        if self.c_v <= 0 or self.alpha <= 0:
            raise InvalidInput("predimension weights must be positive")

    @property
    def scale(self) -> int:
        return lcm(self.c_v.denominator, self.alpha.denominator)

    def scaled(self) -> tuple[int, int]:
        """(wv, we) integers so that delta*scale = wv*|A| - we*e(A)."""
        d = self.scale
        return int(self.c_v * d), int(self.alpha * d)


class ClosureMode(enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


def delta(spec: PredimensionSpec, g: FinGraph, A: Iterable[int]) -> Dim:
    A = g.check_subset(A)
    return spec.c_v * len(A) - spec.alpha * g.edges_within(A)


def delta_rel(spec: PredimensionSpec, g: FinGraph, B, A) -> Dim:
    """delta(A u B) - delta(A)."""
    A = g.check_subset(A)
    B = g.check_subset(B)
    return delta(spec, g, A | B) - delta(spec, g, A)


def closure(
    spec: PredimensionSpec,
    g: FinGraph,
    A: Iterable[int],
    mode: ClosureMode = ClosureMode.STRICT,
) -> VertexSet:
    """Self-sufficient closure of A inside g.

    STRICT: the smallest superset no enlargement of which lowers delta;
    equals the inclusion-minimal delta-minimizer over supersets of A
    (minimizers are closed under intersection by submodularity, so the
    intersection of all of them is the closure).
    WEAK: absorb single vertices with non-positive relative delta, smallest
    id first, to a fixpoint.  Both are idempotent.
    """
    A = g.check_subset(A)
    if mode is ClosureMode.STRICT:
        wv, we = spec.scaled()
        _, masks = min_superset_delta(g.n, g.adj, wv, we, mask_of(A))
        inter = masks[0]
        for m in masks[1:]:
            inter &= m
        return set_of(inter)
    if mode is ClosureMode.WEAK:
        cur = set(A)
        changed = True
        while changed:
            changed = False
            for v in range(g.n):
                if v in cur:
                    continue
                absorbed = spec.alpha * g.edges_between([v], cur) >= spec.c_v
                if absorbed:
                    cur.add(v)
                    changed = True
                    break
        return frozenset(cur)
    raise InvalidInput(f"unknown closure mode {mode!r}")


def dimension(spec: PredimensionSpec, g: FinGraph, A: Iterable[int]) -> Dim:
    """d(A) = min of delta over supersets of A inside g."""
    A = g.check_subset(A)
    wv, we = spec.scaled()
    val, _ = min_superset_delta(g.n, g.adj, wv, we, mask_of(A), collect=False)
    return Fraction(val, spec.scale)


def dimension_rel(spec: PredimensionSpec, g: FinGraph, X, Y) -> Dim:
    """d(X/Y) = d(X u Y) - d(Y)."""
    X = g.check_subset(X)
    Y = g.check_subset(Y)
    return dimension(spec, g, X | Y) - dimension(spec, g, Y)


@dataclass(frozen=True)
class IndependenceWitness:
    independent: bool
    d_over_base_and_other: Dim
    d_over_base: Dim

    def __bool__(self):
        return self.independent


def d_independent(
    spec: PredimensionSpec,
    g: FinGraph,
    a: Iterable[int],
    b: Iterable[int],
    C: Iterable[int] = (),
) -> IndependenceWitness:
    """Dimension surrogate for non-forking: d(a/Cb) = d(a/C)."""
    a = g.check_subset(a)
    b = g.check_subset(b)
    C = g.check_subset(C)
    lhs = dimension_rel(spec, g, a, C | b)
    rhs = dimension_rel(spec, g, a, C)
    return IndependenceWitness(lhs == rhs, lhs, rhs)


# -- approximate algebraic closure --------------------------------------------


@dataclass(frozen=True)
class FinitenessCert:
    """Why an absorbed vertex has finitely many conjugates.

    ``copies`` duplicates of the vertex with the same attachment into the
    closure-so-far leave the class (a forbidden pattern embeds or some
    subset violates the control bound), so fewer than ``copies``
    conjugates can coexist.  Both violation kinds survive extra edges and
    vertices, so the bound transfers to every class member.
    """

    vertex: int
    copies: int
    reason: str


@dataclass(frozen=True)
class AclResult:
    vertices: VertexSet
    certificates: tuple[FinitenessCert, ...] = ()
    unresolved: VertexSet = field(default_factory=frozenset)

    @property
    def resolved(self) -> bool:
        return not self.unresolved

    def __iter__(self):
        return iter(sorted(self.vertices))


def acl_approx(
    spec: PredimensionSpec,
    cls,
    g: FinGraph,
    A: Iterable[int],
    max_copies: int = 4,
) -> AclResult:
    """WEAK closure with per-vertex finiteness certificates.

    ``cls`` supplies the class membership test (in_class).  An absorbed
    vertex lacking a certificate makes the result UNRESOLVED rather than
    silently exact.
    """
    A = g.check_subset(A)
    cur = set(A)
    certs = []
    unresolved = set()
    changed = True
    while changed:
        changed = False
        for v in sorted(set(range(g.n)) - cur):
            if spec.alpha * g.edges_between([v], cur) < spec.c_v:
                continue
            cert = None
            attach = sorted(u for u in g.neighbors(v) if u in cur)
            sub, old = g.induced(sorted(cur) + [v])
            back = {u: i for i, u in enumerate(old)}
            for k in range(2, max_copies + 1):
                extra = [
                    (sub.n + j, back[u]) for j in range(k - 1) for u in attach
                ]
                copies_graph = sub.add_vertices(k - 1, extra)
                check = cls.in_class(copies_graph)
                if not check.ok:
                    cert = FinitenessCert(v, k, check.violation.describe())
                    break
            if cert:
                certs.append(cert)
            else:
                unresolved.add(v)
            cur.add(v)
            changed = True
            break
    return AclResult(
        vertices=frozenset(cur),
        certificates=tuple(certs),
        unresolved=frozenset(unresolved),
    )


@dataclass(frozen=True)
class WeakIndepResult:
    independent: bool
    resolved: bool
    common: VertexSet

    def __bool__(self):
        return self.independent


def weakly_alg_independent(
    spec: PredimensionSpec,
    cls,
    g: FinGraph,
    a: Iterable[int],
    b: Iterable[int],
    C: Iterable[int] = (),
) -> WeakIndepResult:
    """acl(aC) and acl(bC) meet exactly in acl(C).

    The real-sort test; weak elimination of imaginaries for the preset
    classes is an assumption recorded in reports, not re-proven here.
    """
    a = g.check_subset(a)
    b = g.check_subset(b)
    C = g.check_subset(C)
    acl_a = acl_approx(spec, cls, g, a | C)
    acl_b = acl_approx(spec, cls, g, b | C)
    acl_c = acl_approx(spec, cls, g, C)
    resolved = acl_a.resolved and acl_b.resolved and acl_c.resolved
    common = acl_a.vertices & acl_b.vertices
    return WeakIndepResult(
        independent=common == acl_c.vertices,
        resolved=resolved,
        common=common,
    )
