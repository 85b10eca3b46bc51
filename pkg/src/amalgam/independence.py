"""Independence-theorem testing over generic approximations.

STRONG mode amalgamates types over a weakly algebraically independent base,
STANDARD mode over a d-independent base.  The realization search runs the
bounded witness case analysis for tp(c0/a) & tp(c1/b) and then tries to
land each surviving witness layout on the approximation as a class-legal
extension whose realization is d-independent from the combined base.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .amalgamation import GenericApproximation
from .classes import ClassSpec
from .formulas import (
    And,
    Atom,
    FormulaInstance,
    Not,
    UnsupportedFormula,
    conj,
    evaluate,
    instance_text,
)
from .graphs import FinGraph, InvalidInput, ResourceBudget, distances_from
from .inconsistency import (
    CaseAnalysis,
    ConsistentWitness,
    InconsistencyCertificate,
    K_MAX,
)
from .orbits import same_orbit
from .predimension import d_independent, dimension, dimension_rel, weakly_alg_independent

STRONG = "STRONG"
STANDARD = "STANDARD"
REALIZE_NODE_CAP = 200_000


def type_over(g: FinGraph, c: int, params: Iterable[int]) -> FormulaInstance:
    """Fragment type of vertex c over a parameter set: exact distances up
    to K_MAX, 'far' beyond."""
    params = sorted(g.check_subset(params))
    g.check_vertex(c)
    dist = distances_from(g, c)
    parts = []
    for slot, p in enumerate(params):
        d = dist[p]
        if d == 0:
            parts.append(Atom("eq", slot))
        elif d == 1:
            parts.append(Atom("edge", slot))
        elif 2 <= d <= K_MAX:
            parts.append(Atom("dist_eq", slot, d))
        else:
            parts.append(Not(Atom("dist_le", slot, K_MAX)))
    if not parts:
        return FormulaInstance(Atom("true"), ())
    shape = parts[0] if len(parts) == 1 else And(tuple(parts))
    return FormulaInstance(shape, tuple(params))


@dataclass(frozen=True)
class IndependenceResult:
    holds: bool
    mode: str
    reason: str  # realized | trivial | inconsistent | no-independent-realization
    target_text: str
    certificate: InconsistencyCertificate | None = None
    amalgam: FinGraph | None = None
    realization: int | None = None
    new_vertices: tuple[int, ...] = ()
    detail: str = ""

    def verdict(self) -> str:
        return "HOLDS" if self.holds else "FAILS"


def _realize_witness(
    cls: ClassSpec,
    approx: GenericApproximation,
    witness: ConsistentWitness,
    target: FormulaInstance,
    base: frozenset[int],
):
    """Map a witness layout onto the approximation, allowing fresh vertices.

    Returns (amalgam, x image, fresh ids) for the first mapping whose
    amalgam is in class, realizes the target exactly, and leaves the
    realization d-independent from the base; None when none works.
    """
    g = approx.graph
    W = witness.graph
    pinned: dict[int, int] = {}
    for w, role in enumerate(witness.roles):
        if role.startswith("v"):
            pinned[w] = int(role[1:])
    free = [w for w in range(W.n) if w not in pinned]
    # Most-constrained-first placement: vertices with more already-placed
    # witness neighbours get tighter approximation candidate lists.
    order: list[int] = []
    placed = set(pinned)
    while len(order) < len(free):
        best = None
        for w in free:
            if w in order:
                continue
            anchored = sum(1 for u in W.neighbors(w) if u in placed)
            key = (-anchored, w)
            if best is None or key < best[0]:
                best = (key, w)
        order.append(best[1])
        placed.add(best[1])

    nodes = [0]

    def attempt(i: int, image: dict[int, int]):
        nodes[0] += 1
        if nodes[0] > REALIZE_NODE_CAP:
            raise ResourceBudget("realization search beyond cap")
        if i == len(order):
            return _finalize(image)
        w = order[i]
        placed_nbrs = [u for u in W.neighbors(w) if u in image]
        cands: list[int | None] = []
        host_cands = None
        for u in placed_nbrs:
            hu = image[u]
            if hu is None or hu >= g.n:
                continue
            nbrs = set(g.neighbors(hu))
            host_cands = nbrs if host_cands is None else host_cands & nbrs
        if host_cands is None:
            host_cands = set(range(g.n))
        used = {h for h in image.values() if h is not None}
        cands = sorted(host_cands - used)
        for h in cands + [None]:
            if h is not None:
                bad = False
                for u in placed_nbrs:
                    hu = image[u]
                    if hu is not None and hu < g.n and not g.has_edge(h, hu):
                        bad = True
                        break
                if bad:
                    continue
            image[w] = h
            r = attempt(i + 1, image)
            if r is not None:
                return r
            del image[w]
        return None

    def _finalize(image: dict[int, int]):
        fresh = sorted(w for w in image if image[w] is None)
        ids = {w: g.n + i for i, w in enumerate(fresh)}
        total = dict(image)
        total.update(ids)
        new_edges = []
        for u, v in W.edges:
            hu, hv = total[u], total[v]
            if hu >= g.n or hv >= g.n:
                new_edges.append((hu, hv))
            elif not g.has_edge(hu, hv):
                return None  # would add an edge inside the old part
        amalgam = g.add_vertices(len(fresh), new_edges)
        new_ids = list(range(g.n, amalgam.n))
        if new_ids and not cls.in_class(amalgam, new_vertices=new_ids):
            return None
        xh = total[witness.x_vertex]
        if not evaluate(amalgam, target, xh):
            return None
        w_ind = dimension_rel(cls.pre, amalgam, [xh], base)
        d_alone = dimension(cls.pre, amalgam, [xh])
        if w_ind != d_alone:
            return None
        return amalgam, xh, tuple(new_ids)

    full_pin = {w: pinned[w] for w in pinned}
    return attempt(0, dict(full_pin))


def test_independence_theorem(
    cls: ClassSpec,
    approx: GenericApproximation,
    mode: str,
    a: Iterable[int],
    b: Iterable[int],
    c0: Iterable[int],
    c1: Iterable[int],
) -> IndependenceResult:
    """Amalgamate tp(c0/a) and tp(c1/b) over the given base mode.

    Preconditions are checked and named on failure.  Returns HOLDS with a
    legal amalgam and d-independent realization, or FAILS with either the
    inconsistency certificate or the reason no realization survived.
    """
    g = approx.graph
    if mode not in (STRONG, STANDARD):
        raise InvalidInput(f"unknown mode {mode!r}")
    A = g.check_subset(a)
    B = g.check_subset(b)
    C0 = g.check_subset(c0)
    C1 = g.check_subset(c1)
    if len(C0) != 1 or len(C1) != 1:
        raise UnsupportedFormula(
            "tuple amalgamation beyond the one-variable fragment"
        )
    if mode == STRONG:
        w = weakly_alg_independent(cls.pre, cls, g, A, B)
        if not w.resolved:
            raise InvalidInput(
                "precondition unresolved: weak independence of a,b needs "
                "finiteness certificates"
            )
        if not w.independent:
            raise InvalidInput(
                "precondition failed: a and b are not weakly algebraically "
                "independent over the empty set"
            )
    else:
        if not d_independent(cls.pre, g, A, B).independent:
            raise InvalidInput(
                "precondition failed: a and b are not d-independent"
            )
    if not same_orbit(g, tuple(sorted(C0)), tuple(sorted(C1))):
        raise InvalidInput(
            "precondition failed: c0 and c1 differ in type over the empty set"
        )
    if not d_independent(cls.pre, g, C0, A).independent:
        raise InvalidInput("precondition failed: c0 is not d-independent from a")
    if not d_independent(cls.pre, g, C1, B).independent:
        raise InvalidInput("precondition failed: c1 is not d-independent from b")

    cv0 = next(iter(C0))
    cv1 = next(iter(C1))
    base = A | B
    t0 = type_over(g, cv0, A)
    t1 = type_over(g, cv1, B)
    target = conj(t0, t1)

    if C0 == C1 and d_independent(cls.pre, g, C0, base).independent:
        return IndependenceResult(
            holds=True,
            mode=mode,
            reason="trivial",
            target_text=instance_text(target),
            amalgam=g,
            realization=cv0,
            detail="c0 already realizes both types and is d-independent",
        )

    analysis = CaseAnalysis(cls, g, target)
    witnesses, cases, pruned, undecided = analysis.run()
    if undecided and not witnesses:
        raise UnsupportedFormula("type amalgamation analysis undecided")
    if not witnesses:
        cert = InconsistencyCertificate(
            target_text=analysis.target_text,
            cases=tuple(cases),
            pruned=tuple(pruned),
        )
        return IndependenceResult(
            holds=False,
            mode=mode,
            reason="inconsistent",
            target_text=analysis.target_text,
            certificate=cert,
            detail="every completion embeds a forbidden pattern",
        )
    attempts = []
    for w in witnesses:
        got = _realize_witness(cls, approx, w, target, base)
        if got is not None:
            amalgam, xh, new_ids = got
            return IndependenceResult(
                holds=True,
                mode=mode,
                reason="realized",
                target_text=analysis.target_text,
                amalgam=amalgam,
                realization=xh,
                new_vertices=new_ids,
                detail=f"witness layout: {w.description}",
            )
        attempts.append(w.description)
    return IndependenceResult(
        holds=False,
        mode=mode,
        reason="no-independent-realization",
        target_text=analysis.target_text,
        detail="; ".join(attempts),
    )


def canonical_quadruple(
    cls: ClassSpec, approx: GenericApproximation, base_distance: int
):
    """Smallest (a, b, c0, c1) with dist(a,b) as asked, c0 two steps from a
    and c1 two steps from b; None if the approximation lacks one."""
    g = approx.graph
    for a in range(g.n):
        dist_a = distances_from(g, a)
        for b in range(g.n):
            if a == b or dist_a[b] != base_distance:
                continue
            c0s = [v for v in range(g.n) if dist_a[v] == 2 and v != b]
            if not c0s:
                continue
            dist_b = distances_from(g, b)
            c1s = [v for v in range(g.n) if dist_b[v] == 2 and v != a]
            if not c1s:
                continue
            c0 = c0s[0]
            for c1 in c1s:
                if same_orbit(g, (c0,), (c1,)):
                    return a, b, c0, c1
    return None


def search_quadruples(
    cls: ClassSpec, approx: GenericApproximation, mode: str, limit: int = 8
):
    """Enumerate precondition-satisfying quadruples and test each."""
    g = approx.graph
    out = []
    seen_shapes = set()
    for base_distance in (1, 2, 3):
        quad = canonical_quadruple(cls, approx, base_distance)
        if quad is None:
            continue
        a, b, c0, c1 = quad
        shape = base_distance
        if shape in seen_shapes:
            continue
        seen_shapes.add(shape)
        try:
            res = test_independence_theorem(
                cls, approx, mode, [a], [b], [c0], [c1]
            )
        except InvalidInput as e:
            res = None
            out.append(((a, b, c0, c1), f"preconditions: {e}"))
            continue
        out.append(((a, b, c0, c1), res))
        if len(out) >= limit:
            break
    return out
