"""Free amalgamation, extension enumeration, and the generic builder.

The builder grows disjoint vertex-transitive blocks (cycles of the smallest
class-legal length) in lockstep.  Class members have average degree below 3
whenever f(n) >= 2 + n/2, so the only vertex-transitive members containing
the minimal cycle are disjoint unions of that cycle; a schedule that wants
a single vertex orbit at commit points has no other choice.  Every step is
re-checked for membership, so the result is in class for any ClassSpec,
transitive or not.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .canonical import canonical_key
from .classes import ClassCheck, ClassSpec
from .graphs import (
    Edge,
    FinGraph,
    InvalidInput,
    ResourceBudget,
    VertexSet,
    cycle,
    from_text,
    to_text,
)
from .predimension import acl_approx

MAX_CYCLE_PROBE = 32
EXT_EDGE_BITS_CAP = 22


def free_amalgam(
    g1: FinGraph, g2: FinGraph, over: Iterable[int]
) -> tuple[FinGraph, dict[int, int]]:
    """Glue g2 onto g1 along a shared base, adding no cross edges.

    ``over`` names vertices present in both graphs under the same ids and
    must induce the same subgraph in each.  Returns the amalgam (g1's ids
    preserved, fresh ids for g2's remainder) and the g2 -> amalgam map.
    """
    base = frozenset(over)
    for v in base:
        g1.check_vertex(v)
        g2.check_vertex(v)
    for u, v in combinations(sorted(base), 2):
        if g1.has_edge(u, v) != g2.has_edge(u, v):
            raise InvalidInput(
                f"base disagrees between factors on pair ({u},{v})"
            )
    mapping: dict[int, int] = {v: v for v in base}
    nxt = g1.n
    for v in range(g2.n):
        if v not in base:
            mapping[v] = nxt
            nxt += 1
    new_edges = [
        (mapping[u], mapping[v])
        for u, v in g2.sorted_edges()
        if u not in base or v not in base
    ]
    return FinGraph(nxt, list(g1.edges) + new_edges), mapping


@dataclass(frozen=True)
class Extension:
    """k new vertices attached to a base; edges go only into base or new.

    ``edges`` live in the id space of the target host: new vertex j gets id
    ``host_n + j``.
    """

    base: tuple[int, ...]
    host_n: int
    new_count: int
    edges: tuple[Edge, ...]

    def new_ids(self) -> tuple[int, ...]:
        return tuple(range(self.host_n, self.host_n + self.new_count))

    def apply(self, g: FinGraph) -> FinGraph:
        if g.n != self.host_n:
            raise InvalidInput("extension built for a different host size")
        return g.add_vertices(self.new_count, self.edges)


def _extension_key(g: FinGraph, ext: Extension):
    """Canonical key of the pattern over its pointwise-fixed base."""
    verts = sorted(ext.base) + list(ext.new_ids())
    idx = {v: i for i, v in enumerate(verts)}
    edges = [
        (idx[u], idx[v])
        for u, v in list(g.edges) + list(ext.edges)
        if u in idx and v in idx
    ]
    pat = FinGraph(len(verts), edges)
    colors = tuple(
        f"fix:{v}" if v in ext.base else "" for v in verts
    )
    return canonical_key(pat, colors)


def enumerate_extensions(
    cls: ClassSpec, g: FinGraph, base: Iterable[int], k: int
) -> list[Extension]:
    """All class-legal ways to add at most k new vertices over a base.

    Deduplicated by isomorphism over the pointwise-fixed base, in a
    deterministic order (new-vertex count, edge count, canonical key).
    """
    base = tuple(sorted(g.check_subset(base)))
    if k < 0:
        raise InvalidInput("extension size bound must be >= 0")
    out: list[tuple[tuple, Extension]] = []
    seen = set()
    for j in range(1, k + 1):
        new_ids = list(range(g.n, g.n + j))
        slots = [(u, v) for v in new_ids for u in base]
        slots += [(u, v) for u, v in combinations(new_ids, 2)]
        if len(slots) > EXT_EDGE_BITS_CAP:
            raise ResourceBudget("extension edge-slot count beyond desk scale")
        for bits in range(1 << len(slots)):
            edges = tuple(slots[i] for i in range(len(slots)) if bits >> i & 1)
            ext = Extension(base=base, host_n=g.n, new_count=j, edges=edges)
            if not cls.in_class(ext.apply(g), new_vertices=new_ids):
                continue
            key = _extension_key(g, ext)
            if key in seen:
                continue
            seen.add(key)
            out.append(((j, len(edges), repr(key)), ext))
    out.sort(key=lambda t: t[0])
    return [ext for _, ext in out]


@dataclass(frozen=True)
class BuildStep:
    base: tuple[int, ...]
    new_count: int
    edges: tuple[Edge, ...]


@dataclass(frozen=True)
class GenericApproximation:
    graph: FinGraph
    log: tuple[BuildStep, ...]
    cls: ClassSpec
    seed: int
    budget: int
    truncated: bool


def smallest_legal_cycle(cls: ClassSpec) -> int | None:
    for k in range(3, MAX_CYCLE_PROBE + 1):
        if cls.in_class(cycle(k)):
            return k
    return None


PlanStep = tuple[tuple[int, ...], int, tuple[Edge, ...]]


def _component_plan(cls: ClassSpec) -> tuple[int, list[PlanStep]]:
    """(component size, steps); ids are relative to the component.

    Steps are (base ids, number of new vertices, edges added); new vertices
    take the next relative ids.
    """
    L = smallest_legal_cycle(cls)
    if L == 3:
        return 3, [
            ((), 1, ()),
            ((0,), 1, ((0, 1),)),
            ((0, 1), 1, ((0, 2), (1, 2))),
        ]
    if L is not None:
        # Grow a path on L-2 vertices, then close it with a 2-vertex arc.
        steps: list[PlanStep] = [((), 1, ())]
        for i in range(1, L - 2):
            steps.append(((i - 1,), 1, ((i - 1, i),)))
        a, b = 0, L - 3
        steps.append(((a, b), 2, ((a, L - 2), (L - 2, L - 1), (L - 1, b))))
        return L, steps
    if cls.in_class(FinGraph(2, [(0, 1)])):
        return 2, [((), 1, ()), ((0,), 1, ((0, 1),))]
    if cls.in_class(FinGraph(1)):
        return 1, [((), 1, ())]
    raise InvalidInput("class admits no one-vertex member; nothing to build")


def build_generic(cls: ClassSpec, budget: int, seed: int = 0) -> GenericApproximation:
    """Deterministic generic approximation within a vertex budget.

    Components follow the plan in lockstep; a new component starts only
    when the whole block still fits (keeping committed states transitive),
    except the very first, which absorbs any budget >= 1.  The schedule has
    no ties left, so the seed is provenance only.
    """
    if budget < 1:
        raise InvalidInput("budget must be at least 1")
    size, plan = _component_plan(cls)
    g = FinGraph(0)
    log: list[BuildStep] = []
    truncated = False
    while True:
        if g.n > 0 and budget - g.n < size:
            truncated = g.n < budget
            break
        offset = g.n
        aborted = False
        for rel_base, new_count, rel_edges in plan:
            if g.n + new_count > budget:
                truncated = True
                aborted = True
                break
            base = tuple(offset + v for v in rel_base)
            edges = tuple((offset + u, offset + v) for u, v in rel_edges)
            new_ids = list(range(g.n, g.n + new_count))
            candidate = g.add_vertices(new_count, edges)
            if not cls.in_class(candidate, new_vertices=new_ids):
                truncated = True
                aborted = True
                break
            g = candidate
            log.append(BuildStep(base=base, new_count=new_count, edges=edges))
        if aborted:
            break
    return GenericApproximation(
        graph=g,
        log=tuple(log),
        cls=cls,
        seed=seed,
        budget=budget,
        truncated=truncated,
    )


# -- approximation serialization ----------------------------------------------


def approximation_to_text(approx: GenericApproximation) -> str:
    lines = [to_text(approx.graph).rstrip("\n")]
    lines.append(f"budget {approx.budget}")
    lines.append(f"seed {approx.seed}")
    lines.append(f"truncated {int(approx.truncated)}")
    lines.append("log")
    for st in approx.log:
        bs = " ".join(str(v) for v in st.base)
        es = " ".join(f"{u}-{v}" for u, v in st.edges)
        lines.append(f"step {bs} | {es}")
    return "\n".join(lines) + "\n"


def approximation_from_text(text: str, cls: ClassSpec) -> GenericApproximation:
    head, _, tail = text.partition("budget ")
    graph = from_text(head)
    budget = seed = 0
    truncated = False
    log: list[BuildStep] = []
    for raw in ("budget " + tail).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line == "log":
            continue
        parts = line.split()
        if parts[0] == "budget":
            budget = int(parts[1])
        elif parts[0] == "seed":
            seed = int(parts[1])
        elif parts[0] == "truncated":
            truncated = bool(int(parts[1]))
        elif parts[0] == "step":
            body = line[len("step"):].strip()
            bs, _, es = body.partition("|")
            base = tuple(int(t) for t in bs.split())
            edges = tuple(
                (int(a), int(b))
                for a, b in (p.split("-") for p in es.split())
            )
            new_count = len(
                {v for e in edges for v in e} - set(base)
            ) or 1
            log.append(BuildStep(base=base, new_count=new_count, edges=edges))
        else:
            raise InvalidInput(f"cannot parse approximation line {line!r}")
    return GenericApproximation(
        graph=graph,
        log=tuple(log),
        cls=cls,
        seed=seed,
        budget=budget,
        truncated=truncated,
    )


# -- invariant 0/1 measures from types -----------------------------------------


@dataclass(frozen=True)
class TypeExtensionResult:
    """Disjoint copy of acl(tuple), the legality verdict, and the acl used."""

    extension: Extension
    check: ClassCheck
    acl_vertices: VertexSet
    acl_resolved: bool


def independent_type_extension(
    cls: ClassSpec, approx: GenericApproximation, tup: Iterable[int]
) -> TypeExtensionResult:
    """Extension copying acl(tuple) disjointly, with no edges to the host.

    Legality of the amalgam witnesses the invariant 0/1 measure coming from
    the everywhere-unrelated type; an illegal amalgam would falsify that
    for the active class and is flagged loudly by the caller.
    """
    g = approx.graph
    tup = g.check_subset(tup)
    acl = acl_approx(cls.pre, cls, g, tup)
    verts = sorted(acl.vertices)
    idx = {v: g.n + i for i, v in enumerate(verts)}
    edges = tuple(
        (idx[u], idx[v])
        for u, v in g.sorted_edges()
        if u in idx and v in idx
    )
    ext = Extension(base=(), host_n=g.n, new_count=len(verts), edges=edges)
    check = cls.in_class(ext.apply(g), new_vertices=list(idx.values()))
    return TypeExtensionResult(
        extension=ext,
        check=check,
        acl_vertices=acl.vertices,
        acl_resolved=acl.resolved,
    )
