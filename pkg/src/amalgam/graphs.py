"""Finite simple graphs: the substrate of the workbench.

Vertices are always the dense range ``0..n-1``.  Edge sets are frozensets of
sorted pairs.  Graphs are immutable; every derived object (induced subgraph,
amalgam, relabeling) is a new ``FinGraph``.
"""

from __future__ import annotations

from typing import Iterable

from ._kernels import bfs_dists, enum_embeddings


class InvalidInput(ValueError):
    """Raised when an operation receives arguments violating its contract."""


class ResourceBudget(RuntimeError):
    """Raised when a search exceeds its configured desk-scale budget."""


class _Infinite:
    """Distinguished infinite value for distances and girth.

    Compares strictly greater than every integer; never participates in
    arithmetic (that would hide errors behind large finite numbers).
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __eq__(self, other):
        return isinstance(other, _Infinite)

    def __hash__(self):
        return hash("INFINITE")

    def __gt__(self, other):
        if isinstance(other, _Infinite):
            return False
        if isinstance(other, int):
            return True
        return NotImplemented

    def __lt__(self, other):
        return False if isinstance(other, (int, _Infinite)) else NotImplemented

    def __ge__(self, other):
        return True if isinstance(other, (int, _Infinite)) else NotImplemented

    def __le__(self, other):
        if isinstance(other, _Infinite):
            return True
        if isinstance(other, int):
            return False
        return NotImplemented


INFINITE = _Infinite()

Edge = tuple[int, int]
VertexSet = frozenset[int]


def normalize_edge(u: int, v: int) -> Edge:
    if u == v:
        raise InvalidInput(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class FinGraph:
    """Finite simple graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise InvalidInput("vertex count must be non-negative")
        es = set()
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u},{v}) mentions unknown vertex")
            e = normalize_edge(u, v)
            es.add(e)
            adj[e[0]] |= 1 << e[1]
            adj[e[1]] |= 1 << e[0]
        self.n = n
        self.edges = frozenset(es)
        self.adj = tuple(adj)

    # -- basic structure ---------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FinGraph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"FinGraph(n={self.n}, m={len(self.edges)})"

    @property
    def vertices(self) -> range:
        return range(self.n)

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        self.check_vertex(v)
        out, m = [], self.adj[v]
        while m:
            u = (m & -m).bit_length() - 1
            m &= m - 1
            out.append(u)
        return out

    def has_edge(self, u: int, v: int) -> bool:
        self.check_vertex(u)
        self.check_vertex(v)
        return bool(self.adj[u] >> v & 1) if u != v else False

    def check_vertex(self, v: int):
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise InvalidInput(f"unknown vertex {v!r}")

    def check_subset(self, A: Iterable[int]) -> VertexSet:
        A = frozenset(A)
        for v in A:
            self.check_vertex(v)
        return A

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def edges_within(self, A: Iterable[int]) -> int:
        """Number of edges with both endpoints in A."""
        A = self.check_subset(A)
        mask = mask_of(A)
        total = 0
        for v in A:
            total += (self.adj[v] & mask & ((1 << v) - 1)).bit_count()
        return total

    def edges_between(self, A: Iterable[int], B: Iterable[int]) -> int:
        mb = mask_of(self.check_subset(B))
        return sum((self.adj[v] & mb).bit_count() for v in self.check_subset(A))

    # -- derived graphs ----------------------------------------------------

    def add_vertices(self, k: int, new_edges: Iterable[Edge] = ()) -> "FinGraph":
        return FinGraph(self.n + k, list(self.edges) + list(new_edges))

    def relabel(self, perm: Iterable[int]) -> "FinGraph":
        """New graph with vertex v renamed perm[v]."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise InvalidInput("relabeling is not a permutation")
        return FinGraph(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def induced(self, A: Iterable[int]) -> tuple["FinGraph", tuple[int, ...]]:
        """Induced subgraph on A, renumbered densely; returns (graph, old ids)."""
        old = tuple(sorted(self.check_subset(A)))
        idx = {v: i for i, v in enumerate(old)}
        es = [(idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx]
        return FinGraph(len(old), es), old

    def components(self) -> list[tuple[int, ...]]:
        seen = 0
        out = []
        for v in range(self.n):
            if seen >> v & 1:
                continue
            dists = bfs_dists(self.n, self.adj, v)
            comp = tuple(u for u in range(self.n) if dists[u] >= 0)
            for u in comp:
                seen |= 1 << u
            out.append(comp)
        return out


def mask_of(A: Iterable[int]) -> int:
    m = 0
    for v in A:
        m |= 1 << v
    return m


def set_of(mask: int) -> VertexSet:
    out = set()
    while mask:
        v = (mask & -mask).bit_length() - 1
        mask &= mask - 1
        out.add(v)
    return frozenset(out)


# -- small builders ----------------------------------------------------------


def cycle(k: int) -> FinGraph:
    if k < 3:
        raise InvalidInput("cycles need at least 3 vertices")
    return FinGraph(k, [(i, (i + 1) % k) for i in range(k)])


def path(k: int) -> FinGraph:
    """Path on k vertices (length k-1)."""
    if k < 1:
        raise InvalidInput("paths need at least 1 vertex")
    return FinGraph(k, [(i, i + 1) for i in range(k - 1)])


def complete(k: int) -> FinGraph:
    return FinGraph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


# -- distances and cycles -----------------------------------------------------


def distances_from(g: FinGraph, src: int) -> list[int]:
    g.check_vertex(src)
    return bfs_dists(g.n, g.adj, src)


def distance(g: FinGraph, u: int, v: int):
    """Shortest-path distance; INFINITE when u and v are disconnected."""
    g.check_vertex(u)
    g.check_vertex(v)
    d = bfs_dists(g.n, g.adj, u)[v]
    return INFINITE if d < 0 else d


def girth(g: FinGraph):
    """Length of the shortest cycle; INFINITE for forests.

    Shortest cycle through an edge (u,v) = 1 + shortest u-v path avoiding
    that edge; minimizing over edges covers every cycle.
    """
    best = None
    for u, v in g.sorted_edges():
        adj = list(g.adj)
        adj[u] &= ~(1 << v)
        adj[v] &= ~(1 << u)
        d = bfs_dists(g.n, adj, u)[v]
        if d >= 0 and (best is None or d + 1 < best):
            best = d + 1
    return INFINITE if best is None else best


# -- embeddings ----------------------------------------------------------------

Embedding = dict[int, int]


def check_partial(pattern: FinGraph, host: FinGraph, partial: Embedding | None):
    if not partial:
        return {}
    seen_hosts = set()
    for u, v in partial.items():
        pattern.check_vertex(u)
        host.check_vertex(v)
        if v in seen_hosts:
            raise InvalidInput("partial map is not injective")
        seen_hosts.add(v)
    for u, v in partial.items():
        for u2, v2 in partial.items():
            if u < u2 and pattern.has_edge(u, u2) and not host.has_edge(v, v2):
                raise InvalidInput(
                    f"partial map breaks edge ({u},{u2})"
                )
    return dict(partial)


def find_embedding(
    pattern: FinGraph,
    host: FinGraph,
    partial: Embedding | None = None,
    strong: bool = False,
) -> Embedding | None:
    """One edge-preserving injection pattern -> host, or None.

    ``strong`` also preserves non-edges (induced embedding).  Exhaustive
    backtracking; complete at desk scale.
    """
    partial = check_partial(pattern, host, partial)
    hits = enum_embeddings(
        pattern.n, pattern.adj, host.n, host.adj,
        induced=strong, partial=partial, limit=1,
    )
    if not hits:
        return None
    return {u: hits[0][u] for u in range(pattern.n)}


def all_embeddings(
    pattern: FinGraph,
    host: FinGraph,
    partial: Embedding | None = None,
    strong: bool = False,
    limit: int = 0,
) -> list[Embedding]:
    partial = check_partial(pattern, host, partial)
    hits = enum_embeddings(
        pattern.n, pattern.adj, host.n, host.adj,
        induced=strong, partial=partial, limit=limit,
    )
    return [{u: t[u] for u in range(pattern.n)} for t in hits]


def automorphisms(g: FinGraph, fixed: Iterable[int] = (), limit: int = 200_000):
    """Explicit list of automorphisms fixing ``fixed`` pointwise.

    Stored as image tuples.  Exhaustive; raises ResourceBudget beyond
    ``limit`` (symmetric hosts blow up factorially - use orbit keys there).
    """
    fixed = g.check_subset(fixed)
    partial = {v: v for v in fixed}
    perms = enum_embeddings(
        g.n, g.adj, g.n, g.adj, induced=True, partial=partial, limit=limit + 1
    )
    if len(perms) > limit:
        raise ResourceBudget("automorphism group larger than the element-list cap")
    return perms


# -- plain-text serialization --------------------------------------------------


def to_text(g: FinGraph) -> str:
    """Graph file body: header line then sorted edge lines."""
    lines = [f"graph {g.n}"]
    lines += [f"e {u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> FinGraph:
    n = None
    edges = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "graph":
            if n is not None:
                raise InvalidInput(f"line {ln}: duplicate graph header")
            if len(parts) != 2 or not parts[1].isdigit():
                raise InvalidInput(f"line {ln}: malformed graph header")
            n = int(parts[1])
        elif parts[0] == "e":
            if n is None:
                raise InvalidInput(f"line {ln}: edge before graph header")
            if len(parts) != 3:
                raise InvalidInput(f"line {ln}: malformed edge line")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise InvalidInput(f"line {ln}: malformed edge line") from None
            if not u < v:
                raise InvalidInput(f"line {ln}: edges must satisfy u < v")
            edges.append((u, v))
        else:
            raise InvalidInput(f"line {ln}: unknown item {parts[0]!r}")
    if n is None:
        raise InvalidInput("missing graph header")
    return FinGraph(n, edges)
