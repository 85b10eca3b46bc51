"""Canonical labeling of colored graphs, and orbit keys for vertex tuples.

Equitable color refinement plus individualization backtracking, run per
connected component (the canonical form of a disjoint union is the sorted
tuple of component forms).  Exhaustive over the branch tree, so correct for
any input, with a leaf budget against factorial blowup; the workbench's
graphs are sparse and near-rigid once a tuple is pinned.

Orbit keys: two tuples lie in the same orbit of ``Aut(G/fixed)`` exactly
when the colored graphs (G, pin(fixed), mark(tuple)) are isomorphic, i.e.
when their canonical keys agree.  This avoids materializing automorphism
groups, which are wreath-product huge on disjoint unions.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .graphs import FinGraph, ResourceBudget


def _refine(n: int, adj, parts: list[list[int]]) -> list[list[int]]:
    """Equitable refinement; split keys are id-free, order deterministic."""
    parts = [sorted(c) for c in parts]
    while True:
        cell_of = [0] * n
        for i, c in enumerate(parts):
            for v in c:
                cell_of[v] = i
        new_parts: list[list[int]] = []
        changed = False
        for c in parts:
            if len(c) == 1:
                new_parts.append(c)
                continue
            keyed: dict[tuple[int, ...], list[int]] = {}
            for v in c:
                counts = [0] * len(parts)
                m = adj[v]
                while m:
                    u = (m & -m).bit_length() - 1
                    m &= m - 1
                    counts[cell_of[u]] += 1
                keyed.setdefault(tuple(counts), []).append(v)
            if len(keyed) == 1:
                new_parts.append(c)
            else:
                changed = True
                for k in sorted(keyed):
                    new_parts.append(sorted(keyed[k]))
        parts = new_parts
        if not changed:
            return parts


def _component_canon(n: int, adj, colors: tuple[int, ...], leaf_budget: int):
    """Best (signature, perm) over all discrete refinements of one component.

    perm[v] = canonical position of v; signature = (colors in position
    order, relabeled sorted edges).
    """
    by_color: dict[int, list[int]] = {}
    for v in range(n):
        by_color.setdefault(colors[v], []).append(v)
    init = [by_color[c] for c in sorted(by_color)]
    color_seq = tuple(c for c in sorted(by_color) for _ in by_color[c])

    best: list = [None, None]
    leaves = [0]

    def leaf(parts):
        leaves[0] += 1
        if leaves[0] > leaf_budget:
            raise ResourceBudget("canonical labeling leaf budget exceeded")
        pos = [0] * n
        for i, c in enumerate(parts):
            pos[c[0]] = i
        edges = []
        for v in range(n):
            m = adj[v]
            while m:
                u = (m & -m).bit_length() - 1
                m &= m - 1
                if u > v:
                    a, b = pos[v], pos[u]
                    edges.append((a, b) if a < b else (b, a))
        sig = tuple(sorted(edges))
        if best[0] is None or sig < best[0]:
            best[0] = sig
            best[1] = pos

    def search(parts):
        parts = _refine(n, adj, parts)
        target = None
        for i, c in enumerate(parts):
            if len(c) > 1:
                target = i
                break
        if target is None:
            leaf(parts)
            return
        cell = parts[target]
        for v in cell:
            child = (
                parts[:target]
                + [[v], [u for u in cell if u != v]]
                + parts[target + 1:]
            )
            search(child)

    search(init)
    return (n, color_seq, best[0]), best[1]


@lru_cache(maxsize=65536)
def _component_canon_cached(n, edges, colors, leaf_budget):
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return _component_canon(n, adj, colors, leaf_budget)


def canonical_data(
    g: FinGraph,
    colors: Iterable | None = None,
    leaf_budget: int = 200_000,
):
    """Canonical key and relabeling permutation of a colored graph.

    Colors may be any sortable hashables (one per vertex, uniform type).
    Returns ``(key, perm)`` with ``perm[v]`` the canonical position of v.
    Keys agree exactly for color-isomorphic graphs.
    """
    colors = tuple(colors) if colors is not None else (0,) * g.n
    if len(colors) != g.n:
        raise ValueError("one color per vertex required")
    pieces = []
    for comp in g.components():
        idx = {v: i for i, v in enumerate(comp)}
        sub, _ = g.induced(comp)
        ccolors = tuple(colors[v] for v in comp)
        sig, pos = _component_canon_cached(
            sub.n, tuple(sub.sorted_edges()), ccolors, leaf_budget
        )
        pieces.append((sig, comp, idx, pos))
    # Isomorphic components tie on sig; break by original min vertex so the
    # permutation itself is deterministic.
    pieces.sort(key=lambda p: (p[0], p[1][0]))
    perm = [0] * g.n
    offset = 0
    for sig, comp, idx, pos in pieces:
        for v in comp:
            perm[v] = offset + pos[idx[v]]
        offset += len(comp)
    key = tuple(p[0] for p in pieces)
    return key, perm


def canonical_key(g: FinGraph, colors: Iterable[int] | None = None):
    return canonical_data(g, colors)[0]


def canonical_form(g: FinGraph) -> FinGraph:
    """The canonical representative of g's isomorphism class."""
    _, perm = canonical_data(g)
    return g.relabel(perm)


def _tuple_colors(g: FinGraph, tup: tuple[int, ...], fixed: frozenset[int]):
    """Colors pinning `fixed` pointwise and marking tuple positions.

    Colors are self-describing strings, never re-coded per tuple: a
    tuple-local code would let keys of different mark layouts collide.
    """
    colors = []
    for v in range(g.n):
        marks = []
        if v in fixed:
            marks.append(f"fix:{v}")
        occ = ",".join(str(i) for i, t in enumerate(tup) if t == v)
        if occ:
            marks.append(f"pos:{occ}")
        colors.append("|".join(marks))
    return tuple(colors)


def tuple_key(g: FinGraph, tup: Iterable[int], fixed: Iterable[int] = ()):
    """Orbit key of an ordered tuple under automorphisms fixing `fixed`."""
    tup = tuple(tup)
    for v in tup:
        g.check_vertex(v)
    fixed = g.check_subset(fixed)
    return canonical_key(g, _tuple_colors(g, tup, fixed))
