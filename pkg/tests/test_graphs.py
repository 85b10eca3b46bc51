"""Structure-core: distances, girth, embeddings, serialization."""

import itertools
import random

import pytest

from amalgam.graphs import (
    INFINITE,
    FinGraph,
    InvalidInput,
    all_embeddings,
    automorphisms,
    complete,
    cycle,
    distance,
    find_embedding,
    from_text,
    girth,
    path,
    to_text,
)
from amalgam.canonical import canonical_form, canonical_key

PETERSEN = FinGraph(10, [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
    (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
    (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
])


def random_graph(rng, n, p=0.4):
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return FinGraph(n, edges)


def brute_distance(g, u, v):
    # Dijkstra-free oracle: breadth-first by explicit frontier sets.
    if u == v:
        return 0
    frontier, seen, d = {u}, {u}, 0
    while frontier:
        d += 1
        frontier = {w for x in frontier for w in g.neighbors(x)} - seen
        if v in frontier:
            return d
        seen |= frontier
    return None


def brute_girth(g):
    # Shortest cycle by enumerating vertex sequences.
    best = None
    for k in range(3, g.n + 1):
        for seq in itertools.permutations(range(g.n), k):
            if seq[0] != min(seq):
                continue
            ok = all(g.has_edge(seq[i], seq[(i + 1) % k]) for i in range(k))
            if ok:
                best = k
                break
        if best:
            break
    return best


class TestDistance:
    def test_path_endpoints(self):
        assert distance(path(3), 0, 2) == 2

    def test_identity(self):
        assert distance(path(3), 1, 1) == 0

    def test_disconnected_is_infinite(self):
        assert distance(FinGraph(2), 0, 1) == INFINITE

    def test_unknown_vertex(self):
        with pytest.raises(InvalidInput):
            distance(path(3), 0, 7)

    def test_metric_on_components(self):
        rng = random.Random(11)
        for _ in range(30):
            g = random_graph(rng, rng.randint(2, 8))
            for u in range(g.n):
                for v in range(g.n):
                    d = distance(g, u, v)
                    assert d == distance(g, v, u)
                    oracle = brute_distance(g, u, v)
                    assert d == (INFINITE if oracle is None else oracle)
                    for w in range(g.n):
                        d1, d2 = distance(g, u, w), distance(g, w, v)
                        if d1 != INFINITE and d2 != INFINITE:
                            assert d != INFINITE and d <= d1 + d2

    def test_infinite_ordering(self):
        assert INFINITE > 10 ** 9
        assert not INFINITE < 3
        assert INFINITE == INFINITE


class TestGirth:
    def test_six_cycle(self):
        assert girth(cycle(6)) == 6

    def test_triangle(self):
        assert girth(complete(3)) == 3

    def test_tree(self):
        assert girth(path(6)) == INFINITE

    def test_against_brute_force(self):
        rng = random.Random(5)
        for _ in range(30):
            g = random_graph(rng, rng.randint(3, 8), 0.35)
            oracle = brute_girth(g)
            assert girth(g) == (INFINITE if oracle is None else oracle)


class TestEmbeddings:
    def test_no_odd_cycle_in_bipartite(self):
        assert find_embedding(cycle(3), cycle(6)) is None

    def test_edge_into_anything_with_an_edge(self):
        assert find_embedding(FinGraph(2, [(0, 1)]), path(4)) is not None

    def test_c5_into_petersen(self):
        emb = find_embedding(cycle(5), PETERSEN)
        assert emb is not None
        # replay the embedding
        for u, v in cycle(5).edges:
            assert PETERSEN.has_edge(emb[u], emb[v])

    def test_c5_count_matches_permutation_oracle(self):
        # Oracle: every injective vertex sequence that traces a 5-cycle.
        oracle = 0
        for seq in itertools.permutations(range(10), 5):
            if all(PETERSEN.has_edge(seq[i], seq[(i + 1) % 5]) for i in range(5)):
                oracle += 1
        found = all_embeddings(cycle(5), PETERSEN, limit=0)
        assert len(found) == oracle  # both count labeled embeddings

    def test_partial_must_preserve_edges(self):
        with pytest.raises(InvalidInput):
            find_embedding(cycle(3), complete(4), partial={0: 0, 1: 1, 2: 1})

    def test_bad_partial_edge(self):
        host = path(4)
        with pytest.raises(InvalidInput):
            find_embedding(FinGraph(2, [(0, 1)]), host, partial={0: 0, 1: 2})

    def test_strong_embedding_respects_non_edges(self):
        # P3 embeds in C3 as subgraph but not induced.
        assert find_embedding(path(3), complete(3)) is not None
        assert find_embedding(path(3), complete(3), strong=True) is None


class TestAutomorphisms:
    def test_c6_has_twelve(self):
        assert len(automorphisms(cycle(6))) == 12

    def test_c6_brute_force(self):
        g = cycle(6)
        oracle = [
            p for p in itertools.permutations(range(6))
            if all(g.has_edge(p[u], p[v]) for u, v in g.edges)
        ]
        assert sorted(automorphisms(g)) == sorted(oracle)

    def test_fixing_one_end_of_an_edge(self):
        assert automorphisms(FinGraph(2, [(0, 1)]), fixed=[0]) == [(0, 1)]


class TestSerialization:
    def test_round_trip(self):
        g = FinGraph(5, [(0, 3), (1, 2)])
        assert from_text(to_text(g)) == g

    def test_comments_and_blanks(self):
        text = "# hello\n\ngraph 3\ne 0 1  # edge\n"
        assert from_text(text) == FinGraph(3, [(0, 1)])

    def test_rejects_backwards_edges(self):
        with pytest.raises(InvalidInput):
            from_text("graph 3\ne 2 1\n")

    def test_rejects_missing_header(self):
        with pytest.raises(InvalidInput):
            from_text("e 0 1\n")

    def test_canonical_invariance_under_relabeling(self):
        rng = random.Random(3)
        for _ in range(25):
            g = random_graph(rng, rng.randint(1, 8))
            perm = list(range(g.n))
            rng.shuffle(perm)
            h = g.relabel(perm)
            assert canonical_key(h) == canonical_key(g)
            assert to_text(canonical_form(h)) == to_text(canonical_form(g))

    def test_canonical_separates_nonisomorphic(self):
        assert canonical_key(path(4)) != canonical_key(cycle(4))
        assert canonical_key(FinGraph(4, [(0, 1), (2, 3)])) != canonical_key(
            FinGraph(4, [(0, 1), (1, 2)])
        )
