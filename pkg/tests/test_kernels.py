"""Backend conformance: the compiled kernels must match the pure ones."""

import itertools
import random

import pytest

from amalgam._kernels import _pykernels

try:
    from amalgam._kernels import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled kernels not built"
)


def random_adj(rng, n, p=0.4):
    adj = [0] * n
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return adj


@needs_compiled
def test_bfs_conformance():
    rng = random.Random(1)
    for _ in range(50):
        n = rng.randint(1, 20)
        adj = random_adj(rng, n, 0.3)
        for src in range(n):
            assert _ckernels.bfs_dists(n, adj, src) == \
                _pykernels.bfs_dists(n, adj, src)


@needs_compiled
def test_embedding_conformance():
    rng = random.Random(2)
    for _ in range(60):
        pn = rng.randint(1, 4)
        hn = rng.randint(1, 7)
        padj = random_adj(rng, pn, 0.5)
        hadj = random_adj(rng, hn, 0.5)
        for induced in (False, True):
            a = _ckernels.enum_embeddings(pn, padj, hn, hadj,
                                          induced=induced, limit=0)
            b = _pykernels.enum_embeddings(pn, padj, hn, hadj,
                                           induced=induced, limit=0)
            assert a == b


@needs_compiled
def test_embedding_partial_conformance():
    rng = random.Random(3)
    for _ in range(30):
        pn = rng.randint(1, 3)
        hn = rng.randint(2, 6)
        padj = random_adj(rng, pn, 0.5)
        hadj = random_adj(rng, hn, 0.5)
        partial = {0: rng.randrange(hn)}
        try:
            a = _ckernels.enum_embeddings(pn, padj, hn, hadj,
                                          partial=partial, limit=0)
        except Exception as e:  # both must agree on errors too
            with pytest.raises(type(e)):
                _pykernels.enum_embeddings(pn, padj, hn, hadj,
                                           partial=partial, limit=0)
            continue
        b = _pykernels.enum_embeddings(pn, padj, hn, hadj,
                                       partial=partial, limit=0)
        assert a == b


@needs_compiled
def test_min_subset_slack_conformance():
    rng = random.Random(4)
    fsc_base = [0, 4, 6, 8, 8, 10, 10, 12, 12, 14, 14, 16, 16, 18, 18, 20,
                20, 22, 22, 24, 24]
    for _ in range(60):
        n = rng.randint(1, 12)
        adj = random_adj(rng, n, 0.4)
        fsc = fsc_base[: n + 1]
        must = 0
        if rng.random() < 0.5 and n > 1:
            must = 1 << rng.randrange(n)
        for connected in (True, False):
            a = _ckernels.min_subset_slack(
                n, adj, 4, 2, fsc, must_hit=must,
                connected_only=connected, stop_at_negative=False)
            b = _pykernels.min_subset_slack(
                n, adj, 4, 2, fsc, must_hit=must,
                connected_only=connected, stop_at_negative=False)
            assert a == b


@needs_compiled
def test_min_superset_delta_conformance():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(1, 12)
        adj = random_adj(rng, n, 0.4)
        base = 0
        for v in rng.sample(range(n), rng.randint(0, n)):
            base |= 1 << v
        a = _ckernels.min_superset_delta(n, adj, 4, 2, base)
        b = _pykernels.min_superset_delta(n, adj, 4, 2, base)
        assert a == b


def test_connected_scan_agrees_with_full_scan_on_violations():
    # With a subadditive control the connected scan must find a negative
    # slack exactly when the full scan does.
    rng = random.Random(6)
    fsc_base = [0, 4, 6, 8, 8, 10, 10, 12, 12, 14, 14]
    for _ in range(80):
        n = rng.randint(1, 10)
        adj = random_adj(rng, n, 0.4)
        fsc = fsc_base[: n + 1]
        a = _pykernels.min_subset_slack(n, adj, 4, 2, fsc,
                                        connected_only=True,
                                        stop_at_negative=False)
        b = _pykernels.min_subset_slack(n, adj, 4, 2, fsc,
                                        connected_only=False,
                                        stop_at_negative=False)
        # Violation detection must agree; the connected minimum may sit
        # above the global one (disjoint violators add up).
        assert (a[0] < 0) == (b[0] < 0)
        assert a[0] >= b[0]


def test_superset_delta_collects_all_minimizers():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(1, 9)
        adj = random_adj(rng, n, 0.35)
        base = 0
        val, masks = _pykernels.min_superset_delta(n, adj, 4, 2, base)
        # oracle: enumerate all supersets
        best = None
        all_masks = []
        for bits in range(1 << n):
            if bits & base != base:
                continue
            size = bin(bits).count("1")
            edges = 0
            for v in range(n):
                if bits >> v & 1:
                    edges += bin(adj[v] & bits & ((1 << v) - 1)).count("1")
            value = 4 * size - 2 * edges
            if best is None or value < best:
                best = value
                all_masks = [bits]
            elif value == best:
                all_masks.append(bits)
        assert val == best
        assert sorted(masks) == sorted(all_masks)
