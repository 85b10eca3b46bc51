"""Pure-Python search kernels.

Graphs enter as adjacency bitmask rows (``adj[v]`` = int with bit ``u`` set
iff ``u ~ v``).  These are the hot loops of the workbench: breadth-first
distances, subgraph-embedding backtracking, and the two predimension sweeps
(minimum slack over subsets, minimum delta over supersets).  A compiled twin
lives in ``_ckernels.pyx``; keep signatures and results bit-identical.
"""

from __future__ import annotations

BACKEND = "python"


def bfs_dists(n: int, adj, src: int) -> list[int]:
    """Hop distances from ``src``; -1 marks unreachable vertices."""
    dist = [-1] * n
    dist[src] = 0
    frontier = 1 << src
    seen = frontier
    d = 0
    while frontier:
        d += 1
        nxt = 0
        f = frontier
        while f:
            v = (f & -f).bit_length() - 1
            f &= f - 1
            nxt |= adj[v]
        nxt &= ~seen
        m = nxt
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            dist[v] = d
        seen |= nxt
        frontier = nxt
    return dist


def _match_order(pn: int, padj, pinned) -> list[int]:
    # Pinned vertices first, then most-constrained-first (placed-neighbour
    # count, degree, id).  A static order is enough at desk scale.
    order = sorted(pinned)
    placed = set(order)
    degs = [padj[u].bit_count() for u in range(pn)]
    while len(order) < pn:
        best = None
        for u in range(pn):
            if u in placed:
                continue
            anchored = sum(1 for w in order if padj[u] >> w & 1)
            key = (-anchored, -degs[u], u)
            if best is None or key < best[0]:
                best = (key, u)
        order.append(best[1])
        placed.add(best[1])
    return order


def enum_embeddings(
    pn: int,
    padj,
    hn: int,
    hadj,
    induced: bool = False,
    partial: dict[int, int] | None = None,
    limit: int = 1,
) -> list[tuple[int, ...]]:
    """Edge-preserving injections pattern -> host, as image tuples.

    ``induced`` additionally preserves non-edges (strong embeddings).
    ``limit`` caps the number found; 0 means enumerate all.  Output is
    sorted, so it is deterministic whenever it is exhaustive.
    """
    if pn == 0:
        return [()]
    if pn > hn:
        return []
    partial = partial or {}
    order = _match_order(pn, padj, partial.keys())
    earlier_nbr = []
    earlier_non = []
    for i, u in enumerate(order):
        earlier_nbr.append([w for w in order[:i] if padj[u] >> w & 1])
        earlier_non.append([w for w in order[:i] if not padj[u] >> w & 1])
    pdeg = [padj[u].bit_count() for u in range(pn)]
    hdeg = [hadj[v].bit_count() for v in range(hn)]
    full = (1 << hn) - 1

    img = [-1] * pn
    found: list[tuple[int, ...]] = []

    def place(i: int, used: int) -> bool:
        if i == pn:
            found.append(tuple(img))
            return bool(limit) and len(found) >= limit
        u = order[i]
        cand = full & ~used
        if u in partial:
            cand &= 1 << partial[u]
        for w in earlier_nbr[i]:
            cand &= hadj[img[w]]
        if induced:
            for w in earlier_non[i]:
                cand &= ~hadj[img[w]]
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            if hdeg[v] < pdeg[u]:
                continue
            img[u] = v
            if place(i + 1, used | (1 << v)):
                return True
            img[u] = -1
        return False

    place(0, 0)
    found.sort()
    return found


def min_subset_slack(
    n: int,
    adj,
    wv: int,
    we: int,
    fsc,
    must_hit: int = 0,
    connected_only: bool = True,
    stop_at_negative: bool = True,
):
    """Minimum of ``wv*|B| - we*e(B) - fsc[|B|]`` over nonempty subsets B.

    ``must_hit`` restricts to subsets meeting the given mask (0 = no
    restriction).  With ``connected_only`` the scan covers connected
    subsets; sound for violation detection exactly when minimal violators
    are connected (subadditive control function), and the returned value
    is then the minimum over connected subsets only.
    Returns ``(best_value, best_mask)``; ``(0, 0)`` for the empty scan.
    """
    if n == 0:
        return (0, 0)
    universe = (1 << n) - 1
    gain = [min(0, wv - we * adj[v].bit_count()) for v in range(n)]
    state = {"val": None, "mask": 0}

    def consider(val, mask):
        if state["val"] is None or val < state["val"]:
            state["val"] = val
            state["mask"] = mask

    def done():
        return stop_at_negative and state["val"] is not None and state["val"] < 0

    if connected_only:
        if must_hit:
            roots = [v for v in range(n) if must_hit >> v & 1]
        else:
            roots = list(range(n))
        avoid = 0
        for r in roots:
            if must_hit:
                allowed = universe & ~avoid
                avoid |= 1 << r
            else:
                allowed = universe & ~((1 << r) - 1)
            _grow_connected(n, adj, wv, we, fsc, r, allowed, universe, gain,
                            consider, state, done)
            if done():
                break
    else:
        _all_subsets_scan(n, adj, wv, we, fsc, must_hit, gain, consider,
                          state, done)
    if state["val"] is None:
        return (0, 0)
    return (state["val"], state["mask"])


def _grow_connected(n, adj, wv, we, fsc, root, allowed, universe, gain,
                    consider, state, done):
    # Ban-list enumeration: each connected subset of `allowed` containing
    # `root` is visited exactly once.
    def rec(mask, size, edges, ext, banned):
        consider(wv * size - we * edges - fsc[size], mask)
        if done():
            return
        joinable = allowed & ~mask & ~banned
        if state["val"] is not None:
            gsum = 0
            cnt = 0
            m = joinable
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                gsum += gain[v]
                cnt += 1
            # No extension can go below this; f is non-decreasing.
            if wv * size - we * edges + gsum - fsc[size + cnt] > state["val"]:
                return
        processed = 0
        m = ext
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            bit = 1 << v
            nb = banned | processed
            nm = mask | bit
            rec(nm, size + 1, edges + (adj[v] & mask).bit_count(),
                ((ext | adj[v]) & ~nm) & ~nb & allowed, nb)
            if done():
                return
            processed |= bit

    rootbit = 1 << root
    banned0 = universe & ~allowed
    rec(rootbit, 1, 0, adj[root] & allowed & ~rootbit & ~banned0, banned0)


def _all_subsets_scan(n, adj, wv, we, fsc, must_hit, gain, consider, state, done):
    # Plain include/exclude DFS; callers cap n.
    suffix_gain = [0] * (n + 1)
    for v in range(n - 1, -1, -1):
        suffix_gain[v] = suffix_gain[v + 1] + gain[v]
    fmax = fsc[n]

    def rec(v, mask, size, edges):
        if done():
            return
        if v == n:
            if size and (must_hit == 0 or mask & must_hit):
                consider(wv * size - we * edges - fsc[size], mask)
            return
        if state["val"] is not None:
            if wv * size - we * edges + suffix_gain[v] - fmax > state["val"]:
                return
        if must_hit and not mask & must_hit and not must_hit >> v:
            return
        rec(v + 1, mask | (1 << v), size + 1, edges + (adj[v] & mask).bit_count())
        rec(v + 1, mask, size, edges)

    rec(0, 0, 0, 0)


def min_superset_delta(
    n: int,
    adj,
    wv: int,
    we: int,
    base_mask: int,
    collect: bool = True,
    cap: int = 100_000,
    node_budget: int = 4_000_000,
):
    """Minimum of ``wv*|B| - we*e(B)`` over supersets B of ``base_mask``.

    Returns ``(best_value, masks)``; when ``collect``, ``masks`` holds every
    minimizer (their intersection is the self-sufficient closure).
    """
    universe = (1 << n) - 1
    cands = universe & ~base_mask
    # A minimizer keeps no outside vertex with we*deg < wv: dropping such a
    # vertex strictly lowers delta.  Iterate to a fixpoint.
    changed = True
    while changed:
        changed = False
        live = base_mask | cands
        m = cands
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if we * (adj[v] & live).bit_count() < wv:
                cands &= ~(1 << v)
                changed = True
    order = []
    m = cands
    while m:
        v = (m & -m).bit_length() - 1
        m &= m - 1
        order.append(v)
    base_size = base_mask.bit_count()
    base_edges = 0
    m = base_mask
    while m:
        v = (m & -m).bit_length() - 1
        m &= m - 1
        base_edges += (adj[v] & base_mask & ((1 << v) - 1)).bit_count()
    live = base_mask | cands
    gains = [min(0, wv - we * (adj[v] & live).bit_count()) for v in order]
    suffix = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + gains[i]

    best: list = [None]
    masks: list[int] = []
    nodes = [0]

    def rec(i, mask, size, edges):
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise RuntimeError("superset search budget exceeded")
        val = wv * size - we * edges
        if i == len(order):
            if best[0] is None or val < best[0]:
                best[0] = val
                masks.clear()
                masks.append(mask)
            elif val == best[0] and collect:
                if len(masks) >= cap:
                    raise RuntimeError("minimizer collection cap exceeded")
                masks.append(mask)
            return
        if best[0] is not None and val + suffix[i] > best[0]:
            return
        v = order[i]
        rec(i + 1, mask | (1 << v), size + 1, edges + (adj[v] & mask).bit_count())
        rec(i + 1, mask, size, edges)

    rec(0, base_mask, base_size, base_edges)
    masks.sort()
    return best[0], masks
