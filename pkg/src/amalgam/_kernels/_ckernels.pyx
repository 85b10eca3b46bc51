# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the pure-Python kernels.

Same algorithms, same scan orders, bit-identical results (enforced by
tests/test_kernels.py).  Hosts beyond 64 vertices or weights beyond the
int64 comfort zone delegate to the pure implementations.
"""

from . import _pykernels as _pk

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

ctypedef unsigned long long u64
ctypedef long long i64

BACKEND = "compiled"

DEF MAXN = 64
cdef i64 WCAP = <i64>1 << 40


cdef inline int _pop(u64 m) nogil:
    return __builtin_popcountll(m)


cdef inline int _low(u64 m) nogil:
    return __builtin_ctzll(m)


def bfs_dists(int n, adj, int src):
    """Hop distances from ``src``; -1 marks unreachable vertices."""
    if n > MAXN:
        return _pk.bfs_dists(n, adj, src)
    cdef u64 A[MAXN]
    cdef int dist_c[MAXN]
    cdef int v, d
    cdef u64 frontier, seen, nxt, f, m
    for v in range(n):
        A[v] = adj[v]
        dist_c[v] = -1
    dist_c[src] = 0
    frontier = (<u64>1) << src
    seen = frontier
    d = 0
    while frontier:
        d += 1
        nxt = 0
        f = frontier
        while f:
            v = _low(f)
            f &= f - 1
            nxt |= A[v]
        nxt &= ~seen
        m = nxt
        while m:
            v = _low(m)
            m &= m - 1
            dist_c[v] = d
        seen |= nxt
        frontier = nxt
    return [dist_c[v] for v in range(n)]


# -- embedding search ---------------------------------------------------------

cdef struct EmbState:
    int pn
    int hn
    int limit
    bint induced
    u64 full
    u64 PA[MAXN]
    u64 HA[MAXN]
    int order[MAXN]
    u64 pin_mask[MAXN]          # host candidate restriction per position
    u64 earlier_nbr[MAXN]       # pattern vertices placed earlier, adjacent
    u64 earlier_non[MAXN]
    int pdeg[MAXN]
    int hdeg[MAXN]
    int img[MAXN]


cdef bint _place(EmbState* s, int i, u64 used, list found):
    cdef int u, v, w
    cdef u64 cand, m
    if i == s.pn:
        found.append(tuple([s.img[w] for w in range(s.pn)]))
        return s.limit != 0 and len(found) >= s.limit
    u = s.order[i]
    cand = s.full & ~used & s.pin_mask[i]
    m = s.earlier_nbr[i]
    while m:
        w = _low(m)
        m &= m - 1
        cand &= s.HA[s.img[w]]
    if s.induced:
        m = s.earlier_non[i]
        while m:
            w = _low(m)
            m &= m - 1
            cand &= ~s.HA[s.img[w]]
    while cand:
        v = _low(cand)
        cand &= cand - 1
        if s.hdeg[v] < s.pdeg[u]:
            continue
        s.img[u] = v
        if _place(s, i + 1, used | ((<u64>1) << v), found):
            return True
        s.img[u] = -1
    return False


def enum_embeddings(int pn, padj, int hn, hadj, bint induced=False,
                    partial=None, int limit=1):
    """Edge-preserving injections pattern -> host, as sorted image tuples."""
    if pn > MAXN or hn > MAXN:
        return _pk.enum_embeddings(pn, padj, hn, hadj, induced=induced,
                                   partial=partial, limit=limit)
    if pn == 0:
        return [()]
    if pn > hn:
        return []
    part = partial or {}
    order = _pk._match_order(pn, padj, part.keys())
    cdef EmbState s
    cdef int i, u, w
    s.pn = pn
    s.hn = hn
    s.limit = limit
    s.induced = induced
    s.full = ((<u64>1) << hn) - 1 if hn < 64 else <u64>0xFFFFFFFFFFFFFFFF
    for u in range(pn):
        s.PA[u] = padj[u]
        s.pdeg[u] = _pop(s.PA[u])
        s.img[u] = -1
    for u in range(hn):
        s.HA[u] = hadj[u]
        s.hdeg[u] = _pop(s.HA[u])
    for i in range(pn):
        u = order[i]
        s.order[i] = u
        s.pin_mask[i] = s.full
        if u in part:
            s.pin_mask[i] = (<u64>1) << <int>part[u]
        s.earlier_nbr[i] = 0
        s.earlier_non[i] = 0
        for w in order[:i]:
            if (s.PA[u] >> w) & 1:
                s.earlier_nbr[i] |= (<u64>1) << w
            else:
                s.earlier_non[i] |= (<u64>1) << w
    found: list = []
    _place(&s, 0, 0, found)
    found.sort()
    return found


# -- minimum subset slack ----------------------------------------------------

cdef struct SlackState:
    int n
    i64 wv
    i64 we
    bint stop_neg
    bint have
    i64 best
    u64 best_mask
    u64 A[MAXN]
    i64 fsc[MAXN + 1]
    i64 gain[MAXN]
    u64 allowed


cdef inline void _consider(SlackState* s, i64 val, u64 mask) nogil:
    if (not s.have) or val < s.best:
        s.have = True
        s.best = val
        s.best_mask = mask


cdef inline bint _done(SlackState* s) nogil:
    return s.stop_neg and s.have and s.best < 0


cdef void _grow(SlackState* s, u64 mask, int size, i64 edges, u64 ext,
                u64 banned):
    cdef int v, cnt
    cdef i64 gsum
    cdef u64 joinable, m, nb, nm, bit
    _consider(s, s.wv * size - s.we * edges - s.fsc[size], mask)
    if _done(s):
        return
    joinable = s.allowed & ~mask & ~banned
    if s.have:
        gsum = 0
        cnt = 0
        m = joinable
        while m:
            v = _low(m)
            m &= m - 1
            gsum += s.gain[v]
            cnt += 1
        if s.wv * size - s.we * edges + gsum - s.fsc[size + cnt] > s.best:
            return
    cdef u64 processed = 0
    m = ext
    while m:
        v = _low(m)
        m &= m - 1
        bit = (<u64>1) << v
        nb = banned | processed
        nm = mask | bit
        _grow(s, nm, size + 1, edges + _pop(s.A[v] & mask),
              ((ext | s.A[v]) & ~nm) & ~nb & s.allowed, nb)
        if _done(s):
            return
        processed |= bit


cdef void _scan_all(SlackState* s, u64 must_hit):
    # plain include/exclude DFS mirroring _pykernels._all_subsets_scan
    cdef i64 suffix[MAXN + 1]
    cdef int v
    suffix[s.n] = 0
    for v in range(s.n - 1, -1, -1):
        suffix[v] = suffix[v + 1] + s.gain[v]
    cdef i64 fmax = s.fsc[s.n]
    _scan_rec(s, 0, 0, 0, 0, must_hit, suffix, fmax)


cdef void _scan_rec(SlackState* s, int v, u64 mask, int size, i64 edges,
                    u64 must_hit, i64* suffix, i64 fmax):
    if _done(s):
        return
    if v == s.n:
        if size and (must_hit == 0 or (mask & must_hit)):
            _consider(s, s.wv * size - s.we * edges - s.fsc[size], mask)
        return
    if s.have:
        if s.wv * size - s.we * edges + suffix[v] - fmax > s.best:
            return
    if must_hit and not (mask & must_hit) and not (must_hit >> v):
        return
    _scan_rec(s, v + 1, mask | ((<u64>1) << v), size + 1,
              edges + _pop(s.A[v] & mask), must_hit, suffix, fmax)
    _scan_rec(s, v + 1, mask, size, edges, must_hit, suffix, fmax)


def min_subset_slack(int n, adj, wv, we, fsc, must_hit=0,
                     bint connected_only=True, bint stop_at_negative=True):
    """Minimum of ``wv*|B| - we*e(B) - fsc[|B|]`` over nonempty subsets."""
    if n > MAXN or abs(wv) >= WCAP or abs(we) >= WCAP or \
            any(abs(x) >= WCAP for x in fsc):
        return _pk.min_subset_slack(n, adj, wv, we, fsc, must_hit=must_hit,
                                    connected_only=connected_only,
                                    stop_at_negative=stop_at_negative)
    if n == 0:
        return (0, 0)
    cdef SlackState s
    cdef int v, r
    cdef u64 universe = ((<u64>1) << n) - 1 if n < 64 else <u64>0xFFFFFFFFFFFFFFFF
    cdef u64 mh = must_hit
    s.n = n
    s.wv = wv
    s.we = we
    s.stop_neg = stop_at_negative
    s.have = False
    s.best = 0
    s.best_mask = 0
    for v in range(n):
        s.A[v] = adj[v]
        s.fsc[v] = fsc[v]
    s.fsc[n] = fsc[n]
    for v in range(n):
        s.gain[v] = s.wv - s.we * _pop(s.A[v])
        if s.gain[v] > 0:
            s.gain[v] = 0
    cdef u64 avoid = 0
    cdef u64 rootbit
    if connected_only:
        for r in range(n):
            if mh and not ((mh >> r) & 1):
                continue
            if mh:
                s.allowed = universe & ~avoid
                avoid |= (<u64>1) << r
            else:
                s.allowed = universe & ~(((<u64>1) << r) - 1)
            rootbit = (<u64>1) << r
            _grow(&s, rootbit, 1, 0,
                  s.A[r] & s.allowed & ~rootbit & ~(universe & ~s.allowed),
                  universe & ~s.allowed)
            if _done(&s):
                break
    else:
        s.allowed = universe
        _scan_all(&s, mh)
    if not s.have:
        return (0, 0)
    return (int(s.best), int(s.best_mask))


# -- minimum superset delta ---------------------------------------------------

cdef struct SupState:
    int n
    int nord
    i64 wv
    i64 we
    bint collect
    bint have
    i64 best
    long node_budget
    long nodes
    u64 A[MAXN]
    int order[MAXN]
    i64 suffix[MAXN + 1]


cdef int _sup_rec(SupState* s, int i, u64 mask, int size, i64 edges,
                  list masks, long cap) except -1:
    s.nodes += 1
    if s.nodes > s.node_budget:
        raise RuntimeError("superset search budget exceeded")
    cdef i64 val = s.wv * size - s.we * edges
    cdef int v
    if i == s.nord:
        if (not s.have) or val < s.best:
            s.have = True
            s.best = val
            del masks[:]
            masks.append(int(mask))
        elif val == s.best and s.collect:
            if len(masks) >= cap:
                raise RuntimeError("minimizer collection cap exceeded")
            masks.append(int(mask))
        return 0
    if s.have and val + s.suffix[i] > s.best:
        return 0
    v = s.order[i]
    _sup_rec(s, i + 1, mask | ((<u64>1) << v), size + 1,
             edges + _pop(s.A[v] & mask), masks, cap)
    _sup_rec(s, i + 1, mask, size, edges, masks, cap)
    return 0


def min_superset_delta(int n, adj, wv, we, base_mask, bint collect=True,
                       cap=100_000, node_budget=4_000_000):
    """Minimum of ``wv*|B| - we*e(B)`` over supersets B of ``base_mask``."""
    if n > MAXN or abs(wv) >= WCAP or abs(we) >= WCAP:
        return _pk.min_superset_delta(n, adj, wv, we, base_mask,
                                      collect=collect, cap=cap,
                                      node_budget=node_budget)
    cdef SupState s
    cdef int v, i
    cdef u64 universe = ((<u64>1) << n) - 1 if n < 64 else <u64>0xFFFFFFFFFFFFFFFF
    cdef u64 base = base_mask
    cdef u64 cands = universe & ~base
    cdef u64 live, m
    cdef bint changed = True
    s.n = n
    s.wv = wv
    s.we = we
    s.collect = collect
    s.have = False
    s.best = 0
    s.node_budget = node_budget
    s.nodes = 0
    for v in range(n):
        s.A[v] = adj[v]
    while changed:
        changed = False
        live = base | cands
        m = cands
        while m:
            v = _low(m)
            m &= m - 1
            if s.we * _pop(s.A[v] & live) < s.wv:
                cands &= ~((<u64>1) << v)
                changed = True
    s.nord = 0
    m = cands
    while m:
        v = _low(m)
        m &= m - 1
        s.order[s.nord] = v
        s.nord += 1
    cdef int base_size = _pop(base)
    cdef i64 base_edges = 0
    m = base
    while m:
        v = _low(m)
        m &= m - 1
        base_edges += _pop(s.A[v] & base & (((<u64>1) << v) - 1))
    live = base | cands
    cdef i64 g
    s.suffix[s.nord] = 0
    for i in range(s.nord - 1, -1, -1):
        g = s.wv - s.we * _pop(s.A[s.order[i]] & live)
        if g > 0:
            g = 0
        s.suffix[i] = s.suffix[i + 1] + g
    masks: list = []
    _sup_rec(&s, 0, base, base_size, base_edges, masks, cap)
    masks.sort()
    return int(s.best), masks
