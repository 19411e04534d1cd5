"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Used when the extension is not built or ``AGONY_PURE_PYTHON=1`` is set.
Same algorithms, same tie-breaking, same outputs; only slower.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

INF = 1 << 60


def agony_d1(n, src, dst):
    """Minimum d=1 agony by primal-dual min-cost flow.

    All edges start in the circulation (saturated); the imbalance this
    creates is routed back from excess to deficit nodes over reversed
    edges at unit cost.  The edges still saturated at the end form a
    maximum Eulerian subgraph whose size is the agony, and the node
    potentials give the ranks.
    """
    n = int(n)
    if n == 0:
        return np.empty(0, dtype=np.int64), 0
    src = [int(x) for x in src]
    dst = [int(x) for x in dst]
    m = len(src)
    S, T, nn = n, n + 1, n + 2

    excess = [0] * n
    for u, v in zip(src, dst):
        excess[v] += 1
        excess[u] -= 1

    head, tail, cap, cost = [], [], [], []
    for u, v in zip(src, dst):
        tail += [v, u]
        head += [u, v]
        cap += [1, 0]
        cost += [1, -1]
    total = 0
    for i in range(n):
        if excess[i] > 0:
            tail += [S, i]
            head += [i, S]
            cap += [excess[i], 0]
            cost += [0, 0]
            total += excess[i]
        elif excess[i] < 0:
            tail += [i, T]
            head += [T, i]
            cap += [-excess[i], 0]
            cost += [0, 0]
    adj = [[] for _ in range(nn)]
    for a, t in enumerate(tail):
        adj[t].append(a)

    pi = [0] * nn
    flow = 0
    while flow < total:
        dist = [INF] * nn
        dist[S] = 0
        heap = [(0, S)]
        dT = INF
        while heap:
            dv, x = heapq.heappop(heap)
            if dv > dist[x]:
                continue
            if x == T:
                dT = dv
                break
            px = pi[x]
            for a in adj[x]:
                if cap[a] <= 0:
                    continue
                y = head[a]
                nd = dv + cost[a] + px - pi[y]
                if nd < dist[y]:
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        if dT == INF:
            raise RuntimeError("residual network disconnected before all excess was routed")
        for i in range(nn):
            pi[i] += dist[i] if dist[i] < dT else dT

        while True:
            level = [-1] * nn
            level[S] = 0
            q = deque([S])
            while q:
                x = q.popleft()
                for a in adj[x]:
                    if cap[a] <= 0:
                        continue
                    y = head[a]
                    if level[y] < 0 and cost[a] + pi[x] - pi[y] == 0:
                        level[y] = level[x] + 1
                        q.append(y)
            if level[T] < 0:
                break
            it = [0] * nn
            path: list[int] = []
            x = S
            while True:
                if x == T:
                    bott = min(cap[a] for a in path)
                    for a in path:
                        cap[a] -= bott
                        cap[a ^ 1] += bott
                    flow += bott
                    depth = 0
                    while depth < len(path) and cap[path[depth]] > 0:
                        depth += 1
                    del path[depth:]
                    x = S if depth == 0 else head[path[-1]]
                    continue
                arcs = adj[x]
                while it[x] < len(arcs):
                    a = arcs[it[x]]
                    y = head[a]
                    if cap[a] > 0 and level[y] == level[x] + 1 and cost[a] + pi[x] - pi[y] == 0:
                        break
                    it[x] += 1
                else:
                    level[x] = -1
                    if x == S:
                        break
                    a = path.pop()
                    x = tail[a]
                    it[x] += 1
                    continue
                path.append(a)
                x = y

    P = max(pi[:n])
    dist = [P - pi[i] for i in range(n)]
    heap = [(dist[i], i) for i in range(n)]
    heapq.heapify(heap)
    while heap:
        dv, x = heapq.heappop(heap)
        if dv > dist[x]:
            continue
        for a in adj[x]:
            if a >= 2 * m or cap[a] <= 0:
                continue
            y = head[a]
            nd = dv + cost[a] + pi[x] - pi[y]
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    ranks = np.array([1 - (dist[i] - P + pi[i]) for i in range(n)], dtype=np.int64)
    saturated = sum(1 for e in range(m) if cap[2 * e] > 0)
    return ranks, saturated


def greedy_fas_order(n, out_ptr, out_idx, in_ptr, in_idx):
    """Eades-Lin-Smyth arrangement with lowest-id tie-breaking."""
    n = int(n)
    out_ptr, out_idx = out_ptr.tolist(), out_idx.tolist()
    in_ptr, in_idx = in_ptr.tolist(), in_idx.tolist()
    outd = [out_ptr[i + 1] - out_ptr[i] for i in range(n)]
    ind = [in_ptr[i + 1] - in_ptr[i] for i in range(n)]
    alive = [True] * n
    sinks = [i for i in range(n) if outd[i] == 0]
    sources = [i for i in range(n) if ind[i] == 0]
    # max-heap on (delta, -id) via negation
    delta = [(-(outd[i] - ind[i]), i) for i in range(n)]
    heapq.heapify(sinks)
    heapq.heapify(sources)
    heapq.heapify(delta)
    s1: list[int] = []
    s2: list[int] = []

    for _ in range(n):
        u = -1
        while sinks:
            i = heapq.heappop(sinks)
            if alive[i]:
                u = i
                break
        if u >= 0:
            s2.append(u)
        else:
            while sources:
                i = heapq.heappop(sources)
                if alive[i]:
                    u = i
                    break
            if u < 0:
                while True:
                    negd, i = heapq.heappop(delta)
                    if alive[i] and -negd == outd[i] - ind[i]:
                        u = i
                        break
            s1.append(u)
        alive[u] = False
        for k in range(out_ptr[u], out_ptr[u + 1]):
            w = out_idx[k]
            if alive[w]:
                ind[w] -= 1
                if ind[w] == 0:
                    heapq.heappush(sources, w)
                heapq.heappush(delta, (-(outd[w] - ind[w]), w))
        for k in range(in_ptr[u], in_ptr[u + 1]):
            w = in_idx[k]
            if alive[w]:
                outd[w] -= 1
                if outd[w] == 0:
                    heapq.heappush(sinks, w)
                heapq.heappush(delta, (-(outd[w] - ind[w]), w))

    return np.array(s1 + s2[::-1], dtype=np.int64)
