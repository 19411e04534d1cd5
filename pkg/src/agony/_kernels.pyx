# distutils: language = c++
"""Compiled kernels: exact d=1 agony via min-cost flow, greedy FAS ordering.

Both functions mirror :mod:`agony._fallback` line for line in behaviour;
outputs are identical for identical inputs.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, int8_t
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from libcpp.vector cimport vector

cnp.import_array()

ctypedef pair[int64_t, int32_t] item

cdef int64_t INF = 1 << 60


def agony_d1(int32_t n, const int32_t[::1] src, const int32_t[::1] dst):
    """Minimum d=1 agony ranking.

    Returns ``(ranks, agony)`` where ``ranks`` is the componentwise-smallest
    optimal ranking (ranks start at 1, no empty class).
    """
    cdef int64_t m = src.shape[0]
    cdef int32_t S = n, T = n + 1, nn = n + 2
    cdef int64_t e, a, i, total = 0, flow = 0
    cdef int32_t u, v, x, y
    if n == 0:
        return np.empty(0, dtype=np.int64), 0

    excess_np = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] excess = excess_np
    for e in range(m):
        excess[dst[e]] += 1
        excess[src[e]] -= 1
    cdef int64_t nterm = 0
    for i in range(n):
        if excess[i] != 0:
            nterm += 1
    cdef int64_t M = 2 * m + 2 * nterm

    # arcs come in pairs (a, a ^ 1)
    head_np = np.empty(M, dtype=np.int32)
    tail_np = np.empty(M, dtype=np.int32)
    cap_np = np.zeros(M, dtype=np.int64)
    cost_np = np.zeros(M, dtype=np.int8)
    cdef int32_t[::1] head = head_np
    cdef int32_t[::1] tail = tail_np
    cdef int64_t[::1] cap = cap_np
    cdef int8_t[::1] cost = cost_np

    for e in range(m):
        u = src[e]; v = dst[e]
        # edge starts saturated; arc 2e un-saturates it at cost +1
        tail[2 * e] = v; head[2 * e] = u; cap[2 * e] = 1; cost[2 * e] = 1
        tail[2 * e + 1] = u; head[2 * e + 1] = v; cap[2 * e + 1] = 0; cost[2 * e + 1] = -1
    a = 2 * m
    for i in range(n):
        if excess[i] > 0:
            tail[a] = S; head[a] = <int32_t>i; cap[a] = excess[i]
            tail[a + 1] = <int32_t>i; head[a + 1] = S
            total += excess[i]
            a += 2
        elif excess[i] < 0:
            tail[a] = <int32_t>i; head[a] = T; cap[a] = -excess[i]
            tail[a + 1] = T; head[a + 1] = <int32_t>i
            a += 2

    # CSR of arcs by tail
    first_np = np.zeros(nn + 1, dtype=np.int64)
    cdef int64_t[::1] first = first_np
    for a in range(M):
        first[tail[a] + 1] += 1
    for i in range(nn):
        first[i + 1] += first[i]
    adj_np = np.empty(M, dtype=np.int64)
    cdef int64_t[::1] adj = adj_np
    fill_np = first_np[:nn].copy()
    cdef int64_t[::1] fill = fill_np
    for a in range(M):
        adj[fill[tail[a]]] = a
        fill[tail[a]] += 1

    pi_np = np.zeros(nn, dtype=np.int64)
    dist_np = np.empty(nn, dtype=np.int64)
    level_np = np.empty(nn, dtype=np.int32)
    it_np = np.empty(nn, dtype=np.int64)
    cdef int64_t[::1] pi = pi_np
    cdef int64_t[::1] dist = dist_np
    cdef int32_t[::1] level = level_np
    cdef int64_t[::1] it = it_np
    cdef int64_t dT, dv, rc, k, bott, pushed
    cdef priority_queue[item] heap
    cdef item top
    cdef vector[int32_t] queue
    cdef vector[int64_t] path
    cdef int64_t qh, depth

    while flow < total:
        # Dijkstra on reduced costs, stopping once T is settled
        for i in range(nn):
            dist[i] = INF
        dist[S] = 0
        heap.push(item(0, S))
        dT = INF
        while not heap.empty():
            top = heap.top(); heap.pop()
            dv = -top.first; x = top.second
            if dv > dist[x]:
                continue
            if x == T:
                dT = dv
                break
            for k in range(first[x], first[x + 1]):
                a = adj[k]
                if cap[a] <= 0:
                    continue
                y = head[a]
                rc = cost[a] + pi[x] - pi[y]
                if dv + rc < dist[y]:
                    dist[y] = dv + rc
                    heap.push(item(-(dv + rc), y))
        while not heap.empty():
            heap.pop()
        if dT == INF:
            raise RuntimeError("residual network disconnected before all excess was routed")
        for i in range(nn):
            pi[i] += dist[i] if dist[i] < dT else dT

        # Dinic blocking flows on zero-reduced-cost arcs
        while True:
            for i in range(nn):
                level[i] = -1
            level[S] = 0
            queue.clear()
            queue.push_back(S)
            qh = 0
            while qh < <int64_t>queue.size():
                x = queue[qh]; qh += 1
                for k in range(first[x], first[x + 1]):
                    a = adj[k]
                    if cap[a] <= 0:
                        continue
                    y = head[a]
                    if level[y] < 0 and cost[a] + pi[x] - pi[y] == 0:
                        level[y] = level[x] + 1
                        queue.push_back(y)
            if level[T] < 0:
                break
            for i in range(nn):
                it[i] = first[i]
            path.clear()
            x = S
            while True:
                if x == T:
                    bott = INF
                    for k in range(<int64_t>path.size()):
                        if cap[path[k]] < bott:
                            bott = cap[path[k]]
                    for k in range(<int64_t>path.size()):
                        cap[path[k]] -= bott
                        cap[path[k] ^ 1] += bott
                    flow += bott
                    # retreat to the tail of the first saturated arc
                    depth = 0
                    while depth < <int64_t>path.size() and cap[path[depth]] > 0:
                        depth += 1
                    path.resize(depth)
                    x = S if depth == 0 else head[path[depth - 1]]
                    continue
                pushed = 0
                while it[x] < first[x + 1]:
                    a = adj[it[x]]
                    y = head[a]
                    if cap[a] > 0 and level[y] == level[x] + 1 and cost[a] + pi[x] - pi[y] == 0:
                        path.push_back(a)
                        x = y
                        pushed = 1
                        break
                    it[x] += 1
                if pushed:
                    continue
                # dead end
                level[x] = -1
                if x == S:
                    break
                a = path.back()
                path.pop_back()
                x = tail[a]
                it[x] += 1

    # Componentwise-smallest optimal ranking: shortest paths from a virtual
    # source over residual arcs between graph nodes.
    cdef int64_t P = pi[0]
    for i in range(1, n):
        if pi[i] > P:
            P = pi[i]
    for i in range(n):
        dist[i] = P - pi[i]
        heap.push(item(-dist[i], <int32_t>i))
    while not heap.empty():
        top = heap.top(); heap.pop()
        dv = -top.first; x = top.second
        if dv > dist[x]:
            continue
        for k in range(first[x], first[x + 1]):
            a = adj[k]
            if a >= 2 * m or cap[a] <= 0:
                continue
            y = head[a]
            rc = cost[a] + pi[x] - pi[y]
            if dv + rc < dist[y]:
                dist[y] = dv + rc
                heap.push(item(-(dv + rc), y))

    ranks_np = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] ranks = ranks_np
    for i in range(n):
        # true distance is dist - P + pi <= 0; rank = 1 - distance
        ranks[i] = 1 - (dist[i] - P + pi[i])
    cdef int64_t saturated = 0
    for e in range(m):
        if cap[2 * e] > 0:
            saturated += 1
    return ranks_np, int(saturated)


cdef inline void _remove(int32_t u, int8_t[::1] alive, int64_t[::1] outd, int64_t[::1] ind,
                        const int64_t[::1] out_ptr, const int64_t[::1] out_idx,
                        const int64_t[::1] in_ptr, const int64_t[::1] in_idx,
                        priority_queue[int32_t]& sinks, priority_queue[int32_t]& sources,
                        priority_queue[item]& delta):
    cdef int64_t k
    cdef int32_t w
    alive[u] = 0
    for k in range(out_ptr[u], out_ptr[u + 1]):
        w = <int32_t>out_idx[k]
        if alive[w]:
            ind[w] -= 1
            if ind[w] == 0:
                sources.push(-w)
            delta.push(item(outd[w] - ind[w], -w))
    for k in range(in_ptr[u], in_ptr[u + 1]):
        w = <int32_t>in_idx[k]
        if alive[w]:
            outd[w] -= 1
            if outd[w] == 0:
                sinks.push(-w)
            delta.push(item(outd[w] - ind[w], -w))


def greedy_fas_order(int32_t n,
                     const int64_t[::1] out_ptr, const int64_t[::1] out_idx,
                     const int64_t[::1] in_ptr, const int64_t[::1] in_idx):
    """Eades-Lin-Smyth linear arrangement.

    Each step removes the lowest-id sink (prepended to the tail sequence),
    else the lowest-id source, else the node of largest out-in degree
    (lowest id on ties), both appended to the head sequence.
    """
    outd_np = np.empty(n, dtype=np.int64)
    ind_np = np.empty(n, dtype=np.int64)
    alive_np = np.ones(n, dtype=np.int8)
    cdef int64_t[::1] outd = outd_np
    cdef int64_t[::1] ind = ind_np
    cdef int8_t[::1] alive = alive_np
    cdef int32_t i, u
    cdef int64_t k, left = n
    cdef priority_queue[int32_t] sinks, sources   # store -id for min-heap
    cdef priority_queue[item] delta                # (delta, -id)
    cdef vector[int32_t] s1, s2
    cdef item top

    for i in range(n):
        outd[i] = out_ptr[i + 1] - out_ptr[i]
        ind[i] = in_ptr[i + 1] - in_ptr[i]
        if outd[i] == 0:
            sinks.push(-i)
        if ind[i] == 0:
            sources.push(-i)
        delta.push(item(outd[i] - ind[i], -i))

    while left > 0:
        u = -1
        while not sinks.empty():
            i = -sinks.top(); sinks.pop()
            if alive[i]:
                u = i
                break
        if u >= 0:
            s2.push_back(u)
        else:
            while not sources.empty():
                i = -sources.top(); sources.pop()
                if alive[i]:
                    u = i
                    break
            if u < 0:
                while True:
                    top = delta.top(); delta.pop()
                    i = -top.second
                    if alive[i] and top.first == outd[i] - ind[i]:
                        u = i
                        break
            s1.push_back(u)
        _remove(u, alive, outd, ind, out_ptr, out_idx, in_ptr, in_idx, sinks, sources, delta)
        left -= 1

    order_np = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] order = order_np
    cdef int64_t pos = 0
    for k in range(<int64_t>s1.size()):
        order[pos] = s1[k]; pos += 1
    for k in range(<int64_t>s2.size() - 1, -1, -1):
        order[pos] = s2[k]; pos += 1
    return order_np
