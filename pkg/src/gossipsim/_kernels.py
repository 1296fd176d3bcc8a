"""Numba kernels for the event-driven simulators and the cut brute force.

The kernels use an internal splitmix64 stream seeded from the caller so a
run is fully determined by (inputs, seed) and the GIL is released, which
lets the sweep harness fan replicas out over threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.1102230246251565e-16  # 2**-53


@njit(cache=True, nogil=True, inline="always")
def _next_uniform(state):
    """splitmix64 step; uniform double in [0, 1)."""
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _INV53


@njit(cache=True, nogil=True, inline="always")
def _next_exponential(state):
    return -np.log(1.0 - _next_uniform(state))


# ---------------------------------------------------------------------------
# Birth-death chain on {0, 1/N, ..., 1}
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def bd_simulate(lam_plus, lam_minus, k0, T, seed, grid, stride, max_event_samples):
    """Exact event simulation of a birth-death chain given lattice rate tables.

    Returns (times, values, n_samples, absorbed_at, event_count); absorbed_at
    is -1.0 when the chain is still alive at T.
    """
    N = lam_plus.shape[0] - 1
    n_grid = grid.shape[0]
    cap = n_grid + max_event_samples + 4
    ts = np.empty(cap, np.float64)
    zs = np.empty(cap, np.float64)
    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)

    k = k0
    t = 0.0
    n = 0
    gi = 0
    events = 0
    absorbed = -1.0

    ts[0] = 0.0
    zs[0] = k / N
    n = 1
    while gi < n_grid and grid[gi] <= 0.0:
        gi += 1

    while True:
        lp = lam_plus[k]
        lm = lam_minus[k]
        tot = lp + lm
        if tot <= 0.0:
            if k == 0:
                absorbed = t
            break
        dt = _next_exponential(state) / tot
        tnew = t + dt
        while gi < n_grid and grid[gi] < tnew:
            if grid[gi] > ts[n - 1] and grid[gi] <= T:
                ts[n] = grid[gi]
                zs[n] = k / N
                n += 1
            gi += 1
        if tnew > T:
            t = T
            break
        t = tnew
        if _next_uniform(state) * tot < lp:
            k += 1
        else:
            k -= 1
        events += 1
        if events % stride == 0 and n < cap - 2 - (n_grid - gi):
            if t > ts[n - 1]:
                ts[n] = t
                zs[n] = k / N
                n += 1

    # tail: remaining grid points at the final value, plus the endpoint
    zfinal = k / N
    tend = absorbed if absorbed >= 0.0 else T
    if absorbed >= 0.0 and tend > ts[n - 1]:
        ts[n] = tend
        zs[n] = zfinal
        n += 1
    while gi < n_grid:
        if grid[gi] > ts[n - 1] and grid[gi] <= T:
            ts[n] = grid[gi]
            zs[n] = zfinal
            n += 1
        gi += 1
    if absorbed < 0.0 and T > ts[n - 1]:
        ts[n] = T
        zs[n] = zfinal
        n += 1
    return ts, zs, n, absorbed, events


@njit(cache=True, nogil=True)
def bd_hit_mc(lam_plus, lam_minus, k0, M, n_reps, seed):
    """Count replicas whose embedded chain reaches M before 0 from k0."""
    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)
    hits = 0
    for _ in range(n_reps):
        k = k0
        while 0 < k < M:
            lp = lam_plus[k]
            lm = lam_minus[k]
            if _next_uniform(state) * (lp + lm) < lp:
                k += 1
            else:
                k -= 1
        if k == M:
            hits += 1
    return hits


# ---------------------------------------------------------------------------
# Full jump process on a complete graph (implicit adjacency, O(1) per event)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def complete_simulate(states, arc_count, beta_over_dbar, phi_table, T, seed,
                      grid, stride, max_event_samples):
    """Exact simulation on the complete graph.

    Active arcs number exactly k(N-k) (self-loops are never active), so the
    aggregate rates need no adjacency scan; birth picks a uniform zero node,
    death a uniform one node, both O(1) via a permutation indexed by state.
    """
    N = states.shape[0]
    n_grid = grid.shape[0]
    cap = n_grid + max_event_samples + 4
    ts = np.empty(cap, np.float64)
    zs = np.empty(cap, np.float64)
    xs = np.empty(cap, np.float64)
    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)

    perm = np.empty(N, np.int64)  # first k entries: ones
    pos = np.empty(N, np.int64)
    k = 0
    for v in range(N):
        if states[v] == 1:
            perm[k] = v
            pos[v] = k
            k += 1
    j = k
    for v in range(N):
        if states[v] == 0:
            perm[j] = v
            pos[v] = j
            j += 1

    t = 0.0
    n = 0
    gi = 0
    events = 0
    absorbed = -1.0
    ts[0] = 0.0
    zs[0] = k / N
    xs[0] = (k * (N - k)) / arc_count
    n = 1
    while gi < n_grid and grid[gi] <= 0.0:
        gi += 1

    while True:
        active = k * (N - k)
        lp = beta_over_dbar * phi_table[k] * active
        lm = float(k)
        tot = lp + lm
        if tot <= 0.0:
            if k == 0:
                absorbed = t
            break
        dt = _next_exponential(state) / tot
        tnew = t + dt
        while gi < n_grid and grid[gi] < tnew:
            if grid[gi] > ts[n - 1] and grid[gi] <= T:
                ts[n] = grid[gi]
                zs[n] = k / N
                xs[n] = (k * (N - k)) / arc_count
                n += 1
            gi += 1
        if tnew > T:
            t = T
            break
        t = tnew
        if _next_uniform(state) * tot < lp:
            # birth: uniform among the N-k zero nodes
            j = k + int(_next_uniform(state) * (N - k))
            v = perm[j]
            w = perm[k]
            perm[k] = v
            perm[j] = w
            pos[v] = k
            pos[w] = j
            states[v] = 1
            k += 1
        else:
            # death: uniform among the k one nodes
            j = int(_next_uniform(state) * k)
            v = perm[j]
            w = perm[k - 1]
            perm[k - 1] = v
            perm[j] = w
            pos[v] = k - 1
            pos[w] = j
            states[v] = 0
            k -= 1
        events += 1
        if events % stride == 0 and n < cap - 2 - (n_grid - gi):
            if t > ts[n - 1]:
                ts[n] = t
                zs[n] = k / N
                xs[n] = (k * (N - k)) / arc_count
                n += 1

    zfinal = k / N
    xfinal = (k * (N - k)) / arc_count
    tend = absorbed if absorbed >= 0.0 else T
    if absorbed >= 0.0 and tend > ts[n - 1]:
        ts[n] = tend
        zs[n] = zfinal
        xs[n] = xfinal
        n += 1
    while gi < n_grid:
        if grid[gi] > ts[n - 1] and grid[gi] <= T:
            ts[n] = grid[gi]
            zs[n] = zfinal
            xs[n] = xfinal
            n += 1
        gi += 1
    if absorbed < 0.0 and T > ts[n - 1]:
        ts[n] = T
        zs[n] = zfinal
        xs[n] = xfinal
        n += 1
    return ts, zs, xs, n, absorbed, events


# ---------------------------------------------------------------------------
# Full jump process on an explicit graph (CSR + Fenwick tree)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, inline="always")
def _fenwick_add(tree, i, delta):
    i += 1
    while i < tree.shape[0]:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True, nogil=True)
def _fenwick_find(tree, m, log2n):
    """Smallest index i with prefix_sum(i) > m (m in [0, total))."""
    idx = 0
    rem = m
    bit = 1 << log2n
    while bit > 0:
        nxt = idx + bit
        if nxt < tree.shape[0] and tree[nxt] <= rem:
            idx = nxt
            rem -= tree[nxt]
        bit >>= 1
    return idx  # 0-based node index


@njit(cache=True, nogil=True)
def _brute_active(indptr, indices, states):
    cnt = 0
    for v in range(states.shape[0]):
        if states[v] == 0:
            for e in range(indptr[v], indptr[v + 1]):
                if states[indices[e]] == 1:
                    cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def graph_simulate(indptr, indices, rindptr, rindices, states, beta_over_dbar,
                   phi_table, arc_count, T, seed, grid, stride,
                   max_event_samples, debug_every):
    """Exact simulation of the jump process on an explicit directed graph.

    indices[indptr[v]:indptr[v+1]] lists the influencers of v; rindices is
    the reverse adjacency (nodes influenced by v). Active in-arc counts a[v]
    are maintained incrementally and a Fenwick tree over a[v]*(1-X_v) lets
    birth events pick a uniformly random active arc in O(log N).

    debug_every > 0 cross-checks the incremental active-arc count against a
    brute-force rescan every debug_every events; a mismatch returns status 1.
    """
    N = states.shape[0]
    n_grid = grid.shape[0]
    cap = n_grid + max_event_samples + 4
    ts = np.empty(cap, np.float64)
    zs = np.empty(cap, np.float64)
    xs = np.empty(cap, np.float64)
    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)
    status = 0

    # a[v] = number of influencers of v currently in state 1
    a = np.zeros(N, np.int64)
    for v in range(N):
        cnt = 0
        for e in range(indptr[v], indptr[v + 1]):
            if states[indices[e]] == 1:
                cnt += 1
        a[v] = cnt

    log2n = 0
    while (1 << (log2n + 1)) <= N:
        log2n += 1
    tree = np.zeros(N + 1, np.int64)
    total_active = 0
    for v in range(N):
        if states[v] == 0 and a[v] > 0:
            _fenwick_add(tree, v, a[v])
            total_active += a[v]

    perm = np.empty(N, np.int64)
    pos = np.empty(N, np.int64)
    k = 0
    for v in range(N):
        if states[v] == 1:
            perm[k] = v
            pos[v] = k
            k += 1
    j = k
    for v in range(N):
        if states[v] == 0:
            perm[j] = v
            pos[v] = j
            j += 1

    t = 0.0
    n = 0
    gi = 0
    events = 0
    absorbed = -1.0
    ts[0] = 0.0
    zs[0] = k / N
    xs[0] = total_active / arc_count
    n = 1
    while gi < n_grid and grid[gi] <= 0.0:
        gi += 1

    while True:
        lp = beta_over_dbar * phi_table[k] * total_active
        lm = float(k)
        tot = lp + lm
        if tot <= 0.0:
            if k == 0:
                absorbed = t
            break
        dt = _next_exponential(state) / tot
        tnew = t + dt
        while gi < n_grid and grid[gi] < tnew:
            if grid[gi] > ts[n - 1] and grid[gi] <= T:
                ts[n] = grid[gi]
                zs[n] = k / N
                xs[n] = total_active / arc_count
                n += 1
            gi += 1
        if tnew > T:
            t = T
            break
        t = tnew
        if _next_uniform(state) * tot < lp:
            m = int(_next_uniform(state) * total_active)
            if m >= total_active:
                m = total_active - 1
            v = _fenwick_find(tree, m, log2n)
            # flip v: 0 -> 1
            _fenwick_add(tree, v, -a[v])
            total_active -= a[v]
            states[v] = 1
            for e in range(rindptr[v], rindptr[v + 1]):
                u = rindices[e]
                a[u] += 1
                if states[u] == 0:
                    _fenwick_add(tree, u, 1)
                    total_active += 1
            j = pos[v]
            w = perm[k]
            perm[k] = v
            perm[j] = w
            pos[v] = k
            pos[w] = j
            k += 1
        else:
            j = int(_next_uniform(state) * k)
            if j >= k:
                j = k - 1
            v = perm[j]
            # flip v: 1 -> 0
            states[v] = 0
            for e in range(rindptr[v], rindptr[v + 1]):
                u = rindices[e]
                a[u] -= 1
                if states[u] == 0:
                    _fenwick_add(tree, u, -1)
                    total_active -= 1
            _fenwick_add(tree, v, a[v])
            total_active += a[v]
            w = perm[k - 1]
            perm[k - 1] = v
            perm[j] = w
            pos[v] = k - 1
            pos[w] = j
            k -= 1
        events += 1
        if debug_every > 0 and events % debug_every == 0:
            if _brute_active(indptr, indices, states) != total_active:
                status = 1
                break
        if events % stride == 0 and n < cap - 2 - (n_grid - gi):
            if t > ts[n - 1]:
                ts[n] = t
                zs[n] = k / N
                xs[n] = total_active / arc_count
                n += 1

    zfinal = k / N
    xfinal = total_active / arc_count
    tend = absorbed if absorbed >= 0.0 else T
    if absorbed >= 0.0 and tend > ts[n - 1]:
        ts[n] = tend
        zs[n] = zfinal
        xs[n] = xfinal
        n += 1
    while gi < n_grid:
        if grid[gi] > ts[n - 1] and grid[gi] <= T:
            ts[n] = grid[gi]
            zs[n] = zfinal
            xs[n] = xfinal
            n += 1
        gi += 1
    if absorbed < 0.0 and T > ts[n - 1]:
        ts[n] = T
        zs[n] = zfinal
        xs[n] = xfinal
        n += 1
    return ts, zs, xs, n, absorbed, events, status


# ---------------------------------------------------------------------------
# Bottleneck-ratio brute force (bitmask subsets, N <= 20)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def cut_scan(adj_masks):
    """Minimize |arcs U -> V\\U| / min(|U|, |V\\U|) over proper subsets.

    adj_masks[v] is the bitmask of the out-neighborhood of v. Returns
    (numerator, denominator, subset_mask) of the exact minimizer; ties keep
    the first subset found.
    """
    N = adj_masks.shape[0]
    pc = np.zeros(1 << 16, np.uint8)
    for i in range(1, 1 << 16):
        pc[i] = pc[i >> 1] + (i & 1)
    full = np.int64((1 << N) - 1)
    best_num = np.int64(-1)
    best_den = np.int64(1)
    best_mask = np.int64(0)
    for mask in range(1, int(full)):
        comp = full & ~np.int64(mask)
        cut = np.int64(0)
        size = np.int64(0)
        for v in range(N):
            if (mask >> v) & 1:
                out = adj_masks[v] & comp
                cut += pc[out & np.int64(0xFFFF)] + pc[(out >> 16) & np.int64(0xFFFF)]
                size += 1
        den = size if size <= N - size else N - size
        if best_num < 0 or cut * best_den < best_num * den:
            best_num = cut
            best_den = den
            best_mask = np.int64(mask)
    return best_num, best_den, best_mask
