"""Directed interaction graphs: construction, generators, metrics, file IO.

The convention throughout: an arc (v, w) means w influences v, so the
stored out-neighborhood of v is the set of its influencers. Undirected
random families (ER, configuration model, Barabasi-Albert, torus) are
realized as symmetric digraphs, one arc per direction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ._kernels import cut_scan
from ._rng import derive_generator

__all__ = [
    "Graph", "GraphMetrics", "GraphError", "ArcRangeError", "DuplicateArcError",
    "NotStronglyConnectedError", "ConnectivityError", "CheegerCapError",
    "SizeCapError", "build_from_arcs", "gen_complete", "gen_er",
    "gen_config_model", "gen_ba", "gen_torus", "spectral_radius",
    "cheeger_exact", "cheeger_heuristic", "compute_metrics", "write_edge_list",
    "read_edge_list", "graph_from_family",
]

# complete graphs above this size keep their adjacency implicit
_COMPLETE_MATERIALIZE_CAP = 2048
_CHEEGER_CAP = 20
_TORUS_NODE_CAP = 1 << 20
_CONNECTIVITY_ATTEMPTS = 100


class GraphError(Exception):
    pass


class ArcRangeError(GraphError):
    pass


class DuplicateArcError(GraphError):
    pass


class NotStronglyConnectedError(GraphError):
    """Raised when a dynamics-bound graph fails the connectivity requirement."""


class ConnectivityError(GraphError):
    """Random generation could not produce a connected graph within the attempt cap."""


class CheegerCapError(GraphError):
    pass


class SizeCapError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable digraph in compressed adjacency (CSR) form.

    ``indptr``/``indices`` hold sorted out-neighborhoods; ``rindptr``/
    ``rindices`` the reverse adjacency. Complete graphs beyond the
    materialization cap carry ``indices=None`` and answer queries
    analytically.
    """

    node_count: int
    indptr: np.ndarray | None
    indices: np.ndarray | None
    rindptr: np.ndarray | None = field(repr=False, default=None)
    rindices: np.ndarray | None = field(repr=False, default=None)
    arc_count: int = 0
    max_degree: int = 0
    has_self_loops: bool = False
    strongly_connected: bool = False
    is_complete: bool = False

    @property
    def avg_degree(self) -> float:
        return self.arc_count / self.node_count

    @property
    def avg_degree_exact(self) -> Fraction:
        return Fraction(self.arc_count, self.node_count)

    @property
    def materialized(self) -> bool:
        return self.indices is not None

    def out_neighbors(self, v: int) -> np.ndarray:
        if self.materialized:
            return self.indices[self.indptr[v]:self.indptr[v + 1]]
        nbrs = np.arange(self.node_count, dtype=np.int64)
        if not self.has_self_loops:
            nbrs = nbrs[nbrs != v]
        return nbrs

    def to_sparse(self) -> sp.csr_matrix:
        """Adjacency A with A[v, w] = 1 iff w influences v."""
        if not self.materialized:
            raise SizeCapError("adjacency not materialized for this complete graph")
        data = np.ones(self.arc_count, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr),
                             shape=(self.node_count, self.node_count))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def require_strongly_connected(self) -> None:
        if not self.strongly_connected:
            raise NotStronglyConnectedError(
                f"graph with N={self.node_count} is not strongly connected")


@dataclass(frozen=True)
class GraphMetrics:
    spectral_radius: float
    spectral_radius_residual: float
    spectral_radius_converged: bool
    cheeger: Fraction | None = None
    cheeger_subset: frozenset[int] | None = None
    family_analytic_params: tuple[float, float, float] | None = None


def _csr_from_pairs(n: int, tails: np.ndarray, heads: np.ndarray):
    order = np.lexsort((heads, tails))
    tails = tails[order]
    heads = heads[order]
    counts = np.bincount(tails, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, heads.astype(np.int64)


def build_from_arcs(n: int, arcs, *, for_dynamics: bool = False) -> Graph:
    """Assemble a Graph from ordered (tail, head) pairs.

    Raises ArcRangeError / DuplicateArcError on malformed input; with
    ``for_dynamics=True`` additionally rejects graphs that are not strongly
    connected.
    """
    if n < 1:
        raise GraphError(f"node count must be >= 1, got {n}")
    arcs = np.asarray(list(arcs) if not isinstance(arcs, np.ndarray) else arcs,
                      dtype=np.int64)
    if arcs.size == 0:
        arcs = arcs.reshape(0, 2)
    if arcs.ndim != 2 or arcs.shape[1] != 2:
        raise GraphError("arcs must be pairs")
    tails, heads = arcs[:, 0], arcs[:, 1]
    if arcs.size and (tails.min() < 0 or tails.max() >= n
                      or heads.min() < 0 or heads.max() >= n):
        bad = arcs[(tails < 0) | (tails >= n) | (heads < 0) | (heads >= n)][0]
        raise ArcRangeError(f"arc {tuple(bad)} out of range for N={n}")
    keys = tails * n + heads
    uniq, cnt = np.unique(keys, return_counts=True)
    if (cnt > 1).any():
        dup = uniq[cnt > 1][0]
        raise DuplicateArcError(f"duplicate arc {(int(dup // n), int(dup % n))}")
    indptr, indices = _csr_from_pairs(n, tails, heads)
    rindptr, rindices = _csr_from_pairs(n, heads, tails)
    degrees = np.diff(indptr)
    has_loops = bool((tails == heads).any())
    if n == 1:
        strong = True
    else:
        adj = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
        ncomp, _ = connected_components(adj, directed=True, connection="strong")
        strong = ncomp == 1
    g = Graph(node_count=n, indptr=indptr, indices=indices,
              rindptr=rindptr, rindices=rindices,
              arc_count=int(arcs.shape[0]),
              max_degree=int(degrees.max()) if n else 0,
              has_self_loops=has_loops, strongly_connected=strong,
              is_complete=_is_complete(n, arcs.shape[0], has_loops, degrees))
    if for_dynamics:
        g.require_strongly_connected()
    return g


def _is_complete(n, m, has_loops, degrees) -> bool:
    if has_loops:
        return m == n * n
    return m == n * (n - 1) and (degrees == n - 1).all()


def _symmetric_graph_from_edges(n: int, edges: np.ndarray) -> Graph:
    """Edges are undirected pairs (u, v), u != v, no duplicates."""
    if edges.size == 0:
        tails = heads = np.empty(0, dtype=np.int64)
    else:
        tails = np.concatenate([edges[:, 0], edges[:, 1]])
        heads = np.concatenate([edges[:, 1], edges[:, 0]])
    return build_from_arcs(n, np.column_stack([tails, heads]))


def gen_complete(n: int, with_self_loops: bool) -> Graph:
    """Complete digraph; adjacency stays implicit above the size cap."""
    if n < 1:
        raise GraphError(f"N must be >= 1, got {n}")
    if n <= _COMPLETE_MATERIALIZE_CAP:
        tails = np.repeat(np.arange(n), n)
        heads = np.tile(np.arange(n), n)
        if not with_self_loops:
            keep = tails != heads
            tails, heads = tails[keep], heads[keep]
        return build_from_arcs(n, np.column_stack([tails, heads]))
    m = n * n if with_self_loops else n * (n - 1)
    return Graph(node_count=n, indptr=None, indices=None,
                 arc_count=m, max_degree=n if with_self_loops else n - 1,
                 has_self_loops=with_self_loops, strongly_connected=True,
                 is_complete=True)


def _er_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    rows = []
    chunk = max(1, min(n, 4_000_000 // max(n, 1)))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        u = rng.random((stop - start, n))
        for i in range(start, stop):
            js = np.nonzero(u[i - start, i + 1:] < p)[0] + i + 1
            if js.size:
                rows.append(np.column_stack([np.full(js.size, i), js]))
    if not rows:
        return np.empty((0, 2), dtype=np.int64)
    return np.concatenate(rows).astype(np.int64)


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p), symmetrized; retries until connected."""
    if not (0 < p <= 1):
        raise GraphError(f"p must be in (0, 1], got {p}")
    if n < 2:
        raise GraphError(f"N must be >= 2, got {n}")
    for attempt in range(_CONNECTIVITY_ATTEMPTS):
        rng = derive_generator(seed, 0xE5, attempt)
        g = _symmetric_graph_from_edges(n, _er_edges(n, p, rng))
        if g.strongly_connected:
            return g
    raise ConnectivityError(
        f"ER(N={n}, p={p}) not connected after {_CONNECTIVITY_ATTEMPTS} attempts; p too small")


def _stub_match_simple(degrees: np.ndarray, rng: np.random.Generator) -> np.ndarray | None:
    """Pair stubs uniformly, then repair self-loops/multi-edges by degree-
    preserving swaps. Returns undirected edge array or None on failure."""
    stubs = np.repeat(np.arange(degrees.size), degrees)
    rng.shuffle(stubs)
    pairs = [(int(a), int(b)) for a, b in zip(stubs[0::2], stubs[1::2])]
    m = len(pairs)
    key = lambda a, b: (a, b) if a <= b else (b, a)
    cnt = Counter(key(a, b) for a, b in pairs)

    def bad(i):
        a, b = pairs[i]
        return a == b or cnt[key(a, b)] > 1

    queue = [i for i in range(m) if bad(i)]
    budget = 200 * m + 1000
    while queue and budget > 0:
        i = queue[-1]
        if not bad(i):
            queue.pop()
            continue
        budget -= 1
        j = int(rng.integers(m))
        if j == i:
            continue
        a, b = pairs[i]
        c, d = pairs[j]
        if rng.integers(2):
            c, d = d, c
        # propose (a,c), (b,d)
        if a == c or b == d:
            continue
        k1, k2 = key(a, c), key(b, d)
        if k1 == k2 or cnt[k1] > 0 or cnt[k2] > 0:
            continue
        cnt[key(a, b)] -= 1
        cnt[key(c, d)] -= 1
        cnt[k1] += 1
        cnt[k2] += 1
        pairs[i] = (a, c)
        pairs[j] = (b, d)
        queue.pop()
    if any(bad(i) for i in range(m)):
        return None
    return np.array(pairs, dtype=np.int64)


def gen_config_model(n: int, degree_distribution: dict[int, float], seed: int) -> Graph:
    """Configuration model with iid degrees from the given distribution.

    Degrees must be supported on [3, d_max]; an odd stub total is fixed by
    bumping one uniformly chosen node's degree by one. Stub matching is
    repaired by degree-preserving edge swaps, so realized degrees match the
    sampled sequence exactly.
    """
    supp = sorted(degree_distribution)
    probs = np.array([degree_distribution[d] for d in supp], dtype=np.float64)
    if not supp or supp[0] < 3:
        raise GraphError("degree support must lie in [3, d_max]")
    if abs(probs.sum() - 1.0) > 1e-9 or (probs < 0).any():
        raise GraphError("degree probabilities must be nonnegative and sum to 1")
    if max(supp) >= n:
        raise GraphError("d_max must be < N")
    for attempt in range(_CONNECTIVITY_ATTEMPTS):
        rng = derive_generator(seed, 0xCF, attempt)
        degrees = rng.choice(np.array(supp, dtype=np.int64), size=n, p=probs)
        if degrees.sum() % 2 == 1:
            degrees[rng.integers(n)] += 1
        edges = _stub_match_simple(degrees, rng)
        if edges is None:
            continue
        g = _symmetric_graph_from_edges(n, edges)
        if g.strongly_connected:
            return g
    raise ConnectivityError(
        f"configuration model (N={n}) failed within {_CONNECTIVITY_ATTEMPTS} attempts")


def gen_ba(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert preferential attachment, seeded with K_{m+1}.

    Each new node attaches to m distinct existing nodes chosen with
    probability proportional to degree (sampling without replacement
    within the batch).
    """
    if m < 1:
        raise GraphError(f"m must be >= 1, got {m}")
    if n < m + 2:
        raise GraphError(f"N must be >= m + 2 = {m + 2}, got {n}")
    rng = derive_generator(seed, 0xBA)
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    rep = []  # degree-proportional endpoint pool
    for a, b in edges:
        rep.append(a)
        rep.append(b)
    for v in range(m + 1, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            t = rep[int(rng.integers(len(rep)))]
            if t != v:
                chosen.add(t)
        for t in sorted(chosen):
            edges.append((v, t))
            rep.append(v)
            rep.append(t)
    return _symmetric_graph_from_edges(n, np.array(edges, dtype=np.int64))


def gen_torus(k: int, n: int) -> Graph:
    """k-dimensional torus with side n: N = n^k nodes, 2k-regular for n >= 3.

    Node indexing is lexicographic over coordinates (c_0, ..., c_{k-1}),
    index = sum c_j * n^(k-1-j).
    """
    if n < 3:
        raise GraphError(f"side length must be >= 3, got {n}")
    if k < 1:
        raise GraphError(f"dimension must be >= 1, got {k}")
    total = n ** k
    if total > _TORUS_NODE_CAP:
        raise SizeCapError(f"torus size {total} exceeds cap {_TORUS_NODE_CAP}")
    strides = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    idx = np.arange(total, dtype=np.int64)
    arcs = []
    for j in range(k):
        c = (idx // strides[j]) % n
        for delta in (1, n - 1):
            nbr = idx + ((c + delta) % n - c) * strides[j]
            arcs.append(np.column_stack([idx, nbr]))
    return build_from_arcs(total, np.concatenate(arcs))


def spectral_radius(g: Graph, tolerance: float = 1e-10, max_iterations: int = 100_000):
    """Perron root by power iteration on A + I (primitive for strongly
    connected graphs, so the iteration cannot oscillate on bipartite-like
    spectra). Deterministic all-ones start.

    Returns (rho, residual, converged); residual is ||A v - rho v||_2 for
    the final unit iterate.
    """
    g.require_strongly_connected()
    if not g.materialized:
        # complete graph: all-ones (+/- identity) matrix, Perron root known
        rho = float(g.node_count if g.has_self_loops else g.node_count - 1)
        return rho, 0.0, True
    a = g.to_sparse()
    v = np.ones(g.node_count) / np.sqrt(g.node_count)
    rho = 0.0
    residual = np.inf
    for _ in range(max_iterations):
        av = a @ v
        w = av + v  # (A + I) v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            break
        w /= nrm
        aw = a @ w
        rho = float(w @ aw)
        residual = float(np.linalg.norm(aw - rho * w))
        v = w
        if residual <= tolerance:
            return rho, residual, True
    return rho, residual, False


def cheeger_exact(g: Graph):
    """Exact bottleneck ratio by brute force over all proper subsets.

    Returns (Fraction, minimizing subset). Only for N <= 20.
    """
    n = g.node_count
    if n > _CHEEGER_CAP:
        raise CheegerCapError(f"cheeger_exact limited to N <= {_CHEEGER_CAP}, got {n}")
    if n < 2:
        raise GraphError("bottleneck ratio needs at least 2 nodes")
    masks = np.zeros(n, dtype=np.int64)
    for v in range(n):
        for w in g.out_neighbors(v):
            masks[v] |= np.int64(1) << np.int64(w)
    num, den, mask = cut_scan(masks)
    subset = frozenset(v for v in range(n) if (int(mask) >> v) & 1)
    return Fraction(int(num), int(den)), subset


def cheeger_heuristic(g: Graph) -> Fraction:
    """Upper-bound estimate of the bottleneck ratio for graphs too large for
    cheeger_exact: best cut among singletons, Fiedler-vector sweep prefixes,
    and single-node local search from each sweep candidate.

    The true ratio can only be smaller, so values derived from this estimate
    are not rigorous bounds; callers must treat them as empirical.
    """
    n = g.node_count
    if n < 2:
        raise GraphError("bottleneck ratio needs at least 2 nodes")
    A = g.to_dense().astype(float)
    np.fill_diagonal(A, 0.0)
    deg = A.sum(axis=1)
    lap = np.diag(deg) - A
    eigvals, eigvecs = np.linalg.eigh(lap)
    fiedler = eigvecs[:, 1]
    Ai = A.astype(np.int64)

    def ratio(members: np.ndarray) -> Fraction:
        size = int(members.sum())
        cut = int(Ai[members][:, ~members].sum())
        return Fraction(cut, min(size, n - size))

    best = min(ratio(np.arange(n) == v) for v in range(n))
    order = np.argsort(fiedler)
    for k in range(1, n):
        members = np.zeros(n, dtype=bool)
        members[order[:k]] = True
        cand = ratio(members)
        # local search: move single vertices across the cut while it improves
        improved = True
        while improved:
            improved = False
            for v in range(n):
                members[v] = not members[v]
                if 0 < members.sum() < n:
                    r = ratio(members)
                    if r < cand:
                        cand = r
                        improved = True
                        continue
                members[v] = not members[v]
        best = min(best, cand)
    return best


def compute_metrics(g: Graph, *, cheeger_cap: int = _CHEEGER_CAP,
                    tolerance: float = 1e-10,
                    family_analytic_params: tuple[float, float, float] | None = None,
                    ) -> GraphMetrics:
    rho, residual, converged = spectral_radius(g, tolerance=tolerance)
    cheeger = None
    subset = None
    if g.node_count <= cheeger_cap:
        cheeger, subset = cheeger_exact(g)
    return GraphMetrics(spectral_radius=rho, spectral_radius_residual=residual,
                        spectral_radius_converged=converged, cheeger=cheeger,
                        cheeger_subset=subset,
                        family_analytic_params=family_analytic_params)


def write_edge_list(g: Graph, path) -> None:
    """Plain-text format: first line "N M self_loops", then M sorted "u v" lines."""
    if not g.materialized:
        raise SizeCapError("cannot serialize an implicit complete graph")
    with open(path, "w") as fh:
        fh.write(f"{g.node_count} {g.arc_count} {1 if g.has_self_loops else 0}\n")
        for v in range(g.node_count):
            for w in g.out_neighbors(v):
                fh.write(f"{v} {w}\n")


def read_edge_list(path) -> Graph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise GraphError(f"malformed edge-list header in {path}")
        n, m, loops = (int(x) for x in header)
        arcs = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    if arcs.shape[0] != m:
        raise GraphError(f"expected {m} arcs, found {arcs.shape[0]}")
    g = build_from_arcs(n, arcs)
    if g.has_self_loops != bool(loops):
        raise GraphError("self-loop flag in header contradicts the arc list")
    return g


def graph_from_family(family: str, params: dict, seed: int = 0) -> Graph:
    """Dispatch used by the sweep harness, the service and the CLI."""
    family = family.lower()
    if family == "complete":
        return gen_complete(int(params["n"]), bool(params.get("self_loops", True)))
    if family == "er":
        return gen_er(int(params["n"]), float(params["p"]), seed)
    if family == "config":
        dist = params["degree_distribution"]
        dist = {int(d): float(q) for d, q in dist.items()}
        return gen_config_model(int(params["n"]), dist, seed)
    if family == "ba":
        return gen_ba(int(params["n"]), int(params["m"]), seed)
    if family == "torus":
        return gen_torus(int(params["k"]), int(params["side"]))
    if family == "file":
        return read_edge_list(params["path"])
    raise GraphError(f"unknown graph family: {family}")
