"""Distances, diameters, typical-distance sampling and Core extraction."""

import math
import os
from dataclasses import dataclass

import numpy as np

from .multigraph import MultiGraph
from .pam import PamGraph

UNREACHED = -1


@dataclass
class DistanceReport:
    source: int
    distances: np.ndarray  # float array, inf for unreachable
    eccentricity: int


def _frontier_neighbors(indptr, nbr, frontier):
    """Concatenated neighbor lists of all frontier vertices (vectorized
    CSR gather)."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return nbr[:0]
    # offsets[i] = position where frontier[i]'s neighbors start in output
    out_idx = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
    return nbr[out_idx + np.arange(total, dtype=np.int64)]


def _bfs_levels(graph, sources, level_cap=None):
    """Integer distance array (UNREACHED for unseen) from a source set."""
    dist = np.full(graph.n, UNREACHED, dtype=np.int32)
    frontier = np.asarray(sources, dtype=np.int64)
    dist[frontier] = 0
    level = 0
    indptr, nbr = graph.indptr, graph.nbr
    while frontier.size:
        if level_cap is not None and level >= level_cap:
            break
        level += 1
        cand = _frontier_neighbors(indptr, nbr, frontier)
        cand = cand[dist[cand] == UNREACHED]
        if cand.size == 0:
            break
        dist[cand] = level
        frontier = np.unique(cand)
    return dist


def bfs(graph, source):
    """Exact hop distances from `source`; multi-edges and self-loops act
    as simple adjacency."""
    if not 0 <= source < graph.n:
        raise ValueError(f"source {source} out of range")
    levels = _bfs_levels(graph, [source])
    reached = levels != UNREACHED
    distances = np.where(reached, levels, np.inf).astype(np.float64)
    ecc = int(levels[reached].max())
    return DistanceReport(source=source, distances=distances, eccentricity=ecc)


def _eccentricity(graph, source):
    levels = _bfs_levels(graph, [source])
    return int(levels.max())  # valid when graph restricted to a component


def connected_components(graph):
    """Label array and component sizes."""
    label = np.full(graph.n, -1, dtype=np.int64)
    sizes = []
    for v in range(graph.n):
        if label[v] != -1:
            continue
        levels = _bfs_levels(graph, [v])
        members = levels != UNREACHED
        members &= label == -1
        label[members] = len(sizes)
        sizes.append(int(members.sum()))
    return label, np.array(sizes, dtype=np.int64)


def _induced_subgraph(graph, vertices):
    """Subgraph on `vertices` (bool mask) with an old-id mapping."""
    mask = vertices
    old_ids = np.nonzero(mask)[0]
    new_id = np.full(graph.n, -1, dtype=np.int64)
    new_id[old_ids] = np.arange(old_ids.size)
    edges = graph.edges()
    keep = mask[edges[:, 0]] & mask[edges[:, 1]]
    sub = MultiGraph.from_edge_list(old_ids.size, new_id[edges[keep]])
    return sub, old_ids


@dataclass
class DiameterResult:
    diam: int
    component_fraction: float
    lcc_size: int
    method: str


def _diameter_all_sources(graph):
    best = 0
    for v in range(graph.n):
        best = max(best, _eccentricity(graph, v))
    return best


_ECC_GRAPH = None


def _ecc_chunk(vertices):
    g = _ECC_GRAPH
    return max(_eccentricity(g, int(v)) for v in vertices)


def _diameter_ifub(graph, threads=1):
    """Exact diameter of a connected graph by iterative eccentricity
    bounding: sweeps from high-degree reference vertices give every vertex
    the upper bound ub(v) = min_r d(v, r) + ecc(r); vertices with
    ub(v) > lb are resolved exactly, each resolution tightening the
    bounds, until every eccentricity is certified <= lb."""
    if graph.n == 1:
        return 0
    by_degree = np.argsort(graph.degrees)
    refs = [int(v) for v in by_degree[-16:]]
    root_levels = _bfs_levels(graph, [refs[-1]])
    refs.append(int(np.argmax(root_levels)))  # double-sweep endpoint
    lb = 0
    ub = np.full(graph.n, np.iinfo(np.int32).max, dtype=np.int64)
    for r in dict.fromkeys(refs):
        dist = _bfs_levels(graph, [r])
        ecc = int(dist.max())
        lb = max(lb, ecc)
        np.minimum(ub, dist.astype(np.int64) + ecc, out=ub)
    while True:
        cand = np.nonzero(ub > lb)[0]
        if cand.size == 0:
            return lb
        if threads > 1 and cand.size > 64:
            # bulk-certify a large candidate set in parallel
            global _ECC_GRAPH
            _ECC_GRAPH = graph  # inherited by forked workers
            try:
                from concurrent.futures import ProcessPoolExecutor

                chunks = [c for c in np.array_split(cand, threads * 4) if c.size]
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    lb = max(lb, max(pool.map(_ecc_chunk, chunks)))
            finally:
                _ECC_GRAPH = None
            ub[cand] = lb  # all of them were evaluated exactly
            continue
        v = int(cand[np.argmax(ub[cand])])
        dist = _bfs_levels(graph, [v])
        ecc = int(dist.max())
        lb = max(lb, ecc)
        np.minimum(ub, dist.astype(np.int64) + ecc, out=ub)
        ub[v] = ecc


def diameter(graph, method="auto", threads=1):
    """Exact diameter of the largest connected component."""
    if graph.n == 0:
        raise ValueError("empty graph")
    label, sizes = connected_components(graph)
    lcc = int(np.argmax(sizes))
    lcc_size = int(sizes[lcc])
    sub, _ = _induced_subgraph(graph, label == lcc)
    if method == "auto":
        method = "ifub" if sub.n > 1000 else "exact"
    if method == "exact":
        diam = _diameter_all_sources(sub)
    elif method == "ifub":
        diam = _diameter_ifub(sub, threads=threads)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DiameterResult(
        diam=diam,
        component_fraction=lcc_size / graph.n,
        lcc_size=lcc_size,
        method=method,
    )


def typical_distance_sample(graph, pairs, seed):
    """Distances between `pairs` i.i.d. uniform vertex pairs (inf when
    disconnected, 0 when the two draws coincide)."""
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    rng = np.random.default_rng(seed)
    out = np.empty(pairs, dtype=np.float64)
    for i in range(pairs):
        a = int(rng.integers(graph.n))
        b = int(rng.integers(graph.n))
        if a == b:
            out[i] = 0.0
            continue
        # level-capped BFS with early exit once b is reached
        dist = np.full(graph.n, UNREACHED, dtype=np.int32)
        dist[a] = 0
        frontier = np.array([a], dtype=np.int64)
        level = 0
        found = False
        while frontier.size:
            level += 1
            cand = _frontier_neighbors(graph.indptr, graph.nbr, frontier)
            cand = cand[dist[cand] == UNREACHED]
            if cand.size == 0:
                break
            dist[cand] = level
            if dist[b] != UNREACHED:
                out[i] = level
                found = True
                break
            frontier = np.unique(cand)
        if not found:
            out[i] = np.inf
    return out


@dataclass
class CoreSet:
    members: np.ndarray
    threshold: float
    sigma: float
    snapshot_time: int


def extract_core(graph, params, sigma):
    """Vertices of degree >= (log n)^sigma; PAM degrees are taken at the
    half-time snapshot, CM degrees are final."""
    tau = params.tau
    if not sigma > 1.0 / (3.0 - tau):
        raise ValueError(
            f"sigma={sigma} must exceed 1/(3-tau)={1.0 / (3.0 - tau):.4f}"
        )
    if isinstance(graph, PamGraph):
        n = graph.t
        snapshot = n // 2
        deg = graph.degree_snapshot(snapshot)
    else:
        n = graph.n
        snapshot = n
        deg = graph.degrees
    threshold = math.log(n) ** sigma
    members = np.nonzero(deg >= threshold)[0]
    return CoreSet(
        members=members, threshold=threshold, sigma=sigma, snapshot_time=snapshot
    )


def core_diameter(graph, core):
    """Max member-to-member distance measured through the whole graph.

    `graph` must be a MultiGraph (pass the undirected view for PAM);
    raises on an empty core, returns inf if the core is disconnected in
    the ambient graph.
    """
    if core.members.size == 0:
        raise ValueError("empty core: diameter undefined")
    best = 0.0
    member_mask = np.zeros(graph.n, dtype=bool)
    member_mask[core.members] = True
    for v in core.members:
        levels = _bfs_levels(graph, [int(v)])
        reached = levels != UNREACHED
        if not np.all(reached[member_mask]):
            return math.inf
        best = max(best, int(levels[member_mask].max()))
    return int(best)


def default_threads():
    env = os.environ.get("ULTRASMALL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
