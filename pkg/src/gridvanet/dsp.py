"""Group-level distributed single-source shortest paths.

Road-graph vertices are partitioned round-robin across the group's member
vehicles; one logical process per vertex then runs a diffusing computation
over simulated Dist/Ack messages, with termination detected by deficit
counters rooted at the source. Weights are converted to integer
microseconds so distance comparisons are exact and independent of message
delivery order. A sequential Dijkstra oracle lives here as well.
"""

from __future__ import annotations

import heapq
import math
import random
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .clustering import Group
from .errors import (
    NegativeWeightError,
    NoMembersError,
    NonQuiescentError,
    UnreachableError,
)
from .mobility import Vehicle, next_vertex
from .roadgraph import Edge, RoadGraph, Vertex

WeightFn = Callable[[int], float]

MICROS = 1_000_000


def to_micros(seconds: float) -> int:
    """Seconds to integer microseconds, rounded half-up."""
    return int(math.floor(seconds * MICROS + 0.5))


class MsgKind(Enum):
    DIST = "dist"
    ACK = "ack"


@dataclass(frozen=True)
class GridMessage:
    kind: MsgKind
    src: int            # sending vertex
    dst: int            # receiving vertex
    value: int = 0      # proposed distance in microseconds (DIST only)
    hop: bool = False   # True when src and dst live on different owners


@dataclass
class VertexProcess:
    vertex: int
    owner: int
    d: float = math.inf        # microseconds once finite
    pred: int | None = None
    deficit: int = 0           # own sent-but-unacked messages
    engager: int | None = None # vertex owed an ack once deficit drains


@dataclass
class SsspResult:
    source: int
    dist: dict[int, float]            # seconds; unreachable = inf
    pred: dict[int, int | None]
    msg_count_local: int = 0
    msg_count_remote: int = 0


def partition_vertices(vertices: list[int], members: list[int]) -> dict[int, int]:
    """Round-robin vertex-to-owner assignment, both sides sorted ascending."""
    if not members:
        raise NoMembersError("cannot partition vertices over zero members")
    owners_sorted = sorted(members)
    return {vid: owners_sorted[i % len(owners_sorted)]
            for i, vid in enumerate(sorted(vertices))}


def group_source(grp: Group, g: RoadGraph) -> int:
    """Common source for the group's computation: vertex nearest the centroid."""
    return g.nearest_vertex(grp.centroid)


def run_sssp(g: RoadGraph, weight: WeightFn, source: int, owners: dict[int, int],
             scheduler: str = "fifo", rng: random.Random | None = None) -> SsspResult:
    """Diffusing-computation SSSP over simulated message passing.

    The source adopts distance 0 and floods Dist(d + w) over its out-edges,
    counting each send in its deficit. A vertex receiving Dist(D):

    * D < d: adopt D and the sender as pred, ack any previously pending
      engager, remember the sender as the new engager, and propagate
      Dist(D + w) on every out-edge (deficit += 1 per send);
    * D >= d: ack immediately.

    Every Ack decrements the receiving vertex's deficit; a vertex whose
    deficit returns to 0 acks its engager. The computation has quiesced when
    no messages remain in flight, at which point the source's deficit must
    be 0. Raises NonQuiescentError if the processed-message count exceeds
    10 * |V| * |E| first.

    scheduler picks the delivery order of in-flight messages: "fifo"
    (default), "lifo", or "random" (needs rng). Distances are identical for
    every order; only message counts and pred trees may vary.
    """
    w_us: dict[int, int] = {}
    for eid, e in g.edges.items():
        w = weight(eid)
        if not math.isfinite(w) or w < 0:
            raise NegativeWeightError(f"edge {eid} has weight {w}")
        w_us[eid] = to_micros(w)

    procs = {vid: VertexProcess(vertex=vid, owner=owners[vid]) for vid in g.vertices}
    queue: deque[GridMessage] = deque()
    counts = {"local": 0, "remote": 0}
    if scheduler == "random" and rng is None:
        raise ValueError("random scheduler needs an rng")

    def send(kind: MsgKind, src: int, dst: int, value: int = 0) -> None:
        hop = owners[src] != owners[dst]
        counts["remote" if hop else "local"] += 1
        queue.append(GridMessage(kind, src, dst, value, hop))

    def propagate(p: VertexProcess) -> None:
        for eid in g.out_edges(p.vertex):
            send(MsgKind.DIST, p.vertex, g.edges[eid].head, int(p.d) + w_us[eid])
            p.deficit += 1

    src_proc = procs[source]
    src_proc.d = 0
    propagate(src_proc)

    budget = 10 * len(g.vertices) * len(g.edges)
    processed = 0
    while queue:
        if scheduler == "fifo":
            msg = queue.popleft()
        elif scheduler == "lifo":
            msg = queue.pop()
        else:
            i = rng.randrange(len(queue))
            queue.rotate(-i)
            msg = queue.popleft()
            queue.rotate(i)
        processed += 1
        if processed > budget:
            raise NonQuiescentError(
                f"exceeded message budget {budget} (|V|={len(g.vertices)}, |E|={len(g.edges)})")
        p = procs[msg.dst]
        if msg.kind is MsgKind.DIST:
            if msg.value < p.d:
                p.d = msg.value
                p.pred = msg.src
                if p.engager is not None:
                    send(MsgKind.ACK, p.vertex, p.engager)
                p.engager = msg.src
                propagate(p)
                if p.deficit == 0:  # sink vertex: nothing to wait for
                    send(MsgKind.ACK, p.vertex, p.engager)
                    p.engager = None
            else:
                send(MsgKind.ACK, p.vertex, msg.src)
        else:
            p.deficit -= 1
            if p.deficit == 0 and p.engager is not None:
                send(MsgKind.ACK, p.vertex, p.engager)
                p.engager = None

    if src_proc.deficit != 0 or any(p.deficit != 0 or p.engager is not None
                                    for p in procs.values()):
        raise NonQuiescentError("queue drained without quiescence")

    dist = {vid: (p.d / MICROS if math.isfinite(p.d) else math.inf)
            for vid, p in procs.items()}
    pred = {vid: p.pred for vid, p in procs.items()}
    return SsspResult(source=source, dist=dist, pred=pred,
                      msg_count_local=counts["local"],
                      msg_count_remote=counts["remote"])


def dijkstra_oracle(g: RoadGraph, weight: WeightFn, source: int,
                    ) -> tuple[dict[int, float], dict[int, int | None]]:
    """Textbook sequential SSSP on the same integer-microsecond weights.

    Priority ties break to the lower vertex id. Independent of run_sssp by
    construction; used as its test oracle.
    """
    w_us = {}
    for eid in g.edges:
        w = weight(eid)
        if not math.isfinite(w) or w < 0:
            raise NegativeWeightError(f"edge {eid} has weight {w}")
        w_us[eid] = to_micros(w)

    dist_us: dict[int, float] = {vid: math.inf for vid in g.vertices}
    pred: dict[int, int | None] = {vid: None for vid in g.vertices}
    dist_us[source] = 0
    heap: list[tuple[int, int]] = [(0, source)]
    done: set[int] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for eid in g.out_edges(u):
            head = g.edges[eid].head
            nd = d + w_us[eid]
            if nd < dist_us[head]:
                dist_us[head] = nd
                pred[head] = u
                heapq.heappush(heap, (nd, head))
    dist = {vid: (d / MICROS if math.isfinite(d) else math.inf)
            for vid, d in dist_us.items()}
    return dist, pred


def extract_path(r: SsspResult, dest: int) -> list[int]:
    """Vertex walk source -> dest along the predecessor tree."""
    if math.isinf(r.dist[dest]):
        raise UnreachableError(f"vertex {dest} unreachable from {r.source}")
    path = [dest]
    v = dest
    while v != r.source:
        v = r.pred[v]
        path.append(v)
    path.reverse()
    return path


def member_route(v: Vehicle, grp_source: int, r: SsspResult, g: RoadGraph,
                 weight: WeightFn) -> list[int]:
    """Drivable edge route for one member, reusing the group's shared tree.

    The member drives its own shortest path to the group source, then the
    tree path from the source to its destination; any vertex revisited in
    the concatenation has the intervening cycle excised. The resulting
    route starts at the vehicle's next vertex.
    """
    assert r.source == grp_source
    start = next_vertex(v, g)
    ldist, lpred = dijkstra_oracle(g, weight, start)
    if math.isinf(ldist[grp_source]):
        raise UnreachableError(f"group source {grp_source} unreachable from {start}")
    local = _pred_walk(lpred, start, grp_source)
    tree = extract_path(r, v.dest)
    walk = _excise_cycles(local + tree[1:])
    return [_cheapest_edge(g, a, b, weight) for a, b in zip(walk, walk[1:])]


def shortest_route(g: RoadGraph, weight: WeightFn, start: int, dest: int) -> list[int]:
    """Sequential shortest edge route start -> dest; [] when they coincide."""
    dist, pred = dijkstra_oracle(g, weight, start)
    if math.isinf(dist[dest]):
        raise UnreachableError(f"vertex {dest} unreachable from {start}")
    walk = _pred_walk(pred, start, dest)
    return [_cheapest_edge(g, a, b, weight) for a, b in zip(walk, walk[1:])]


def _pred_walk(pred: dict[int, int | None], source: int, dest: int) -> list[int]:
    path = [dest]
    u = dest
    while u != source:
        u = pred[u]
        path.append(u)
    path.reverse()
    return path


def _excise_cycles(walk: list[int]) -> list[int]:
    """Drop every loop: keep the first occurrence of a revisited vertex and
    splice directly to the successor of its later occurrence."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for u in walk:
        if u in pos:
            for dropped in out[pos[u] + 1:]:
                del pos[dropped]
            del out[pos[u] + 1:]
        else:
            pos[u] = len(out)
            out.append(u)
    return out


def random_graph(rng: random.Random, max_vertices: int = 50,
                 max_edges: int = 200) -> tuple[RoadGraph, dict[int, int]]:
    """Random directed graph plus integer edge weights (seconds, in [1, 100])
    for the run_sssp vs dijkstra_oracle equivalence sweeps. Parallel edges
    are allowed on purpose."""
    n = rng.randint(2, max_vertices)
    vertices = [Vertex(id=i, x=rng.uniform(0, 1000), y=rng.uniform(0, 1000))
                for i in range(n)]
    m = rng.randint(1, min(max_edges, 4 * n))
    edges = []
    for eid in range(m):
        tail = rng.randrange(n)
        head = rng.randrange(n)
        while head == tail:
            head = rng.randrange(n)
        edges.append(Edge(id=eid, tail=tail, head=head, length=1.0, lanes=1,
                          vmax=1.0, jam_density=1.0))
    g = RoadGraph(vertices, edges)
    weights = {e.id: rng.randint(1, 100) for e in edges}
    return g, weights


def oracle_sweep(samples: int, seed: int, g: RoadGraph | None = None,
                 scheduler: str = "fifo") -> tuple[int, int]:
    """Compare run_sssp against dijkstra_oracle over seeded random inputs.

    Without a graph, each sample draws a fresh random graph; with one, each
    sample draws fresh random weights and a random source on it. Returns
    (matching samples, samples).
    """
    rng = random.Random(seed)
    passes = 0
    for _ in range(samples):
        if g is None:
            graph, weights = random_graph(rng)
        else:
            graph = g
            weights = {eid: rng.randint(1, 100) for eid in sorted(g.edges)}
        source = rng.choice(sorted(graph.vertices))
        members = list(range(rng.randint(1, 8)))
        owners = partition_vertices(sorted(graph.vertices), members)
        sched_rng = random.Random(rng.randrange(2 ** 32)) if scheduler == "random" else None
        result = run_sssp(graph, weights.__getitem__, source, owners,
                          scheduler=scheduler, rng=sched_rng)
        oracle_dist, _ = dijkstra_oracle(graph, weights.__getitem__, source)
        if result.dist == oracle_dist:
            passes += 1
    return passes, samples


def _cheapest_edge(g: RoadGraph, tail: int, head: int, weight: WeightFn) -> int:
    best: tuple[int, int] | None = None
    for eid in g.out_edges(tail):
        if g.edges[eid].head == head:
            key = (to_micros(weight(eid)), eid)
            if best is None or key < best:
                best = key
    if best is None:
        raise UnreachableError(f"no edge {tail} -> {head}")
    return best[1]
