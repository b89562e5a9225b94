"""Position-based vehicle grouping and the group adjacency relation.

Groups are formed by k-means over vehicle positions; each group gets a
run-unique id, and two groups are adjacent when some member pair is
within radio range of each other.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import BadKError
from .params import SimParams
from .roadgraph import Point

CONVERGENCE_EPS_M = 1e-6
MAX_ITERATIONS = 100


@dataclass
class Group:
    gid: int
    members: set[int]
    centroid: Point
    epoch: int


@dataclass
class GroupTopology:
    groups: list[Group] = field(default_factory=list)
    adjacency: set[tuple[int, int]] = field(default_factory=set)

    def neighbors(self, gid: int) -> list[int]:
        out = [b if a == gid else a for a, b in self.adjacency if gid in (a, b)]
        return sorted(out)

    def by_gid(self, gid: int) -> Group:
        for g in self.groups:
            if g.gid == gid:
                return g
        raise KeyError(gid)


def choose_k(n_vehicles: int, target_group_size: int) -> int:
    """Number of clusters for n vehicles: one group per target-size block."""
    if n_vehicles == 0:
        return 0
    return math.ceil(n_vehicles / target_group_size)


def kmeans(points: list[Point], k: int, rng: random.Random,
           objective_trace: list[float] | None = None,
           ) -> tuple[list[int], list[Point]]:
    """Lloyd's algorithm with k-means++ seeding drawn from rng.

    Stops when the largest centroid displacement falls below 1e-6 m
    or after 100 iterations. Points tie-break to the lowest cluster
    index; a cluster left empty by an assignment pass is reseeded at
    the point currently farthest from its own centroid. If given,
    objective_trace collects the within-cluster sum of squared
    distances once per iteration.
    """
    n = len(points)
    if k < 1 or k > n:
        raise BadKError(f"k={k} out of range for {n} points")
    pts = np.asarray(points, dtype=float)
    centroids = _seed_kmeanspp(pts, k, rng)
    for _ in range(MAX_ITERATIONS):
        assign = _assign_nearest(pts, centroids)
        _reseed_empty(pts, centroids, assign, k)
        if objective_trace is not None:
            diffs = pts - centroids[assign]
            objective_trace.append(float(np.sum(diffs * diffs)))
        new_centroids = np.array([pts[assign == j].mean(axis=0) for j in range(k)])
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < CONVERGENCE_EPS_M:
            break
    # final pass so the returned labels satisfy the nearest-centroid
    # condition against the returned centroids exactly
    assign = _assign_nearest(pts, centroids)
    return assign.tolist(), [(float(c[0]), float(c[1])) for c in centroids]


def _seed_kmeanspp(pts: np.ndarray, k: int, rng: random.Random) -> np.ndarray:
    n = len(pts)
    chosen = [rng.randrange(n)]
    d2 = ((pts - pts[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        total = float(d2.sum())
        if total > 0.0:
            idx = rng.choices(range(n), weights=d2.tolist(), k=1)[0]
        else:
            idx = rng.randrange(n)
        chosen.append(idx)
        d2 = np.minimum(d2, ((pts - pts[idx]) ** 2).sum(axis=1))
    return pts[chosen].copy()


def _assign_nearest(pts: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)  # argmin takes the lowest index on ties


def _reseed_empty(pts: np.ndarray, centroids: np.ndarray, assign: np.ndarray, k: int) -> None:
    for j in range(k):
        if np.any(assign == j):
            continue
        dist = np.linalg.norm(pts - centroids[assign], axis=1)
        # only steal from clusters that keep at least one member
        counts = np.bincount(assign, minlength=k)
        dist[counts[assign] < 2] = -1.0
        i = int(dist.argmax())
        centroids[j] = pts[i]
        assign[i] = j


def form_groups(positions: dict[int, Point], params: SimParams, epoch: int,
                rng: random.Random) -> GroupTopology:
    """Cluster the given Active-vehicle positions into a fresh epoch of groups.

    Gids are epoch * k_max + cluster index, so they never repeat across
    epochs; empty clusters are dropped.
    """
    vids = sorted(positions)
    if not vids:
        return GroupTopology()
    k = choose_k(len(vids), params.target_group_size)
    assign, centroids = kmeans([positions[v] for v in vids], k, rng)
    groups = []
    for j in range(k):
        members = {vid for vid, a in zip(vids, assign) if a == j}
        if not members:
            continue
        groups.append(Group(gid=epoch * params.k_max + j, members=members,
                            centroid=centroids[j], epoch=epoch))
    adjacency = set()
    for i, a in enumerate(groups):
        for b in groups[i + 1:]:
            if group_adjacent(a, b, positions, params.comm_range_m):
                adjacency.add((min(a.gid, b.gid), max(a.gid, b.gid)))
    return GroupTopology(groups=groups, adjacency=adjacency)


def group_adjacent(a: Group, b: Group, positions: dict[int, Point],
                   r_comm: float) -> bool:
    """True when some member of a is within r_comm meters of some member of b."""
    for u in a.members:
        for v in b.members:
            if math.dist(positions[u], positions[v]) <= r_comm:
                return True
    return False
