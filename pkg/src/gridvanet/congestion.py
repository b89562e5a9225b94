"""Per-edge density sensing, freshest-wins map merging, gossip exchange,
and the density-to-travel-time edge weight."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .clustering import Group, GroupTopology
from .mobility import Vehicle, VehicleState
from .params import SimParams
from .roadgraph import Edge, RoadGraph


@dataclass(frozen=True)
class CongestionRecord:
    edge: int
    density: float      # vehicles per meter per lane
    stamp: float        # simulated seconds
    origin: int         # gid that sensed it


# One record per edge, keyed by edge id.
CongestionMap = dict[int, CongestionRecord]


def sense(grp: Group, vehicles: dict[int, Vehicle], g: RoadGraph,
          now: float) -> list[CongestionRecord]:
    """Density records for every edge occupied by at least one group member.

    The density counts all Active vehicles on the edge, not only members:
    the simulator's ground truth stands in for beacon overhearing.
    """
    occupancy = Counter(v.edge for v in vehicles.values()
                        if v.state is VehicleState.ACTIVE)
    member_edges = sorted({vehicles[m].edge for m in grp.members
                           if vehicles[m].state is VehicleState.ACTIVE})
    records = []
    for eid in member_edges:
        e = g.edges[eid]
        rho = occupancy[eid] / (e.length * e.lanes)
        records.append(CongestionRecord(edge=eid, density=rho, stamp=now, origin=grp.gid))
    return records


def merge(dst: CongestionMap, src: Iterable[CongestionRecord], now: float,
          t_expire: float) -> CongestionMap:
    """Fold records into a map: newest stamp wins per edge, stamp ties go to
    the lower origin gid, then anything older than t_expire is dropped."""
    out = dict(dst)
    for rec in src:
        cur = out.get(rec.edge)
        if cur is None or (rec.stamp, -rec.origin) > (cur.stamp, -cur.origin):
            out[rec.edge] = rec
    return {eid: rec for eid, rec in out.items() if now - rec.stamp <= t_expire}


def gossip_round(maps: dict[int, CongestionMap], topo: GroupTopology, now: float,
                 t_expire: float) -> dict[int, CongestionMap]:
    """One synchronous exchange: each group folds in the full pre-round maps
    of all adjacent groups. Double-buffered, so intra-round order is moot."""
    out = {}
    for grp in topo.groups:
        incoming: list[CongestionRecord] = []
        for nb in topo.neighbors(grp.gid):
            incoming.extend(maps[nb][eid] for eid in sorted(maps[nb]))
        out[grp.gid] = merge(maps[grp.gid], incoming, now, t_expire)
    return out


def edge_weight(e: Edge, cmap: CongestionMap, now: float, params: SimParams) -> float:
    """Believed travel time of an edge in seconds.

    Speed follows the linear density-speed law v = vmax * (1 - rho/rho_jam),
    floored at epsilon_v * vmax so the weight stays finite; a missing or
    expired record means free flow.
    """
    rec = cmap.get(e.id)
    rho = 0.0
    if rec is not None and now - rec.stamp <= params.t_expire_s:
        rho = rec.density
    speed = e.vmax * max(1.0 - rho / e.jam_density, params.epsilon_v)
    return e.length / speed
