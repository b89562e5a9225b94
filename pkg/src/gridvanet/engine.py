"""Discrete-time orchestration of the whole pipeline.

Each step runs a fixed phase order: departures, reclustering, sensing,
gossip, per-group shortest paths with route reassignment, movement, then
metrics. Beliefs (possibly stale congestion maps) pick routes; ground-truth
edge occupancy moves vehicles. Everything is a pure function of
(scenario, seed), which the determinism tests pin down.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from . import clustering, congestion, dsp
from .congestion import CongestionMap
from .mobility import Vehicle, VehicleState, advance, next_vertex, position
from .params import SimParams
from .roadgraph import Edge, RoadGraph
from .scenario import Scenario

MODE_GRID = "grid"
MODE_STATIC = "static"

STEP_COLUMNS = ["time", "active", "arrived", "gossip_records",
                "sssp_msgs_local", "sssp_msgs_remote", "mean_density"]
TRIP_COLUMNS = ["vehicle_id", "depart", "arrive", "trip_time", "route_changes"]


@dataclass
class Metrics:
    step_rows: list[tuple] = field(default_factory=list)
    trip_rows: list[tuple] = field(default_factory=list)
    route_changes: Counter = field(default_factory=Counter)


@dataclass
class World:
    graph: RoadGraph
    vehicles: dict[int, Vehicle]
    params: SimParams
    rng: random.Random
    mode: str = MODE_GRID
    time: float = 0.0
    step_index: int = 0
    epoch: int = -1
    topo: clustering.GroupTopology = field(default_factory=clustering.GroupTopology)
    maps: dict[int, CongestionMap] = field(default_factory=dict)
    metrics: Metrics = field(default_factory=Metrics)


def ground_speed(e: Edge, occupants: int, epsilon_v: float) -> float:
    """True speed on an edge under the linear density-speed law with floor."""
    rho = occupants / (e.length * e.lanes)
    return e.vmax * max(1.0 - rho / e.jam_density, epsilon_v)


def free_flow_weight(g: RoadGraph):
    return lambda eid: g.edges[eid].length / g.edges[eid].vmax


def init(scenario: Scenario, seed: int, mode: str = MODE_GRID) -> World:
    """Fresh world at time 0: all vehicles Pending, rng seeded from seed only."""
    if mode not in (MODE_GRID, MODE_STATIC):
        raise ValueError(f"unknown mode {mode!r}")
    vehicles = {spec.id: Vehicle(id=spec.id, edge=spec.origin_edge, offset=spec.offset,
                                 dest=spec.dest, depart_time=spec.depart_time)
                for spec in scenario.vehicles}
    return World(graph=scenario.graph, vehicles=vehicles, params=scenario.params,
                 rng=random.Random(seed), mode=mode)


def step(w: World) -> World:
    """Advance the world by one dt. See the module docstring for phase order."""
    p = w.params
    g = w.graph
    now = w.time
    gossip_records = 0
    sssp_local = 0
    sssp_remote = 0

    # 1: departures, with a free-flow bootstrap route so new vehicles can
    # move before their first group computation covers them
    ff_weight = free_flow_weight(g)
    for vid in sorted(w.vehicles):
        v = w.vehicles[vid]
        if v.state is VehicleState.PENDING and v.depart_time <= now:
            v.state = VehicleState.ACTIVE
            v.route = dsp.shortest_route(g, ff_weight, next_vertex(v, g), v.dest)

    if w.mode == MODE_GRID:
        # 2: recluster
        if w.step_index % p.steps_per(p.recluster_interval_s) == 0:
            _recluster(w, now)
        # 3: sense own region
        for grp in sorted(w.topo.groups, key=lambda grp: grp.gid):
            fresh = congestion.sense(grp, w.vehicles, g, now)
            w.maps[grp.gid] = congestion.merge(w.maps[grp.gid], fresh, now, p.t_expire_s)
        # 4: gossip with adjacent groups
        if w.step_index % p.steps_per(p.gossip_interval_s) == 0:
            for grp in w.topo.groups:
                gossip_records += len(w.maps[grp.gid]) * len(w.topo.neighbors(grp.gid))
            w.maps = congestion.gossip_round(w.maps, w.topo, now, p.t_expire_s)
        # 5: per-group distributed shortest paths, then route reassignment
        if w.step_index % p.steps_per(p.sssp_interval_s) == 0:
            for grp in sorted(w.topo.groups, key=lambda grp: grp.gid):
                local, remote = _group_sssp(w, grp, now)
                sssp_local += local
                sssp_remote += remote

    # 6: movement at ground-truth speeds frozen at the start of the phase
    occupancy = Counter(v.edge for v in w.vehicles.values()
                        if v.state is VehicleState.ACTIVE)

    def speed_of(eid: int) -> float:
        return ground_speed(g.edges[eid], occupancy[eid], p.epsilon_v)

    for vid in sorted(w.vehicles):
        v = w.vehicles[vid]
        if v.state is not VehicleState.ACTIVE:
            continue
        advance(v, g, speed_of, p.dt_s, now)
        if v.state is VehicleState.ARRIVED:
            w.metrics.trip_rows.append((v.id, v.depart_time, v.arrive_time,
                                        v.arrive_time - v.depart_time,
                                        w.metrics.route_changes[v.id]))
    densities = [occupancy[eid] / (e.length * e.lanes) for eid, e in g.edges.items()]
    mean_density = sum(densities) / len(densities) if densities else 0.0

    # 7: clock
    w.step_index += 1
    w.time = w.step_index * p.dt_s

    # 8: metrics row, labeled with the step's start time
    states = Counter(v.state for v in w.vehicles.values())
    w.metrics.step_rows.append((now, states[VehicleState.ACTIVE],
                                states[VehicleState.ARRIVED], gossip_records,
                                sssp_local, sssp_remote, mean_density))
    return w


def _recluster(w: World, now: float) -> None:
    """Re-form groups and carry congestion knowledge over via the members."""
    positions = {vid: position(v, w.graph) for vid, v in w.vehicles.items()
                 if v.state is VehicleState.ACTIVE}
    old_maps = w.maps
    old_gid_of = {m: grp.gid for grp in w.topo.groups for m in grp.members}
    w.epoch += 1
    w.topo = clustering.form_groups(positions, w.params, w.epoch, w.rng)
    w.maps = {}
    for grp in w.topo.groups:
        carried: CongestionMap = {}
        for gid in sorted({old_gid_of[m] for m in grp.members if m in old_gid_of}):
            records = [old_maps[gid][eid] for eid in sorted(old_maps[gid])]
            carried = congestion.merge(carried, records, now, w.params.t_expire_s)
        w.maps[grp.gid] = carried


def _group_sssp(w: World, grp: clustering.Group, now: float) -> tuple[int, int]:
    """Run one group's computation and reassign its members' routes."""
    members = sorted(m for m in grp.members
                     if w.vehicles[m].state is VehicleState.ACTIVE)
    if not members:
        return 0, 0
    cmap = w.maps[grp.gid]

    def weight(eid: int) -> float:
        return congestion.edge_weight(w.graph.edges[eid], cmap, now, w.params)

    source = dsp.group_source(grp, w.graph)
    owners = dsp.partition_vertices(sorted(w.graph.vertices), members)
    result = dsp.run_sssp(w.graph, weight, source, owners)
    for m in members:
        v = w.vehicles[m]
        new_route = dsp.member_route(v, source, result, w.graph, weight)
        if new_route != v.route:
            v.route = new_route
            w.metrics.route_changes[m] += 1
    return result.msg_count_local, result.msg_count_remote


def run(w: World, duration: float) -> Metrics:
    """Apply duration / dt steps and return the accumulated metrics."""
    n_steps = duration / w.params.dt_s
    if abs(n_steps - round(n_steps)) > 1e-9:
        raise ValueError(f"duration {duration} is not a multiple of dt {w.params.dt_s}")
    for _ in range(round(n_steps)):
        step(w)
    return w.metrics


def _fmt(x) -> str:
    return str(x)


def write_steps_csv(metrics: Metrics, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(STEP_COLUMNS) + "\n")
        for row in metrics.step_rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_trips_csv(metrics: Metrics, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(TRIP_COLUMNS) + "\n")
        for row in metrics.trip_rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
