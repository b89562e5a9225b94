"""Vehicle lifecycle and movement along routed edges."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .errors import RouteExhaustedError
from .roadgraph import Point, RoadGraph


class VehicleState(Enum):
    PENDING = "pending"
    ACTIVE = "active"
    ARRIVED = "arrived"


@dataclass
class Vehicle:
    """A simulated node: position is (edge, offset), route holds the edges
    still to be entered after the current one."""

    id: int
    edge: int                 # current edge id
    offset: float             # meters from the edge tail
    dest: int                 # destination vertex id
    depart_time: float
    route: list[int] = field(default_factory=list)
    state: VehicleState = VehicleState.PENDING
    arrive_time: float | None = None


def advance(v: Vehicle, g: RoadGraph, speed_of: Callable[[int], float],
            dt: float, now: float) -> Vehicle:
    """Move an Active vehicle for dt seconds at per-edge speeds.

    Leftover time at a vertex crossing carries over at the next edge's
    speed, so positions do not depend on where edge boundaries fall
    inside a step. Arrival happens when the current edge ends with an
    empty route and its head is the destination.
    """
    assert v.state is VehicleState.ACTIVE
    remaining = dt
    while remaining > 0:
        edge = g.edges[v.edge]
        speed = speed_of(v.edge)
        to_end = edge.length - v.offset
        if speed * remaining < to_end:
            v.offset += speed * remaining
            break
        # reaches the edge end within this step
        remaining -= to_end / speed
        if v.route:
            v.edge = v.route.pop(0)
            v.offset = 0.0
        elif edge.head == v.dest:
            v.offset = edge.length
            v.state = VehicleState.ARRIVED
            v.arrive_time = now + (dt - remaining)
            break
        else:
            raise RouteExhaustedError(
                f"vehicle {v.id} ran out of route at vertex {edge.head}, dest {v.dest}")
    return v


def position(v: Vehicle, g: RoadGraph) -> Point:
    """Planar position by linear interpolation along the current edge."""
    (tx, ty), (hx, hy) = g.edge_endpoints(v.edge)
    frac = v.offset / g.edges[v.edge].length
    return (tx + (hx - tx) * frac, ty + (hy - ty) * frac)


def next_vertex(v: Vehicle, g: RoadGraph) -> int:
    """The vertex the vehicle will reach next: head of its current edge."""
    return g.edges[v.edge].head
