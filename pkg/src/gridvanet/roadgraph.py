"""Directed road network with planar geometry: the simulated digital map.

Coordinates are meters in the plane; an edge runs tail -> head. Two-way
streets are two directed edge records. The graph is immutable after load
and safe to share across concurrent group computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DuplicateIdError,
    EmptyGraphError,
    MissingVertexError,
    NonPositiveFieldError,
    UnknownVertexError,
)

Point = tuple[float, float]


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    length: float          # meters
    lanes: int
    vmax: float            # free-flow speed, m/s
    jam_density: float     # vehicles per meter per lane


class RoadGraph:
    """Validated vertex/edge store with per-vertex outgoing adjacency."""

    def __init__(self, vertices: list[Vertex], edges: list[Edge]):
        self.vertices: dict[int, Vertex] = {}
        for v in vertices:
            if v.id in self.vertices:
                raise DuplicateIdError(f"duplicate vertex id {v.id}")
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                raise NonPositiveFieldError(f"vertex {v.id} has non-finite coordinates")
            self.vertices[v.id] = v
        self.edges: dict[int, Edge] = {}
        self._out: dict[int, list[int]] = {vid: [] for vid in self.vertices}
        for e in edges:
            if e.id in self.edges:
                raise DuplicateIdError(f"duplicate edge id {e.id}")
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise MissingVertexError(f"edge {e.id} references unknown vertex")
            if e.tail == e.head:
                raise NonPositiveFieldError(f"edge {e.id} is a self-loop")
            if e.length <= 0 or e.vmax <= 0 or e.jam_density <= 0 or e.lanes < 1:
                raise NonPositiveFieldError(f"edge {e.id} has a non-positive field")
            self.edges[e.id] = e
            self._out[e.tail].append(e.id)
        for out in self._out.values():
            out.sort()

    def out_edges(self, vertex_id: int) -> list[int]:
        """Outgoing edge ids, sorted ascending for determinism."""
        try:
            return self._out[vertex_id]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {vertex_id}") from None

    def nearest_vertex(self, p: Point) -> int:
        """Id of the vertex closest to p; ties break to the lowest id."""
        if not self.vertices:
            raise EmptyGraphError("graph has no vertices")
        px, py = p
        best_id = -1
        best_d2 = math.inf
        for vid in sorted(self.vertices):
            v = self.vertices[vid]
            d2 = (v.x - px) ** 2 + (v.y - py) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best_id = vid
        return best_id

    def edge_endpoints(self, edge_id: int) -> tuple[Point, Point]:
        e = self.edges[edge_id]
        tail = self.vertices[e.tail]
        head = self.vertices[e.head]
        return (tail.x, tail.y), (head.x, head.y)


def load_graph(doc: dict) -> RoadGraph:
    """Build a RoadGraph from the graph section of a scenario document."""
    vertices = [Vertex(id=int(v["id"]), x=float(v["x"]), y=float(v["y"]))
                for v in doc.get("vertices", [])]
    edges = [Edge(id=int(e["id"]), tail=int(e["from"]), head=int(e["to"]),
                  length=float(e["length"]), lanes=int(e["lanes"]),
                  vmax=float(e["vmax"]), jam_density=float(e["jam_density"]))
             for e in doc.get("edges", [])]
    return RoadGraph(vertices, edges)


def graph_to_doc(g: RoadGraph) -> dict:
    """Inverse of load_graph; round-trips through JSON without loss."""
    return {
        "vertices": [{"id": v.id, "x": v.x, "y": v.y}
                     for v in (g.vertices[i] for i in sorted(g.vertices))],
        "edges": [{"id": e.id, "from": e.tail, "to": e.head, "length": e.length,
                   "lanes": e.lanes, "vmax": e.vmax, "jam_density": e.jam_density}
                  for e in (g.edges[i] for i in sorted(g.edges))],
    }
